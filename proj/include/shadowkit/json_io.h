// Copyright 2026 The ShadowKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHADOWKIT_JSON_IO_H_
#define SHADOWKIT_JSON_IO_H_

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "shadowkit/geometry.h"

namespace shadowkit {

// Pose schema: {"quaternion": [w, x, y, z], "translation": [x, y, z]}.
nlohmann::json TransformToJson(const Transform& t);
Transform TransformFromJson(const nlohmann::json& j);

nlohmann::json CameraToJson(const Camera& camera);
Camera CameraFromJson(const nlohmann::json& j);

// Camera calibration shared by every robot in a scene. Each extrinsic maps
// points expressed in that robot's base frame into the camera frame
// (T_base->camera).
struct Calibration {
  Camera camera;
  std::map<std::string, Transform> extrinsics;

  // Throws Error(kSchemaError) when the robot has no extrinsics.
  const Transform& Extrinsics(const std::string& robot) const;
};

// {"intrinsics": {fx, fy, cx, cy, width, height[, projection]},
//  "extrinsics": {"<robot>": <pose>, ...}}
// Throws Error(kSchemaError) on a malformed document.
Calibration ParseCalibration(const std::string& text);
Calibration LoadCalibration(const std::filesystem::path& path);
std::string SerializeCalibration(const Calibration& calibration);

// Reads a whole file. Throws Error(kMissingFile) when it cannot be opened.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace shadowkit

#endif  // SHADOWKIT_JSON_IO_H_
