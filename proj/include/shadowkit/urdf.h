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

#ifndef SHADOWKIT_URDF_H_
#define SHADOWKIT_URDF_H_

#include <filesystem>
#include <string>
#include <vector>

#include "shadowkit/robot_model.h"

namespace shadowkit {

// Parses the visual subset of URDF. Mesh references ("package://pkg/x.stl",
// relative or absolute paths) resolve against `asset_root`. Box, cylinder
// and sphere primitives are tessellated so every visual is a TriangleMesh.
// Continuous joints become revolute joints limited to +/- 2 pi. Elements
// that do not affect rendering or kinematics (collision, transmission,
// sensor, gazebo) are skipped and reported in `warnings` when non-null.
//
// Throws Error with kMalformedXml, kCyclicKinematics, kMissingMeshFile or
// kUnsupportedJointType.
RobotModel ParseUrdf(const std::string& xml, const std::filesystem::path& asset_root,
                     std::vector<std::string>* warnings = nullptr);

// Reads a URDF file. An empty asset root means the file's directory.
RobotModel LoadUrdf(const std::filesystem::path& path,
                    const std::filesystem::path& asset_root = {},
                    std::vector<std::string>* warnings = nullptr);

// Writes `model` as `<dir>/<name>.urdf` plus one OBJ per visual under
// `<dir>/meshes/`, such that LoadUrdf(result, dir) rebuilds the same tree.
// Returns the URDF path.
std::filesystem::path WriteUrdf(const RobotModel& model, const std::filesystem::path& dir);

}  // namespace shadowkit

#endif  // SHADOWKIT_URDF_H_
