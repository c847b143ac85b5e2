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

#include "shadowkit/json_io.h"

#include <fstream>
#include <sstream>

#include "shadowkit/error.h"

namespace shadowkit {

using nlohmann::json;

namespace {

Eigen::Vector3d Vec3FromJson(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kSchemaError, std::string(what) + " must be a 3-array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

json TransformToJson(const Transform& t) {
  const Eigen::Quaterniond& q = t.rotation();
  const Eigen::Vector3d& p = t.translation();
  return json{{"quaternion", {q.w(), q.x(), q.y(), q.z()}},
              {"translation", {p.x(), p.y(), p.z()}}};
}

Transform TransformFromJson(const json& j) {
  try {
    const json& q = j.at("quaternion");
    if (!q.is_array() || q.size() != 4) {
      throw Error(ErrorCode::kSchemaError, "quaternion must be a 4-array [w,x,y,z]");
    }
    const Eigen::Quaterniond rot(q[0].get<double>(), q[1].get<double>(),
                                 q[2].get<double>(), q[3].get<double>());
    if (rot.norm() < 1e-12) {
      throw Error(ErrorCode::kSchemaError, "quaternion has zero norm");
    }
    return Transform(rot, Vec3FromJson(j.at("translation"), "translation"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("bad pose: ") + e.what());
  }
}

json CameraToJson(const Camera& camera) {
  const CameraIntrinsics& k = camera.intrinsics;
  json j{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
         {"width", k.width}, {"height", k.height}};
  if (camera.projection == Projection::kOrthographic) j["projection"] = "orthographic";
  return j;
}

Camera CameraFromJson(const json& j) {
  try {
    CameraIntrinsics k;
    k.fx = j.at("fx").get<double>();
    k.fy = j.at("fy").get<double>();
    k.cx = j.at("cx").get<double>();
    k.cy = j.at("cy").get<double>();
    k.width = j.at("width").get<int>();
    k.height = j.at("height").get<int>();
    try {
      k.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kSchemaError, e.what());
    }
    Projection projection = Projection::kPinhole;
    if (j.contains("projection")) {
      const std::string p = j.at("projection").get<std::string>();
      if (p == "orthographic") {
        projection = Projection::kOrthographic;
      } else if (p != "pinhole") {
        throw Error(ErrorCode::kSchemaError, "unknown projection '" + p + "'");
      }
    }
    return Camera(k, projection);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("bad intrinsics: ") + e.what());
  }
}

const Transform& Calibration::Extrinsics(const std::string& robot) const {
  auto it = extrinsics.find(robot);
  if (it == extrinsics.end()) {
    throw Error(ErrorCode::kSchemaError, "calibration has no extrinsics for '" + robot + "'");
  }
  return it->second;
}

Calibration ParseCalibration(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("calibration is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("intrinsics") || !j.contains("extrinsics") ||
      !j["extrinsics"].is_object()) {
    throw Error(ErrorCode::kSchemaError, "calibration needs 'intrinsics' and 'extrinsics'");
  }
  Calibration c;
  c.camera = CameraFromJson(j["intrinsics"]);
  for (const auto& [name, pose] : j["extrinsics"].items()) {
    c.extrinsics.emplace(name, TransformFromJson(pose));
  }
  return c;
}

Calibration LoadCalibration(const std::filesystem::path& path) {
  return ParseCalibration(ReadTextFile(path));
}

std::string SerializeCalibration(const Calibration& calibration) {
  json j;
  j["intrinsics"] = CameraToJson(calibration.camera);
  j["extrinsics"] = json::object();
  for (const auto& [name, t] : calibration.extrinsics) {
    j["extrinsics"][name] = TransformToJson(t);
  }
  return j.dump(2) + "\n";
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace shadowkit
