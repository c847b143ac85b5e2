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

#include "shadowkit/urdf.h"

#include <cstdio>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "shadowkit/error.h"
#include "shadowkit/json_io.h"

namespace shadowkit {

namespace pt = boost::property_tree;

namespace {

std::string Attr(const pt::ptree& node, const std::string& name, const std::string& fallback = "") {
  return node.get<std::string>("<xmlattr>." + name, fallback);
}

std::vector<double> Numbers(const std::string& text, std::size_t expected, const std::string& what) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != expected) {
    throw Error(ErrorCode::kMalformedXml, "expected " + std::to_string(expected) +
                                              " numbers in " + what + ", got '" + text + "'");
  }
  return out;
}

Eigen::Vector3d Vec3Attr(const pt::ptree& node, const std::string& name,
                         const Eigen::Vector3d& fallback, const std::string& what) {
  const std::string s = Attr(node, name);
  if (s.empty()) return fallback;
  const auto v = Numbers(s, 3, what);
  return {v[0], v[1], v[2]};
}

double DoubleAttr(const pt::ptree& node, const std::string& name, double fallback,
                  const std::string& what) {
  const std::string s = Attr(node, name);
  if (s.empty()) return fallback;
  return Numbers(s, 1, what)[0];
}

Transform Origin(const pt::ptree& parent, const std::string& what) {
  const auto origin = parent.get_child_optional("origin");
  if (!origin) return Transform();
  return Transform::FromRpy(Vec3Attr(*origin, "xyz", Eigen::Vector3d::Zero(), what + " origin"),
                            Vec3Attr(*origin, "rpy", Eigen::Vector3d::Zero(), what + " origin"));
}

std::filesystem::path ResolveMesh(const std::string& filename,
                                  const std::filesystem::path& asset_root) {
  const std::string kPackage = "package://";
  const std::string kFile = "file://";
  std::vector<std::filesystem::path> candidates;
  if (filename.rfind(kPackage, 0) == 0) {
    const std::string rest = filename.substr(kPackage.size());
    candidates.push_back(asset_root / rest);
    // Also try without the package name, for flat asset directories.
    if (const auto slash = rest.find('/'); slash != std::string::npos) {
      candidates.push_back(asset_root / rest.substr(slash + 1));
    }
  } else if (filename.rfind(kFile, 0) == 0) {
    candidates.emplace_back(filename.substr(kFile.size()));
  } else {
    const std::filesystem::path p(filename);
    candidates.push_back(p.is_absolute() ? p : asset_root / p);
  }
  for (const auto& c : candidates) {
    if (std::filesystem::is_regular_file(c)) return c;
  }
  throw Error(ErrorCode::kMissingMeshFile,
              "mesh '" + filename + "' not found under '" + asset_root.string() + "'");
}

Visual ParseVisual(const pt::ptree& node, const std::string& link,
                   const std::filesystem::path& asset_root) {
  Visual vis;
  vis.origin = Origin(node, "link '" + link + "' visual");
  const auto geometry = node.get_child_optional("geometry");
  if (!geometry) throw Error(ErrorCode::kMalformedXml, "visual without geometry in '" + link + "'");
  for (const auto& [kind, g] : *geometry) {
    if (kind == "<xmlattr>" || kind == "<xmlcomment>") continue;
    if (kind == "box") {
      vis.mesh = MakeBox(Vec3Attr(g, "size", Eigen::Vector3d::Zero(), "box size"));
    } else if (kind == "cylinder") {
      vis.mesh = MakeCylinder(DoubleAttr(g, "radius", 0.0, "cylinder radius"),
                              DoubleAttr(g, "length", 0.0, "cylinder length"));
    } else if (kind == "sphere") {
      vis.mesh = MakeSphere(DoubleAttr(g, "radius", 0.0, "sphere radius"));
    } else if (kind == "mesh") {
      vis.mesh = LoadMesh(ResolveMesh(Attr(g, "filename"), asset_root));
      vis.mesh.Scale(Vec3Attr(g, "scale", Eigen::Vector3d::Ones(), "mesh scale"));
    } else {
      throw Error(ErrorCode::kMalformedXml, "unknown geometry '" + kind + "' in '" + link + "'");
    }
    return vis;
  }
  throw Error(ErrorCode::kMalformedXml, "empty geometry in '" + link + "'");
}

JointSpec ParseJoint(const pt::ptree& node) {
  JointSpec j;
  j.name = Attr(node, "name");
  if (j.name.empty()) throw Error(ErrorCode::kMalformedXml, "joint without a name");
  const std::string type = Attr(node, "type");
  double lower = 0.0, upper = 0.0;
  if (const auto limit = node.get_child_optional("limit")) {
    lower = DoubleAttr(*limit, "lower", 0.0, "joint limit");
    upper = DoubleAttr(*limit, "upper", 0.0, "joint limit");
  }
  if (type == "revolute") {
    j.type = JointType::kRevolute;
  } else if (type == "continuous") {
    j.type = JointType::kRevolute;
    lower = -2.0 * std::numbers::pi;
    upper = 2.0 * std::numbers::pi;
  } else if (type == "prismatic") {
    j.type = JointType::kPrismatic;
  } else if (type == "fixed") {
    j.type = JointType::kFixed;
  } else {
    throw Error(ErrorCode::kUnsupportedJointType,
                "joint '" + j.name + "' has unsupported type '" + type + "'");
  }
  j.lower = lower;
  j.upper = upper;
  j.parent_link = node.get<std::string>("parent.<xmlattr>.link", "");
  j.child_link = node.get<std::string>("child.<xmlattr>.link", "");
  if (j.parent_link.empty() || j.child_link.empty()) {
    throw Error(ErrorCode::kMalformedXml, "joint '" + j.name + "' needs parent and child");
  }
  j.origin = Origin(node, "joint '" + j.name + "'");
  if (const auto axis = node.get_child_optional("axis")) {
    j.axis = Vec3Attr(*axis, "xyz", Eigen::Vector3d::UnitX(), "joint axis");
  }
  return j;
}

}  // namespace

RobotModel ParseUrdf(const std::string& xml, const std::filesystem::path& asset_root,
                     std::vector<std::string>* warnings) {
  pt::ptree doc;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kMalformedXml, e.what());
  }
  const auto robot = doc.get_child_optional("robot");
  if (!robot) throw Error(ErrorCode::kMalformedXml, "no <robot> element");

  auto warn = [warnings](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };

  RobotModel model;
  model.name = Attr(*robot, "name");
  try {
    for (const auto& [tag, node] : *robot) {
      if (tag == "link") {
        Link link;
        link.name = Attr(node, "name");
        if (link.name.empty()) throw Error(ErrorCode::kMalformedXml, "link without a name");
        for (const auto& [child_tag, child] : node) {
          if (child_tag == "visual") {
            link.visuals.push_back(ParseVisual(child, link.name, asset_root));
          } else if (child_tag == "collision") {
            warn("ignored <collision> in link '" + link.name + "'");
          }
        }
        model.links.push_back(std::move(link));
      } else if (tag == "joint") {
        model.joints.push_back(ParseJoint(node));
      } else if (tag == "transmission" || tag == "sensor" || tag == "gazebo") {
        warn("ignored <" + tag + ">");
      }
    }
  } catch (const pt::ptree_error& e) {
    throw Error(ErrorCode::kMalformedXml, e.what());
  }
  model.Finalize();
  return model;
}

RobotModel LoadUrdf(const std::filesystem::path& path, const std::filesystem::path& asset_root,
                    std::vector<std::string>* warnings) {
  const std::filesystem::path root = asset_root.empty() ? path.parent_path() : asset_root;
  return ParseUrdf(ReadTextFile(path), root, warnings);
}

namespace {

std::string Triple(const Eigen::Vector3d& v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", v.x(), v.y(), v.z());
  return buf;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string OriginXml(const Transform& t) {
  return "<origin xyz=\"" + Triple(t.translation()) + "\" rpy=\"" + Triple(t.Rpy()) + "\"/>";
}

}  // namespace

std::filesystem::path WriteUrdf(const RobotModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "meshes");
  std::ostringstream x;
  x << "<?xml version=\"1.0\"?>\n<robot name=\"" << model.name << "\">\n";
  for (std::size_t li = 0; li < model.links.size(); ++li) {
    const Link& link = model.links[li];
    x << "  <link name=\"" << link.name << "\">\n";
    for (std::size_t vi = 0; vi < link.visuals.size(); ++vi) {
      const std::string file = "meshes/link" + std::to_string(li) + "_" + std::to_string(vi) + ".obj";
      WriteTextFile(dir / file, WriteObj(link.visuals[vi].mesh));
      x << "    <visual>\n      " << OriginXml(link.visuals[vi].origin) << "\n"
        << "      <geometry><mesh filename=\"" << file << "\"/></geometry>\n    </visual>\n";
    }
    x << "  </link>\n";
  }
  for (const JointSpec& j : model.joints) {
    const char* type = j.type == JointType::kRevolute    ? "revolute"
                       : j.type == JointType::kPrismatic ? "prismatic"
                                                         : "fixed";
    x << "  <joint name=\"" << j.name << "\" type=\"" << type << "\">\n"
      << "    <parent link=\"" << j.parent_link << "\"/>\n"
      << "    <child link=\"" << j.child_link << "\"/>\n"
      << "    " << OriginXml(j.origin) << "\n"
      << "    <axis xyz=\"" << Triple(j.axis) << "\"/>\n"
      << "    <limit lower=\"" << Num(j.lower) << "\" upper=\"" << Num(j.upper) << "\"/>\n"
      << "  </joint>\n";
  }
  x << "</robot>\n";
  const std::filesystem::path path =
      dir / ((model.name.empty() ? std::string("robot") : model.name) + ".urdf");
  WriteTextFile(path, x.str());
  return path;
}

}  // namespace shadowkit
