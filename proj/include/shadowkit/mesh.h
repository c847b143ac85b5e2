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

#ifndef SHADOWKIT_MESH_H_
#define SHADOWKIT_MESH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "shadowkit/geometry.h"

namespace shadowkit {

// Indexed triangle soup in meters.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }
  // Throws Error(kBadFaceIndex) on an out-of-range index and
  // Error(kInvalidArgument) on a non-finite coordinate.
  void Validate() const;
  // Appends `other` with its vertices mapped through `pose`.
  void Append(const TriangleMesh& other, const Transform& pose = Transform());
  void Scale(const Eigen::Vector3d& factors);
};

// Binary or ASCII STL. Vertices with bit-identical positions are merged.
// Throws Error(kTruncatedFile) when the data ends early or is unreadable.
TriangleMesh ParseStl(std::string_view bytes);

// Wavefront OBJ; only `v` and `f` statements are read. Polygons are
// triangulated as a fan around their first vertex, which preserves winding.
// Throws Error(kBadFaceIndex) for indices that do not name a vertex.
TriangleMesh ParseObj(std::string_view text);

// Dispatches on extension (.stl / .obj, case-insensitive). Throws
// Error(kMissingMeshFile) when the file is absent.
TriangleMesh LoadMesh(const std::filesystem::path& path);

// OBJ text with round-trip precision.
std::string WriteObj(const TriangleMesh& mesh);

// Primitives centered at the origin. Cylinder axis is z.
inline constexpr int kPrimitiveSegments = 32;
TriangleMesh MakeBox(const Eigen::Vector3d& size);
TriangleMesh MakeCylinder(double radius, double length, int segments = kPrimitiveSegments);
TriangleMesh MakeSphere(double radius, int segments = kPrimitiveSegments);

}  // namespace shadowkit

#endif  // SHADOWKIT_MESH_H_
