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

#include "shadowkit/mesh.h"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <numbers>

#include "shadowkit/error.h"
#include "shadowkit/json_io.h"

namespace shadowkit {

void TriangleMesh::Validate() const {
  for (const Eigen::Vector3d& v : vertices) {
    if (!v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "mesh vertex is not finite");
    }
  }
  for (const auto& tri : triangles) {
    for (std::uint32_t i : tri) {
      if (i >= vertices.size()) {
        throw Error(ErrorCode::kBadFaceIndex, "triangle index " + std::to_string(i) +
                                                  " >= vertex count " +
                                                  std::to_string(vertices.size()));
      }
    }
  }
}

void TriangleMesh::Append(const TriangleMesh& other, const Transform& pose) {
  const auto offset = static_cast<std::uint32_t>(vertices.size());
  vertices.reserve(vertices.size() + other.vertices.size());
  for (const Eigen::Vector3d& v : other.vertices) vertices.push_back(pose * v);
  triangles.reserve(triangles.size() + other.triangles.size());
  for (const auto& t : other.triangles) {
    triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
  }
}

void TriangleMesh::Scale(const Eigen::Vector3d& factors) {
  for (Eigen::Vector3d& v : vertices) v = v.cwiseProduct(factors);
}

namespace {

struct VecLess {
  bool operator()(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
  }
};

// Builds an indexed mesh from a soup, merging identical positions.
class Welder {
 public:
  void AddTriangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                   const Eigen::Vector3d& c) {
    mesh_.triangles.push_back({Index(a), Index(b), Index(c)});
  }
  TriangleMesh Take() { return std::move(mesh_); }

 private:
  std::uint32_t Index(const Eigen::Vector3d& v) {
    if (!v.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "mesh vertex is not finite");
    }
    auto [it, inserted] =
        index_.try_emplace(v, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(v);
    return it->second;
  }

  std::map<Eigen::Vector3d, std::uint32_t, VecLess> index_;
  TriangleMesh mesh_;
};

constexpr std::size_t kStlHeader = 80;
constexpr std::size_t kStlRecord = 50;

std::uint32_t ReadU32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);  // STL is little-endian, as is every supported host.
  return v;
}

float ReadF32(const char* p) {
  float v;
  std::memcpy(&v, p, 4);
  return v;
}

TriangleMesh ParseBinaryStl(std::string_view bytes, std::uint32_t count) {
  Welder welder;
  const char* p = bytes.data() + kStlHeader + 4;
  for (std::uint32_t i = 0; i < count; ++i, p += kStlRecord) {
    Eigen::Vector3d v[3];
    for (int k = 0; k < 3; ++k) {
      const char* q = p + 12 + 12 * k;  // skip normal
      v[k] = Eigen::Vector3d(ReadF32(q), ReadF32(q + 4), ReadF32(q + 8));
    }
    welder.AddTriangle(v[0], v[1], v[2]);
  }
  return welder.Take();
}

bool LooksLikeAsciiStl(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  return bytes.substr(i, 5) == "solid";
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  std::string_view Next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool ParseDouble(std::string_view s, double* out) {
  if (s.empty()) return false;
  // from_chars rejects a leading '+'.
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

TriangleMesh ParseAsciiStl(std::string_view text) {
  Welder welder;
  Tokenizer tok(text);
  tok.Next();  // "solid"
  Eigen::Vector3d v[3];
  int n = 0;
  bool in_facet = false;
  for (std::string_view t = tok.Next(); !t.empty(); t = tok.Next()) {
    if (t == "facet") {
      in_facet = true;
      n = 0;
    } else if (t == "vertex") {
      if (!in_facet || n >= 3) {
        throw Error(ErrorCode::kTruncatedFile, "vertex outside a facet");
      }
      for (int k = 0; k < 3; ++k) {
        if (!ParseDouble(tok.Next(), &v[n][k])) {
          throw Error(ErrorCode::kTruncatedFile, "bad vertex coordinate in ASCII STL");
        }
      }
      ++n;
    } else if (t == "endfacet") {
      if (!in_facet || n != 3) {
        throw Error(ErrorCode::kTruncatedFile, "facet without three vertices");
      }
      welder.AddTriangle(v[0], v[1], v[2]);
      in_facet = false;
    } else if (t == "endsolid") {
      if (in_facet) throw Error(ErrorCode::kTruncatedFile, "unterminated facet");
      return welder.Take();
    }
  }
  throw Error(ErrorCode::kTruncatedFile, "ASCII STL ends without 'endsolid'");
}

}  // namespace

TriangleMesh ParseStl(std::string_view bytes) {
  if (bytes.size() >= kStlHeader + 4) {
    const std::uint64_t count = ReadU32(bytes.data() + kStlHeader);
    const std::uint64_t expected = kStlHeader + 4 + kStlRecord * count;
    if (bytes.size() == expected) {
      return ParseBinaryStl(bytes, static_cast<std::uint32_t>(count));
    }
    if (!LooksLikeAsciiStl(bytes)) {
      if (bytes.size() < expected) {
        throw Error(ErrorCode::kTruncatedFile,
                    "binary STL declares " + std::to_string(count) + " triangles but holds " +
                        std::to_string((bytes.size() - kStlHeader - 4) / kStlRecord));
      }
      // Trailing bytes after the declared records are ignored.
      return ParseBinaryStl(bytes, static_cast<std::uint32_t>(count));
    }
  }
  if (LooksLikeAsciiStl(bytes)) return ParseAsciiStl(bytes);
  throw Error(ErrorCode::kTruncatedFile, "STL shorter than its 84-byte header");
}

namespace {

// Resolves one OBJ face token ("7", "7/1", "7//3", "-1/2/3") to a 0-based index.
std::uint32_t ObjIndex(std::string_view token, std::size_t vertex_count) {
  const std::string_view head = token.substr(0, token.find('/'));
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || ptr != head.data() + head.size()) {
    throw Error(ErrorCode::kBadFaceIndex, "unreadable face index '" + std::string(token) + "'");
  }
  const long long n = static_cast<long long>(vertex_count);
  const long long resolved = idx < 0 ? n + idx : idx - 1;
  if (idx == 0 || resolved < 0 || resolved >= n) {
    throw Error(ErrorCode::kBadFaceIndex, "face index " + std::to_string(idx) +
                                              " with " + std::to_string(n) + " vertices");
  }
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

TriangleMesh ParseObj(std::string_view text) {
  TriangleMesh mesh;
  std::size_t line_start = 0;
  std::vector<std::uint32_t> face;
  while (line_start < text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_start, line_end - line_start);
    line_start = line_end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    Tokenizer tok(line);
    const std::string_view kind = tok.Next();
    if (kind == "v") {
      Eigen::Vector3d v;
      for (int k = 0; k < 3; ++k) {
        if (!ParseDouble(tok.Next(), &v[k]) || !std::isfinite(v[k])) {
          throw Error(ErrorCode::kTruncatedFile, "bad vertex line in OBJ");
        }
      }
      mesh.vertices.push_back(v);
    } else if (kind == "f") {
      face.clear();
      for (std::string_view t = tok.Next(); !t.empty(); t = tok.Next()) {
        face.push_back(ObjIndex(t, mesh.vertices.size()));
      }
      if (face.size() < 3) {
        throw Error(ErrorCode::kBadFaceIndex, "face with fewer than three vertices");
      }
      for (std::size_t i = 1; i + 1 < face.size(); ++i) {
        mesh.triangles.push_back({face[0], face[i], face[i + 1]});
      }
    }
  }
  return mesh;
}

TriangleMesh LoadMesh(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kMissingMeshFile, "mesh file not found: " + path.string());
  }
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string data = ReadTextFile(path);
  if (ext == ".stl") return ParseStl(data);
  if (ext == ".obj") return ParseObj(data);
  throw Error(ErrorCode::kInvalidArgument, "unsupported mesh format: " + path.string());
}

std::string WriteObj(const TriangleMesh& mesh) {
  std::string out;
  char buf[128];
  for (const Eigen::Vector3d& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof(buf), "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

TriangleMesh MakeBox(const Eigen::Vector3d& size) {
  TriangleMesh m;
  const Eigen::Vector3d h = 0.5 * size;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // Outward-facing quads, split into two triangles each.
  const std::uint32_t quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                     {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh MakeCylinder(double radius, double length, int segments) {
  TriangleMesh m;
  const double hz = 0.5 * length;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const auto bottom = static_cast<std::uint32_t>(m.vertices.size());
  m.vertices.emplace_back(0.0, 0.0, -hz);
  m.vertices.emplace_back(0.0, 0.0, hz);
  const std::uint32_t top = bottom + 1;
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    const std::uint32_t b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    m.triangles.push_back({b0, b1, t1});
    m.triangles.push_back({b0, t1, t0});
    m.triangles.push_back({bottom, b1, b0});
    m.triangles.push_back({top, t0, t1});
  }
  return m;
}

TriangleMesh MakeSphere(double radius, int segments) {
  TriangleMesh m;
  const int rings = std::max(2, segments / 2);
  m.vertices.emplace_back(0.0, 0.0, -radius);
  for (int r = 1; r < rings; ++r) {
    const double polar = std::numbers::pi * r / rings;
    const double z = -radius * std::cos(polar);
    const double rr = radius * std::sin(polar);
    for (int s = 0; s < segments; ++s) {
      const double a = 2.0 * std::numbers::pi * s / segments;
      m.vertices.emplace_back(rr * std::cos(a), rr * std::sin(a), z);
    }
  }
  m.vertices.emplace_back(0.0, 0.0, radius);
  const auto n = static_cast<std::uint32_t>(segments);
  const auto north = static_cast<std::uint32_t>(m.vertices.size() - 1);
  auto ring = [n](int r, std::uint32_t s) { return 1 + (r - 1) * n + s % n; };
  for (std::uint32_t s = 0; s < n; ++s) {
    m.triangles.push_back({0, ring(1, s + 1), ring(1, s)});
    m.triangles.push_back({north, ring(rings - 1, s), ring(rings - 1, s + 1)});
  }
  for (int r = 1; r + 1 < rings; ++r) {
    for (std::uint32_t s = 0; s < n; ++s) {
      m.triangles.push_back({ring(r, s), ring(r, s + 1), ring(r + 1, s + 1)});
      m.triangles.push_back({ring(r, s), ring(r + 1, s + 1), ring(r + 1, s)});
    }
  }
  return m;
}

}  // namespace shadowkit
