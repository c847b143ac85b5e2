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

#include "shadowkit/render.h"

#include <algorithm>
#include <cmath>

#include "shadowkit/error.h"

namespace shadowkit {

std::size_t Mask::Count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

Mask Mask::Union(const Mask& other) const {
  if (width != other.width || height != other.height) {
    throw Error(ErrorCode::kDimensionMismatch, "mask sizes differ");
  }
  Mask out = *this;
  for (std::size_t i = 0; i < bits.size(); ++i) out.bits[i] |= other.bits[i];
  return out;
}

bool Mask::IsSubsetOf(const Mask& other) const {
  if (width != other.width || height != other.height) return false;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] && !other.bits[i]) return false;
  }
  return true;
}

Rasterizer::Rasterizer(const Camera& camera)
    : camera_(camera),
      mask_(camera.width(), camera.height()),
      depth_(camera.width(), camera.height()),
      labels_(static_cast<std::size_t>(camera.width()) * camera.height(), -1) {
  camera.intrinsics.Validate();
}

void Rasterizer::Draw(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      const Eigen::Vector3d& c, std::int32_t label) {
  if (a.z() >= kNearPlane && b.z() >= kNearPlane && c.z() >= kNearPlane) {
    DrawClipped({a, b, c}, label);
    return;
  }
  // Sutherland-Hodgman against z >= near; a triangle yields at most a quad.
  const Eigen::Vector3d in[3] = {a, b, c};
  Eigen::Vector3d poly[4];
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& p = in[i];
    const Eigen::Vector3d& q = in[(i + 1) % 3];
    const bool p_in = p.z() >= kNearPlane;
    const bool q_in = q.z() >= kNearPlane;
    if (p_in) poly[n++] = p;
    if (p_in != q_in) {
      const double t = (kNearPlane - p.z()) / (q.z() - p.z());
      Eigen::Vector3d x = p + t * (q - p);
      x.z() = kNearPlane;
      poly[n++] = x;
    }
  }
  for (int i = 1; i + 1 < n; ++i) DrawClipped({poly[0], poly[i], poly[i + 1]}, label);
}

namespace {

struct ScreenVertex {
  double u, v, w;
};

inline double EdgeFunction(const ScreenVertex& p0, const ScreenVertex& p1, double x, double y) {
  return (p1.u - p0.u) * (y - p0.v) - (p1.v - p0.v) * (x - p0.u);
}

// With the interior on the positive side and v pointing down, an edge is a
// left edge when it runs upward and a top edge when it is horizontal and
// runs in +u.
inline bool OwnsBoundary(const ScreenVertex& p0, const ScreenVertex& p1) {
  const double du = p1.u - p0.u;
  const double dv = p1.v - p0.v;
  return dv < 0.0 || (dv == 0.0 && du > 0.0);
}

inline bool Inside(double e, bool owns) { return e > 0.0 || (e == 0.0 && owns); }

int ClampToInt(double v, int lo, int hi) {
  if (!(v >= lo)) return lo;  // also catches NaN
  if (v > hi) return hi;
  return static_cast<int>(v);
}

}  // namespace

void Rasterizer::DrawClipped(const std::array<Eigen::Vector3d, 3>& tri, std::int32_t label) {
  const bool perspective = camera_.projection == Projection::kPinhole;
  const CameraIntrinsics& k = camera_.intrinsics;
  ScreenVertex s[3];
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d& p = tri[i];
    if (perspective) {
      s[i] = {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy, 1.0 / p.z()};
    } else {
      s[i] = {k.fx * p.x() + k.cx, k.fy * p.y() + k.cy, p.z()};
    }
  }
  double area = EdgeFunction(s[0], s[1], s[2].u, s[2].v);
  if (area == 0.0 || !std::isfinite(area)) return;
  if (area < 0.0) {
    std::swap(s[1], s[2]);
    area = -area;
  }
  const bool own12 = OwnsBoundary(s[1], s[2]);
  const bool own20 = OwnsBoundary(s[2], s[0]);
  const bool own01 = OwnsBoundary(s[0], s[1]);

  const double umin = std::min({s[0].u, s[1].u, s[2].u});
  const double umax = std::max({s[0].u, s[1].u, s[2].u});
  const double vmin = std::min({s[0].v, s[1].v, s[2].v});
  const double vmax = std::max({s[0].v, s[1].v, s[2].v});
  const int w = k.width, h = k.height;
  const int x0 = ClampToInt(std::ceil(umin - 0.5), 0, w);
  const int x1 = ClampToInt(std::floor(umax - 0.5), -1, w - 1);
  const int y0 = ClampToInt(std::ceil(vmin - 0.5), 0, h);
  const int y1 = ClampToInt(std::floor(vmax - 0.5), -1, h - 1);

  const double inv_area = 1.0 / area;
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double px = x + 0.5;
      const double e0 = EdgeFunction(s[1], s[2], px, py);
      if (!Inside(e0, own12)) continue;
      const double e1 = EdgeFunction(s[2], s[0], px, py);
      if (!Inside(e1, own20)) continue;
      const double e2 = EdgeFunction(s[0], s[1], px, py);
      if (!Inside(e2, own01)) continue;
      const double wv = (e0 * s[0].w + e1 * s[1].w + e2 * s[2].w) * inv_area;
      const double z = perspective ? 1.0 / wv : wv;
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (z < depth_.values[idx]) {
        depth_.values[idx] = z;
        mask_.bits[idx] = 1;
        labels_[idx] = label;
      }
    }
  }
}

RenderResult RenderRobot(const Embodiment& e, const JointState& q, const Camera& camera,
                         const Transform& extrinsics, std::vector<std::int32_t>* link_labels) {
  Rasterizer raster(camera);
  if (!e.empty()) {
    const FkResult fk = ForwardKinematics(e, q);
    const RobotModel& model = e.model();
    std::vector<Eigen::Vector3d> cam_vertices;
    for (std::size_t li = 0; li < model.links.size(); ++li) {
      for (const Visual& vis : model.links[li].visuals) {
        const Transform to_cam = extrinsics * fk.link_poses[li] * vis.origin;
        const Eigen::Matrix3d r = to_cam.RotationMatrix();
        const Eigen::Vector3d t = to_cam.translation();
        cam_vertices.resize(vis.mesh.vertices.size());
        for (std::size_t i = 0; i < cam_vertices.size(); ++i) {
          cam_vertices[i] = r * vis.mesh.vertices[i] + t;
        }
        for (const auto& tri : vis.mesh.triangles) {
          raster.Draw(cam_vertices[tri[0]], cam_vertices[tri[1]], cam_vertices[tri[2]],
                      static_cast<std::int32_t>(li));
        }
      }
    }
  } else {
    CheckJointState(e, q);
  }
  if (link_labels) *link_labels = raster.labels();
  return {raster.TakeMask(), raster.TakeDepth()};
}

Mask SegmentRobot(const JointState& q, const Embodiment& e, const Camera& camera,
                  const Transform& extrinsics) {
  return RenderRobot(e, q, camera, extrinsics).mask;
}

Mask OcclusionFilter(const Mask& robot_mask, const DepthBuffer& robot_depth,
                     const DepthBuffer& scene_depth, double tolerance) {
  if (robot_mask.width != robot_depth.width || robot_mask.height != robot_depth.height ||
      robot_mask.width != scene_depth.width || robot_mask.height != scene_depth.height) {
    throw Error(ErrorCode::kDimensionMismatch, "occlusion filter inputs differ in size");
  }
  Mask out = robot_mask;
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    if (out.bits[i] && !(robot_depth.values[i] < scene_depth.values[i] + tolerance)) {
      out.bits[i] = 0;
    }
  }
  return out;
}

Mask DownsampleAny(const Mask& mask) {
  if (mask.width % 2 || mask.height % 2) {
    throw Error(ErrorCode::kDimensionMismatch, "downsampling needs even dimensions");
  }
  Mask out(mask.width / 2, mask.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.set(x, y, mask.at(2 * x, 2 * y) || mask.at(2 * x + 1, 2 * y) ||
                        mask.at(2 * x, 2 * y + 1) || mask.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

}  // namespace shadowkit
