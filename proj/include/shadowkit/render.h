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

#ifndef SHADOWKIT_RENDER_H_
#define SHADOWKIT_RENDER_H_

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "shadowkit/geometry.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/robot_model.h"

namespace shadowkit {

// Binary image, row-major, one byte (0 or 1) per pixel.
struct Mask {
  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t Count() const;
  bool empty() const { return Count() == 0; }
  // Throws Error(kDimensionMismatch) when sizes differ.
  Mask Union(const Mask& other) const;
  bool IsSubsetOf(const Mask& other) const;

  bool operator==(const Mask&) const = default;
};

// Per-pixel depth in meters along the optical axis; +inf where empty.
struct DepthBuffer {
  DepthBuffer() = default;
  DepthBuffer(int w, int h, double fill = std::numeric_limits<double>::infinity())
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  bool operator==(const DepthBuffer&) const = default;
};

inline constexpr double kNearPlane = 1e-4;

// Z-buffered rasterizer over pixel centers (x + 0.5, y + 0.5).
//
// Coverage uses the top-left fill rule, so pixels on an edge shared by two
// triangles are covered exactly once. Triangles are clipped against the
// near plane z = kNearPlane before projection. Depth is interpolated
// exactly on the triangle's plane (1/z is linear in screen space for
// pinhole cameras, z for orthographic ones). A pixel is overwritten only by
// strictly nearer geometry, so among equal depths the first triangle drawn
// wins. No backface culling.
class Rasterizer {
 public:
  explicit Rasterizer(const Camera& camera);

  // Vertices in the camera frame. `label` is recorded in labels() for
  // every pixel this triangle wins.
  void Draw(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
            std::int32_t label = 0);

  const Camera& camera() const { return camera_; }
  const Mask& mask() const { return mask_; }
  const DepthBuffer& depth() const { return depth_; }
  // -1 where nothing was drawn.
  const std::vector<std::int32_t>& labels() const { return labels_; }

  Mask TakeMask() { return std::move(mask_); }
  DepthBuffer TakeDepth() { return std::move(depth_); }

 private:
  void DrawClipped(const std::array<Eigen::Vector3d, 3>& tri, std::int32_t label);

  Camera camera_;
  Mask mask_;
  DepthBuffer depth_;
  std::vector<std::int32_t> labels_;
};

struct RenderResult {
  Mask mask;
  DepthBuffer depth;
};

// Renders every visual of `e` at `q` through a camera whose extrinsics map
// the embodiment's base frame into the camera frame. When `link_labels` is
// non-null it receives, per pixel, the index of the winning link or -1.
// Throws Error(kJointOutOfRange) for invalid q.
RenderResult RenderRobot(const Embodiment& e, const JointState& q, const Camera& camera,
                         const Transform& extrinsics,
                         std::vector<std::int32_t>* link_labels = nullptr);

// Model-based segmentation of a physically present robot at its measured
// joint state.
Mask SegmentRobot(const JointState& q, const Embodiment& e, const Camera& camera,
                  const Transform& extrinsics);

// Keeps a robot pixel iff robot_depth < scene_depth + tolerance, i.e. the
// robot is in front of (or level with) the observed scene. Throws
// Error(kDimensionMismatch) when buffer sizes differ.
Mask OcclusionFilter(const Mask& robot_mask, const DepthBuffer& robot_depth,
                     const DepthBuffer& scene_depth, double tolerance);

// 2x2 any-set reduction; width and height must be even.
Mask DownsampleAny(const Mask& mask);

}  // namespace shadowkit

#endif  // SHADOWKIT_RENDER_H_
