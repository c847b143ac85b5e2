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

#ifndef SHADOWKIT_COMPOSE_H_
#define SHADOWKIT_COMPOSE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "shadowkit/geometry.h"
#include "shadowkit/image.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/render.h"
#include "shadowkit/robot_model.h"

namespace shadowkit {

// kShadow: black out the active robot and overlay the virtual counterpart.
// kBlackOnly: black out the active robot only.
// kNone: leave the image untouched.
enum class EditMode { kShadow, kBlackOnly, kNone };

std::string_view EditModeName(EditMode mode);
// Accepts "shadow", "black_only", "none". Throws Error(kInvalidArgument).
EditMode ParseEditMode(std::string_view name);

struct EditConfig {
  Rgb fill{0, 0, 0};
  EditMode mode = EditMode::kShadow;
  // Meters; only used when the frame carries scene depth.
  double occlusion_tolerance = 0.01;
  // Solver settings for placing the virtual robot.
  IkParams ik;
};

// One recorded timestep. `joints` belong to the physically present robot.
struct Frame {
  Image image;
  JointState joints;
  std::optional<DepthBuffer> scene_depth;
  std::int64_t time_index = 0;
  std::string trajectory_id;
};

struct CompositeResult {
  Image edited;
  Mask active_mask;
  Mask virtual_mask;
  JointState virtual_q;
  bool ik_converged = true;
  IkResult ik;
};

// The two robots of a transfer and the camera they share. Calibrations map
// each robot's base frame into the camera frame.
struct RobotPair {
  const Embodiment* source = nullptr;
  const Embodiment* target = nullptr;
  Transform calib_source;
  Transform calib_target;
  Camera camera;
};

// Edits one frame in which `active` is physically present:
//  1. segment the active robot at frame.joints (occlusion-filtered when the
//     frame has scene depth) and fill it with cfg.fill;
//  2. for kShadow, re-express the active end-effector pose in the virtual
//     robot's base frame, solve IK from `ik_seed`, copy the aperture, render
//     the virtual robot (occlusion-filtered likewise) and fill it too.
// IK failure is reported through ik_converged; the virtual mask is still
// rendered at the solver's last iterate. Throws Error(kDimensionMismatch)
// when the image does not match the camera, and Error(kInvalidArgument) for
// kShadow with an empty virtual embodiment.
CompositeResult EditFrame(const Frame& frame, const Embodiment& active,
                          const Embodiment& virtual_robot, const Transform& calib_active,
                          const Transform& calib_virtual, const Camera& camera,
                          const EditConfig& cfg, const JointState& ik_seed);

// Train direction: the source robot is present, the target is virtual.
CompositeResult EditTrain(const Frame& frame, const RobotPair& robots, const EditConfig& cfg,
                          const JointState& ik_seed);
// Eval direction: the target robot is present, the source is virtual.
CompositeResult EditEval(const Frame& frame, const RobotPair& robots, const EditConfig& cfg,
                         const JointState& ik_seed);

// Renders a robot mask, filtered against scene depth when present.
Mask RenderFilteredMask(const Embodiment& e, const JointState& q, const Camera& camera,
                        const Transform& extrinsics, const std::optional<DepthBuffer>& scene_depth,
                        double occlusion_tolerance);

}  // namespace shadowkit

#endif  // SHADOWKIT_COMPOSE_H_
