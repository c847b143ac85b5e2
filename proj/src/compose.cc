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

#include "shadowkit/compose.h"

#include "shadowkit/error.h"

namespace shadowkit {

std::string_view EditModeName(EditMode mode) {
  switch (mode) {
    case EditMode::kShadow: return "shadow";
    case EditMode::kBlackOnly: return "black_only";
    case EditMode::kNone: return "none";
  }
  return "none";
}

EditMode ParseEditMode(std::string_view name) {
  if (name == "shadow") return EditMode::kShadow;
  if (name == "black_only") return EditMode::kBlackOnly;
  if (name == "none") return EditMode::kNone;
  throw Error(ErrorCode::kInvalidArgument, "unknown edit mode '" + std::string(name) + "'");
}

Mask RenderFilteredMask(const Embodiment& e, const JointState& q, const Camera& camera,
                        const Transform& extrinsics, const std::optional<DepthBuffer>& scene_depth,
                        double occlusion_tolerance) {
  RenderResult r = RenderRobot(e, q, camera, extrinsics);
  if (!scene_depth) return std::move(r.mask);
  return OcclusionFilter(r.mask, r.depth, *scene_depth, occlusion_tolerance);
}

CompositeResult EditFrame(const Frame& frame, const Embodiment& active,
                          const Embodiment& virtual_robot, const Transform& calib_active,
                          const Transform& calib_virtual, const Camera& camera,
                          const EditConfig& cfg, const JointState& ik_seed) {
  if (frame.image.width != camera.width() || frame.image.height != camera.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "frame image does not match camera size");
  }
  if (frame.scene_depth && (frame.scene_depth->width != camera.width() ||
                            frame.scene_depth->height != camera.height())) {
    throw Error(ErrorCode::kDimensionMismatch, "scene depth does not match camera size");
  }
  CompositeResult out;
  out.edited = frame.image;
  out.active_mask = Mask(camera.width(), camera.height());
  out.virtual_mask = Mask(camera.width(), camera.height());
  if (cfg.mode == EditMode::kNone) return out;

  out.active_mask = RenderFilteredMask(active, frame.joints, camera, calib_active,
                                       frame.scene_depth, cfg.occlusion_tolerance);
  FillMask(out.edited, out.active_mask, cfg.fill);
  if (cfg.mode == EditMode::kBlackOnly) return out;

  if (virtual_robot.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "shadow edit needs a non-empty virtual robot");
  }
  const Transform ee_active = ForwardKinematics(active, frame.joints).ee;
  const Transform ee_virtual = ReexpressEe(ee_active, calib_active, calib_virtual);
  out.ik = SolveIk(virtual_robot, ee_virtual, ik_seed, cfg.ik);
  out.ik.q.aperture = frame.joints.aperture;
  out.ik_converged = out.ik.converged;
  out.virtual_q = out.ik.q;
  out.virtual_mask = RenderFilteredMask(virtual_robot, out.virtual_q, camera, calib_virtual,
                                        frame.scene_depth, cfg.occlusion_tolerance);
  FillMask(out.edited, out.virtual_mask, cfg.fill);
  return out;
}

CompositeResult EditTrain(const Frame& frame, const RobotPair& robots, const EditConfig& cfg,
                          const JointState& ik_seed) {
  return EditFrame(frame, *robots.source, *robots.target, robots.calib_source,
                   robots.calib_target, robots.camera, cfg, ik_seed);
}

CompositeResult EditEval(const Frame& frame, const RobotPair& robots, const EditConfig& cfg,
                         const JointState& ik_seed) {
  return EditFrame(frame, *robots.target, *robots.source, robots.calib_target,
                   robots.calib_source, robots.camera, cfg, ik_seed);
}

}  // namespace shadowkit
