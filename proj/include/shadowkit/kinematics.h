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

#ifndef SHADOWKIT_KINEMATICS_H_
#define SHADOWKIT_KINEMATICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shadowkit/geometry.h"
#include "shadowkit/robot_model.h"

namespace shadowkit {

// Joint positions aligned with Embodiment::actuated_joint_names() plus a
// normalized gripper opening in [0, 1].
struct JointState {
  std::vector<double> values;
  double aperture = 0.0;

  bool operator==(const JointState&) const = default;
};

// Slack allowed on joint limits before a state counts as out of range.
inline constexpr double kJointLimitSlack = 1e-9;

// Throws Error(kDimensionMismatch) for a wrong vector length and
// Error(kJointOutOfRange) for values outside the limits (or non-finite).
void CheckJointState(const Embodiment& e, const JointState& q);
JointState ClampToLimits(const Embodiment& e, const JointState& q);
// Middle of every actuated joint range; aperture 0.
JointState MidRange(const Embodiment& e);

struct FkResult {
  std::vector<Transform> link_poses;  // indexed like model().links, base frame
  Transform flange;
  Transform ee;
};

FkResult ForwardKinematics(const Embodiment& e, const JointState& q);

using Jacobian6 = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Geometric Jacobian of the end-effector control point: rows are linear
// velocity (m/rad or m/m) then angular velocity, columns follow q.
Jacobian6 ComputeJacobian(const Embodiment& e, const JointState& q);

struct IkParams {
  double damping = 0.05;   // lambda
  double tol_pos = 1e-4;   // meters
  double tol_rot = 1e-3;   // radians
  int max_iters = 200;
  double step_scale = 0.5;
  // When the squared error has not halved within stall_iters iterations,
  // the solver restarts from the best of several joint states drawn
  // uniformly within the limits, at most max_restarts times. Draws come
  // from restart_seed, so results stay deterministic. Restarts share the
  // max_iters budget.
  int max_restarts = 50;
  int stall_iters = 4;
  std::uint64_t restart_seed = 0;

  void Validate() const;
};

struct IkResult {
  JointState q;
  bool converged = false;
  int iters = 0;
  double residual_pos = 0.0;
  double residual_rot = 0.0;
};

// Damped least squares: q <- clamp(q + step_scale * J^T (J J^T + lambda^2 I)^-1 err)
// where err stacks the position difference and the rotation vector of
// R_target * R(q)^-1. A step is kept only if it lowers |err|; lambda
// shrinks after kept steps and grows after rejected ones, within
// [0.01, 100] x damping. Stops once both residuals are under tolerance.
// Non-convergence is reported, not thrown, with the lowest-error iterate.
// The aperture is carried over from the seed.
IkResult SolveIk(const Embodiment& e, const Transform& target, const JointState& seed,
                 const IkParams& params = {});

// Expresses a pose given in the source base frame in the target base frame
// through the shared camera: inv(calib_tgt) * calib_src * ee.
Transform ReexpressEe(const Transform& ee_in_source_base, const Transform& calib_src,
                      const Transform& calib_tgt);

}  // namespace shadowkit

#endif  // SHADOWKIT_KINEMATICS_H_
