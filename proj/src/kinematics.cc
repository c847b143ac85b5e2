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

#include "shadowkit/kinematics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "shadowkit/error.h"

namespace shadowkit {

void CheckJointState(const Embodiment& e, const JointState& q) {
  if (static_cast<int>(q.values.size()) != e.dof()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "joint state has " + std::to_string(q.values.size()) + " values, embodiment '" +
                    e.name() + "' has " + std::to_string(e.dof()) + " actuated joints");
  }
  for (int i = 0; i < e.dof(); ++i) {
    const double v = q.values[i];
    if (!std::isfinite(v) || v < e.lower(i) - kJointLimitSlack ||
        v > e.upper(i) + kJointLimitSlack) {
      throw Error(ErrorCode::kJointOutOfRange,
                  "joint '" + e.actuated_joint_names()[i] + "' = " + std::to_string(v) +
                      " outside [" + std::to_string(e.lower(i)) + ", " +
                      std::to_string(e.upper(i)) + "]");
    }
  }
  if (!(q.aperture >= 0.0 && q.aperture <= 1.0)) {
    throw Error(ErrorCode::kJointOutOfRange, "aperture must be in [0, 1]");
  }
}

JointState ClampToLimits(const Embodiment& e, const JointState& q) {
  JointState out = q;
  out.values.resize(e.dof(), 0.0);
  for (int i = 0; i < e.dof(); ++i) {
    double v = out.values[i];
    if (std::isnan(v)) v = 0.5 * (e.lower(i) + e.upper(i));
    out.values[i] = std::clamp(v, e.lower(i), e.upper(i));
  }
  out.aperture = std::isnan(out.aperture) ? 0.0 : std::clamp(out.aperture, 0.0, 1.0);
  return out;
}

JointState MidRange(const Embodiment& e) {
  JointState q;
  q.values.resize(e.dof());
  for (int i = 0; i < e.dof(); ++i) q.values[i] = 0.5 * (e.lower(i) + e.upper(i));
  return q;
}

namespace {

// Relative drop in squared error that counts as progress.
constexpr double kIkProgress = 0.5;
// A restart descends from the lowest-error of this many random draws.
constexpr int kRestartCandidates = 32;
// Damping adapts between these multiples of IkParams::damping: it shrinks
// after a step that lowers the error and grows after one that does not.
constexpr double kMinDampingRatio = 0.01;
constexpr double kMaxDampingRatio = 100.0;
constexpr double kDampingDecrease = 0.5;
constexpr double kDampingIncrease = 4.0;

struct JointFrame {
  Eigen::Vector3d axis;      // base frame
  Eigen::Vector3d position;  // base frame
  bool prismatic = false;
};

// Link poses plus, for actuated joints, the joint axis and origin in the
// base frame.
FkResult Traverse(const Embodiment& e, const JointState& q, std::vector<JointFrame>* frames) {
  const RobotModel& m = e.model();
  FkResult out;
  out.link_poses.assign(m.links.size(), Transform());
  if (frames) frames->assign(e.dof(), JointFrame{});
  for (const Embodiment::JointSlot& s : e.traversal()) {
    const JointSpec& js = m.joints[s.joint];
    const Transform joint_frame = out.link_poses[s.parent_link] * js.origin;
    double value = 0.0;
    if (s.actuated >= 0) {
      value = q.values[s.actuated];
    } else if (s.finger >= 0) {
      value = js.lower + q.aperture * (js.upper - js.lower);
    }
    Transform motion;
    if (js.type == JointType::kRevolute) {
      motion = Transform::FromAxisAngle(js.axis, value);
    } else if (js.type == JointType::kPrismatic) {
      motion = Transform::FromTranslation(js.axis * value);
    }
    out.link_poses[s.child_link] = joint_frame * motion;
    if (frames && s.actuated >= 0) {
      (*frames)[s.actuated] = {joint_frame.RotateVector(js.axis), joint_frame.translation(),
                               js.type == JointType::kPrismatic};
    }
  }
  if (!e.empty()) out.flange = out.link_poses[e.flange_index()];
  out.ee = out.flange * e.mount() * e.tcp();
  return out;
}

Jacobian6 JacobianFrom(const Embodiment& e, const std::vector<JointFrame>& frames,
                       const Eigen::Vector3d& p_ee) {
  Jacobian6 j = Jacobian6::Zero(6, e.dof());
  for (int i : e.flange_chain()) {
    const JointFrame& f = frames[i];
    if (f.prismatic) {
      j.block<3, 1>(0, i) = f.axis;
    } else {
      j.block<3, 1>(0, i) = f.axis.cross(p_ee - f.position);
      j.block<3, 1>(3, i) = f.axis;
    }
  }
  return j;
}

}  // namespace

FkResult ForwardKinematics(const Embodiment& e, const JointState& q) {
  CheckJointState(e, q);
  return Traverse(e, q, nullptr);
}

Jacobian6 ComputeJacobian(const Embodiment& e, const JointState& q) {
  CheckJointState(e, q);
  std::vector<JointFrame> frames;
  const FkResult fk = Traverse(e, q, &frames);
  return JacobianFrom(e, frames, fk.ee.translation());
}

void IkParams::Validate() const {
  if (!(damping > 0.0) || !(tol_pos > 0.0) || !(tol_rot > 0.0) || max_iters < 1 ||
      !(step_scale > 0.0) || max_restarts < 0 || stall_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid IK parameters");
  }
}

IkResult SolveIk(const Embodiment& e, const Transform& target, const JointState& seed,
                 const IkParams& params) {
  params.Validate();
  CheckJointState(e, seed);
  const int n = e.dof();
  std::mt19937_64 rng(params.restart_seed);

  struct Eval {
    Eigen::Matrix<double, 6, 1> err;
    double pos, rot, cost;
    Eigen::Vector3d ee;
  };
  std::vector<JointFrame> frames;
  auto evaluate = [&](const JointState& q) {
    const FkResult fk = Traverse(e, q, &frames);
    Eval v;
    v.err.head<3>() = target.translation() - fk.ee.translation();
    v.err.tail<3>() = QuaternionToRotationVector(target.rotation() * fk.ee.rotation().conjugate());
    v.pos = v.err.head<3>().norm();
    v.rot = v.err.tail<3>().norm();
    v.cost = v.err.squaredNorm();
    v.ee = fk.ee.translation();
    return v;
  };

  IkResult best;
  best.q = seed;
  double best_cost = std::numeric_limits<double>::infinity();
  JointState q = seed;
  Eval cur = evaluate(q);
  Jacobian6 j = JacobianFrom(e, frames, cur.ee);
  double lambda = params.damping;
  double attempt_best = cur.cost;
  int since_progress = 0, restarts = 0;
  for (int iter = 0;; ++iter) {
    if (cur.cost < best_cost) {
      best_cost = cur.cost;
      best.q = q;
      best.residual_pos = cur.pos;
      best.residual_rot = cur.rot;
    }
    best.iters = iter;
    if (cur.pos < params.tol_pos && cur.rot < params.tol_rot) {
      best.converged = true;
      return best;
    }
    if (iter == params.max_iters || n == 0) return best;

    JointState next = q;
    if (since_progress >= params.stall_iters && restarts < params.max_restarts) {
      // A stalled descent restarts from a seeded draw inside the limits.
      ++restarts;
      double screen_best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < kRestartCandidates; ++c) {
        for (int i = 0; i < n; ++i) {
          next.values[i] = std::uniform_real_distribution<double>(e.lower(i), e.upper(i))(rng);
        }
        const Eval v = evaluate(next);
        if (v.cost < screen_best) {
          screen_best = v.cost;
          q = next;
        }
      }
      cur = evaluate(q);
      j = JacobianFrom(e, frames, cur.ee);
      lambda = params.damping;
      attempt_best = cur.cost;
      since_progress = 0;
      continue;
    }
    Eigen::Matrix<double, 6, 6> a = j * j.transpose();
    a.diagonal().array() += lambda * lambda;
    const Eigen::VectorXd dq = params.step_scale * (j.transpose() * a.ldlt().solve(cur.err));
    for (int i = 0; i < n; ++i) {
      next.values[i] = std::clamp(q.values[i] + dq[i], e.lower(i), e.upper(i));
    }
    const Eval trial = evaluate(next);
    if (trial.cost < cur.cost) {
      q = next;
      cur = trial;
      j = JacobianFrom(e, frames, cur.ee);
      lambda = std::max(lambda * kDampingDecrease, params.damping * kMinDampingRatio);
    } else {
      lambda = std::min(lambda * kDampingIncrease, params.damping * kMaxDampingRatio);
    }
    if (cur.cost < attempt_best * (1.0 - kIkProgress)) {
      attempt_best = cur.cost;
      since_progress = 0;
    } else {
      ++since_progress;
    }
  }
}

Transform ReexpressEe(const Transform& ee_in_source_base, const Transform& calib_src,
                      const Transform& calib_tgt) {
  return calib_tgt.Inverse() * calib_src * ee_in_source_base;
}

}  // namespace shadowkit
