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

#ifndef SHADOWKIT_ROBOT_MODEL_H_
#define SHADOWKIT_ROBOT_MODEL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "shadowkit/geometry.h"
#include "shadowkit/mesh.h"

namespace shadowkit {

enum class JointType { kRevolute, kPrismatic, kFixed };

struct JointSpec {
  std::string name;
  JointType type = JointType::kFixed;
  std::string parent_link;
  std::string child_link;
  // Pose of the joint frame in the parent link frame at zero displacement.
  Transform origin;
  // Unit axis in the joint frame; ignored for fixed joints.
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  double lower = 0.0;  // radians or meters
  double upper = 0.0;
};

struct Visual {
  TriangleMesh mesh;
  Transform origin;  // mesh frame in the link frame
};

struct Link {
  std::string name;
  std::vector<Visual> visuals;
};

// Kinematic tree of links connected by joints. Construct with Finalize(),
// which validates the tree and fills `root_link`.
struct RobotModel {
  std::string name;
  std::vector<Link> links;
  std::vector<JointSpec> joints;
  std::string root_link;

  bool empty() const { return links.empty(); }
  std::optional<int> LinkIndex(const std::string& link) const;
  std::optional<int> JointIndex(const std::string& joint) const;
  std::size_t TriangleCount() const;

  // Checks names, axes and limits and that links and joints form a single
  // tree; sets root_link. Throws Error(kCyclicKinematics) for cycles or
  // links with several parents and Error(kMalformedXml) for dangling
  // references or disconnected links.
  void Finalize();
};

// An arm with an (optionally empty) gripper attached at its flange. The
// end-effector control point is flange * mount * tcp.
//
// The combined tree holds the arm links under their own names and the
// gripper links under their own names, or prefixed with "gripper/" when a
// name collides with an arm name. The mount becomes a fixed joint named
// "gripper_mount".
class Embodiment {
 public:
  Embodiment() = default;

  const RobotModel& model() const { return model_; }
  const std::string& name() const { return model_.name; }
  const std::string& flange_link() const { return flange_link_; }
  const Transform& mount() const { return mount_; }
  const Transform& tcp() const { return tcp_; }
  // Ordered names defining the joint vector q.
  const std::vector<std::string>& actuated_joint_names() const { return actuated_; }
  // Gripper joints driven by the normalized aperture.
  const std::vector<std::string>& finger_joint_names() const { return fingers_; }
  int dof() const { return static_cast<int>(actuated_.size()); }
  bool empty() const { return model_.empty(); }

  // Limits of actuated joint i.
  double lower(int i) const { return lower_[i]; }
  double upper(int i) const { return upper_[i]; }

  // Precomputed traversal used by kinematics. Joints appear parent-first.
  struct JointSlot {
    int joint;            // index into model().joints
    int parent_link;      // index into model().links
    int child_link;
    int actuated = -1;    // index into q, or -1
    int finger = -1;      // index into finger_joint_names, or -1
  };
  const std::vector<JointSlot>& traversal() const { return traversal_; }
  int flange_index() const { return flange_index_; }
  int root_index() const { return root_index_; }
  // Actuated indices of the joints between the root and the flange.
  const std::vector<int>& flange_chain() const { return flange_chain_; }
  // traversal() position of each actuated joint.
  const std::vector<int>& actuated_slots() const { return actuated_slots_; }

 private:
  friend Embodiment AttachGripper(const RobotModel&, const RobotModel&, const Transform&,
                                  const Transform&, const std::string&);

  RobotModel model_;
  std::string flange_link_;
  Transform mount_;
  Transform tcp_;
  std::vector<std::string> actuated_;
  std::vector<std::string> fingers_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<JointSlot> traversal_;
  std::vector<int> actuated_slots_;
  std::vector<int> flange_chain_;
  int flange_index_ = -1;
  int root_index_ = -1;
};

// Combines an arm and a gripper into one embodiment. `flange` names the arm
// link the gripper mounts on; when empty the deepest leaf of the arm
// (most actuated joints from the root, first in link order on ties) is used.
// An empty gripper model leaves the arm unchanged.
Embodiment AttachGripper(const RobotModel& arm, const RobotModel& gripper,
                         const Transform& mount, const Transform& tcp,
                         const std::string& flange = "");

inline Embodiment MakeEmbodiment(const RobotModel& arm, const Transform& tcp = Transform(),
                                 const std::string& flange = "") {
  return AttachGripper(arm, RobotModel{}, Transform(), tcp, flange);
}

}  // namespace shadowkit

#endif  // SHADOWKIT_ROBOT_MODEL_H_
