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

#include "shadowkit/robot_model.h"

#include <cmath>
#include <deque>
#include <set>

#include "shadowkit/error.h"

namespace shadowkit {

std::optional<int> RobotModel::LinkIndex(const std::string& link) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].name == link) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> RobotModel::JointIndex(const std::string& joint) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].name == joint) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::size_t RobotModel::TriangleCount() const {
  std::size_t n = 0;
  for (const Link& l : links) {
    for (const Visual& v : l.visuals) n += v.mesh.triangles.size();
  }
  return n;
}

void RobotModel::Finalize() {
  root_link.clear();
  if (links.empty()) {
    if (!joints.empty()) throw Error(ErrorCode::kMalformedXml, "joints without links");
    return;
  }
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (!index.emplace(links[i].name, static_cast<int>(i)).second) {
      throw Error(ErrorCode::kMalformedXml, "duplicate link '" + links[i].name + "'");
    }
    for (const Visual& v : links[i].visuals) v.mesh.Validate();
  }
  std::set<std::string> joint_names;
  std::vector<int> parent_of(links.size(), -1);
  std::vector<std::vector<int>> children(links.size());
  for (std::size_t j = 0; j < joints.size(); ++j) {
    JointSpec& js = joints[j];
    if (!joint_names.insert(js.name).second) {
      throw Error(ErrorCode::kMalformedXml, "duplicate joint '" + js.name + "'");
    }
    auto p = index.find(js.parent_link);
    auto c = index.find(js.child_link);
    if (p == index.end() || c == index.end()) {
      throw Error(ErrorCode::kMalformedXml, "joint '" + js.name + "' references an undefined link");
    }
    if (js.type != JointType::kFixed) {
      const double n = js.axis.norm();
      if (!(n > 1e-12)) {
        throw Error(ErrorCode::kInvalidArgument, "joint '" + js.name + "' has a zero axis");
      }
      js.axis /= n;
      if (!(js.lower <= js.upper)) {
        throw Error(ErrorCode::kInvalidArgument, "joint '" + js.name + "' has lower > upper");
      }
    }
    if (parent_of[c->second] != -1 || p->second == c->second) {
      throw Error(ErrorCode::kCyclicKinematics,
                  "link '" + js.child_link + "' has more than one parent");
    }
    parent_of[c->second] = static_cast<int>(j);
    children[p->second].push_back(static_cast<int>(j));
  }
  std::vector<int> roots;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (parent_of[i] == -1) roots.push_back(static_cast<int>(i));
  }
  if (roots.empty()) {
    throw Error(ErrorCode::kCyclicKinematics, "every link has a parent; the joints form a cycle");
  }
  // Walk from the first root; anything left unreached either hangs off
  // another root or sits on a cycle.
  std::vector<bool> seen(links.size(), false);
  std::deque<int> queue{roots.front()};
  seen[roots.front()] = true;
  while (!queue.empty()) {
    const int l = queue.front();
    queue.pop_front();
    for (int j : children[l]) {
      const int c = *LinkIndex(joints[j].child_link);
      if (seen[c]) throw Error(ErrorCode::kCyclicKinematics, "cycle through '" + links[c].name + "'");
      seen[c] = true;
      queue.push_back(c);
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (seen[i]) continue;
    if (roots.size() > 1) {
      throw Error(ErrorCode::kMalformedXml, "link '" + links[i].name + "' is not connected to '" +
                                                links[roots.front()].name + "'");
    }
    throw Error(ErrorCode::kCyclicKinematics, "cycle through '" + links[i].name + "'");
  }
  root_link = links[roots.front()].name;
}

namespace {

// Parent-first joint order by breadth-first search from the root.
std::vector<int> JointOrder(const RobotModel& m) {
  std::vector<int> order;
  std::deque<std::string> queue{m.root_link};
  while (!queue.empty()) {
    const std::string link = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < m.joints.size(); ++j) {
      if (m.joints[j].parent_link == link) {
        order.push_back(static_cast<int>(j));
        queue.push_back(m.joints[j].child_link);
      }
    }
  }
  return order;
}

std::string DeepestLeaf(const RobotModel& arm) {
  std::map<std::string, int> depth{{arm.root_link, 0}};
  std::string best = arm.root_link;
  int best_depth = 0;
  std::set<std::string> has_children;
  for (const JointSpec& j : arm.joints) has_children.insert(j.parent_link);
  for (int j : JointOrder(arm)) {
    const JointSpec& js = arm.joints[j];
    const int d = depth[js.parent_link] + (js.type == JointType::kFixed ? 0 : 1);
    depth[js.child_link] = d;
  }
  // Leaves only; most actuated joints deep wins, first in link order on ties.
  for (const Link& l : arm.links) {
    if (has_children.count(l.name)) continue;
    const int d = depth[l.name];
    if (d > best_depth || best == arm.root_link) {
      best = l.name;
      best_depth = d;
    }
  }
  return best;
}

}  // namespace

Embodiment AttachGripper(const RobotModel& arm_in, const RobotModel& gripper_in,
                         const Transform& mount, const Transform& tcp,
                         const std::string& flange) {
  RobotModel arm = arm_in;
  arm.Finalize();
  Embodiment e;
  e.mount_ = mount;
  e.tcp_ = tcp;
  if (arm.empty()) {
    e.model_ = arm;
    return e;
  }
  e.flange_link_ = flange.empty() ? DeepestLeaf(arm) : flange;
  if (!arm.LinkIndex(e.flange_link_)) {
    throw Error(ErrorCode::kInvalidArgument, "flange link '" + e.flange_link_ + "' not in arm");
  }

  RobotModel combined = arm;
  std::set<std::string> arm_joint_set;
  for (const JointSpec& j : arm.joints) {
    if (j.type != JointType::kFixed) arm_joint_set.insert(j.name);
  }

  if (!gripper_in.empty()) {
    RobotModel gripper = gripper_in;
    gripper.Finalize();
    std::set<std::string> names;
    for (const Link& l : arm.links) names.insert(l.name);
    for (const JointSpec& j : arm.joints) names.insert(j.name);
    names.insert("gripper_mount");
    auto rename = [&names](const std::string& n) {
      return names.count(n) ? "gripper/" + n : n;
    };
    for (Link l : gripper.links) {
      l.name = rename(l.name);
      combined.links.push_back(std::move(l));
    }
    for (JointSpec j : gripper.joints) {
      j.name = rename(j.name);
      j.parent_link = rename(j.parent_link);
      j.child_link = rename(j.child_link);
      if (j.type != JointType::kFixed) e.fingers_.push_back(j.name);
      combined.joints.push_back(std::move(j));
    }
    JointSpec m;
    m.name = "gripper_mount";
    m.type = JointType::kFixed;
    m.parent_link = e.flange_link_;
    m.child_link = rename(gripper.root_link);
    m.origin = mount;
    combined.joints.push_back(m);
    combined.name = arm.name + "+" + gripper.name;
  }
  combined.Finalize();
  e.model_ = std::move(combined);

  const RobotModel& model = e.model_;
  const std::vector<int> order = JointOrder(model);
  std::map<std::string, int> finger_index;
  for (std::size_t i = 0; i < e.fingers_.size(); ++i) {
    finger_index[e.fingers_[i]] = static_cast<int>(i);
  }
  for (int j : order) {
    const JointSpec& js = model.joints[j];
    Embodiment::JointSlot slot;
    slot.joint = j;
    slot.parent_link = *model.LinkIndex(js.parent_link);
    slot.child_link = *model.LinkIndex(js.child_link);
    if (arm_joint_set.count(js.name)) {
      slot.actuated = static_cast<int>(e.actuated_.size());
      e.actuated_.push_back(js.name);
      e.lower_.push_back(js.lower);
      e.upper_.push_back(js.upper);
      e.actuated_slots_.push_back(static_cast<int>(e.traversal_.size()));
    } else if (auto it = finger_index.find(js.name); it != finger_index.end()) {
      slot.finger = it->second;
    }
    e.traversal_.push_back(slot);
  }
  e.root_index_ = *model.LinkIndex(model.root_link);
  e.flange_index_ = *model.LinkIndex(e.flange_link_);

  // Actuated joints on the path root -> flange.
  std::string link = e.flange_link_;
  std::vector<int> chain;
  while (link != model.root_link) {
    for (const Embodiment::JointSlot& s : e.traversal_) {
      if (model.joints[s.joint].child_link == link) {
        if (s.actuated >= 0) chain.push_back(s.actuated);
        link = model.joints[s.joint].parent_link;
        break;
      }
    }
  }
  e.flange_chain_.assign(chain.rbegin(), chain.rend());
  return e;
}

}  // namespace shadowkit
