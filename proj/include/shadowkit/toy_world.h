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

#ifndef SHADOWKIT_TOY_WORLD_H_
#define SHADOWKIT_TOY_WORLD_H_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "shadowkit/compose.h"
#include "shadowkit/geometry.h"
#include "shadowkit/image.h"
#include "shadowkit/json_io.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/pipeline.h"
#include "shadowkit/render.h"
#include "shadowkit/robot_model.h"

namespace shadowkit {

// Planar serial arm seen from above. Joints rotate about the world z axis;
// link i is drawn as a box of length link_lengths[i] and width link_width.
// The end-effector sits tcp_offset beyond the tip of the last link.
struct PlanarEmbodiment {
  std::string name;
  Eigen::Vector2d base = Eigen::Vector2d::Zero();  // world position
  std::vector<double> link_lengths;
  double link_width = 0.05;
  Rgb color{0, 0, 0};
  std::vector<std::pair<double, double>> joint_limits;
  double tcp_offset = 0.0;

  int links() const { return static_cast<int>(link_lengths.size()); }
  // Throws Error(kInvalidArgument) for fewer than two links, non-positive
  // widths or lengths, or limits that do not match the link count.
  void Validate() const;
};

// Links "base", "link1".."linkN" joined by z-axis revolutes "joint1"..
RobotModel BuildArmModel(const PlanarEmbodiment& arm);
// Arm model in its base frame. The flange is the last link; the tcp is a
// pure translation along its x axis.
Embodiment BuildEmbodiment(const PlanarEmbodiment& arm);

struct Box2 {
  Eigen::Vector2d min = Eigen::Vector2d::Zero();
  Eigen::Vector2d max = Eigen::Vector2d::Zero();

  bool Contains(const Eigen::Vector2d& p) const;
  Eigen::Vector2d Clamp(const Eigen::Vector2d& p) const;
};

struct ToyScene {
  Eigen::Vector2d block = Eigen::Vector2d::Zero();
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double half_size = 0.04;  // block; also the success radius
  double goal_half_size = 0.06;
  Box2 workspace;

  // Throws Error(kInvalidArgument) when block or goal lies outside the
  // workspace or the half-size is not positive.
  void Validate() const;
};

struct ToyWorldConfig {
  int image_size = 64;
  Eigen::Vector2d view_center{0.0, -0.05};
  double view_extent = 0.8;  // meters across the square image
  Rgb background{230, 230, 230};
  Rgb block_color{200, 40, 40};
  Rgb goal_color{60, 180, 75};
  Rgb fill{0, 0, 0};
  double block_half_size = 0.06;
  // The goal is drawn larger than the block so it stays visible around it.
  double goal_half_size = 0.09;
  double engage_radius = 0.08;
  double max_step = 0.08;
  // The expert steps this fraction of the remaining distance per action.
  double expert_gain = 0.4;
  // Block and goal are drawn from here; the commanded end-effector is
  // clamped to the workspace.
  Box2 object_region{{-0.22, -0.05}, {0.22, 0.26}};
  Box2 workspace{{-0.3, -0.15}, {0.3, 0.35}};
  double min_separation = 0.2;
  Eigen::Vector2d home{0.0, -0.12};
  double home_jitter = 0.04;
  int horizon = 80;
  PlanarEmbodiment source;
  PlanarEmbodiment target;
  IkParams ik;

  // Two-link orange source, three-link blue target.
  static ToyWorldConfig Default();
  nlohmann::json ToJson() const;
  // Missing keys keep their Default() values.
  static ToyWorldConfig FromJson(const nlohmann::json& j);
};

enum class ToyRobot { kSource, kTarget };
std::string_view ToyRobotName(ToyRobot r);

// A rendered toy observation.
struct ToyRender {
  Image image;
  Mask arm_mask;
  DepthBuffer scene_depth;
};

struct ToyAction {
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();  // meters
  double engage = 0.0;
};

struct ToyState {
  ToyScene scene;
  Eigen::Vector2d ee = Eigen::Vector2d::Zero();  // commanded end-effector
  bool holding = false;  // the block moved with the last step
  int t = 0;
};

// Geometry, camera and kinematics of the toy task shared by both robots.
class ToyWorld {
 public:
  explicit ToyWorld(const ToyWorldConfig& config);

  const ToyWorldConfig& config() const { return config_; }
  const PlanarEmbodiment& arm(ToyRobot r) const;
  const Embodiment& embodiment(ToyRobot r) const;
  const Camera& camera() const { return camera_; }
  // Maps robot r's base frame into the camera frame.
  const Transform& extrinsics(ToyRobot r) const;
  const Transform& camera_from_world() const { return camera_from_world_; }
  // Camera plus extrinsics keyed by arm name.
  Calibration calibration() const;

  // End-effector pose in the base frame of r for a planar position. The
  // heading is the one the source arm reaches the position with, so every
  // commanded pose is reachable by both arms.
  Transform EePose(ToyRobot r, const Eigen::Vector2d& p) const;
  double SourceHeading(const Eigen::Vector2d& p) const;

  // Joint-space controller: IK from `seed` to the pose at p.
  IkResult Track(ToyRobot r, const Eigen::Vector2d& p, const JointState& seed) const;

  // Block, goal and the arm of r at q. An empty embodiment draws no arm.
  ToyRender Render(const ToyScene& scene, const Embodiment& e, const Transform& extrinsics,
                   const JointState& q, Rgb arm_color) const;
  ToyRender Render(const ToyScene& scene, ToyRobot r, const JointState& q) const;

  // Samples block and goal in the object region, at least min_separation
  // apart.
  ToyScene SampleScene(std::mt19937_64& rng) const;
  Eigen::Vector2d SampleHome(std::mt19937_64& rng) const;

  // Advances the block and commanded end-effector by one action. The step
  // is clipped to max_step and the end-effector to the workspace. An
  // engaged end-effector within engage_radius of the block holds it: the
  // block moves to the new end-effector position. Disengaging releases it.
  void Step(ToyState& state, const ToyAction& action) const;
  bool Success(const ToyScene& scene) const;

 private:
  ToyWorldConfig config_;
  Embodiment source_;
  Embodiment target_;
  Camera camera_;
  Transform camera_from_world_;
  Transform source_extrinsics_;
  Transform target_extrinsics_;
};

// Waypoint expert: move over the block, engaging once close, then carry it
// to the goal, each step a fixed fraction of the remaining distance.
ToyAction ExpertAction(const ToyWorld& world, const ToyState& state);

struct ToyDemo {
  // Frames rendered on the demo robot with its joint states; actions are
  // absolute end-effector poses in that robot's base frame with the engage
  // command as aperture.
  TrajectoryRecord record;
  std::vector<ToyAction> labels;  // clean expert actions per frame
  std::vector<Eigen::Vector2d> ee;
  bool success = false;
};

struct ExpertOptions {
  // Standard deviation (meters) added to each executed step; labels stay
  // clean.
  double action_noise = 0.0;
  // When positive, exactly this many frames are recorded, holding still
  // after success.
  int pad_to = 0;
  bool keep_depth = false;
};

// Rolls the expert out on robot r from a home position drawn from `seed`.
// Throws Error(kExpertFailed) when the block does not reach the goal.
ToyDemo ScriptedExpert(const ToyWorld& world, const ToyScene& scene, ToyRobot r,
                       std::uint64_t seed, const ExpertOptions& options = {});

// Deterministic 64-bit mixing of a seed with a stream index.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

// Writes a dataset of expert trajectories recorded on robot r, with URDF
// models of both arms, in the layout read by Dataset::Load.
void ExportToyDataset(const ToyWorld& world, ToyRobot r, const std::filesystem::path& root,
                      int trajectories, int frames, std::uint64_t seed, bool with_depth);

}  // namespace shadowkit

#endif  // SHADOWKIT_TOY_WORLD_H_
