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

#include "shadowkit/toy_world.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "shadowkit/error.h"
#include "shadowkit/urdf.h"

namespace shadowkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// World heights of the drawn layers; the camera looks down from kCameraHeight.
constexpr double kCameraHeight = 1.0;
constexpr double kGoalHeight = 0.001;
constexpr double kBlockHeight = 0.01;
constexpr double kArmHeight = 0.05;
constexpr double kArmThickness = 0.02;
constexpr double kExpertGraspFraction = 0.75;

Eigen::Vector2d ClipNorm(const Eigen::Vector2d& v, double max_norm) {
  const double n = v.norm();
  return n > max_norm ? Eigen::Vector2d(v * (max_norm / n)) : v;
}

void DrawSquare(Rasterizer& r, const Transform& camera_from_world, const Eigen::Vector2d& c,
                double half, double z, std::int32_t label) {
  const Eigen::Vector3d p00 = camera_from_world * Eigen::Vector3d(c.x() - half, c.y() - half, z);
  const Eigen::Vector3d p10 = camera_from_world * Eigen::Vector3d(c.x() + half, c.y() - half, z);
  const Eigen::Vector3d p11 = camera_from_world * Eigen::Vector3d(c.x() + half, c.y() + half, z);
  const Eigen::Vector3d p01 = camera_from_world * Eigen::Vector3d(c.x() - half, c.y() + half, z);
  r.Draw(p00, p10, p11, label);
  r.Draw(p00, p11, p01, label);
}

json RgbToJson(Rgb c) { return json::array({c.r, c.g, c.b}); }
Rgb RgbFromJson(const json& j) {
  const auto v = j.get<std::vector<int>>();
  if (v.size() != 3) throw Error(ErrorCode::kSchemaError, "color must have three channels");
  for (int x : v) {
    if (x < 0 || x > 255) throw Error(ErrorCode::kSchemaError, "color channel out of range");
  }
  return Rgb{static_cast<std::uint8_t>(v[0]), static_cast<std::uint8_t>(v[1]),
             static_cast<std::uint8_t>(v[2])};
}
json VecToJson(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }
Eigen::Vector2d VecFromJson(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw Error(ErrorCode::kSchemaError, "expected a 2-vector");
  return {v[0], v[1]};
}
json BoxToJson(const Box2& b) { return {{"min", VecToJson(b.min)}, {"max", VecToJson(b.max)}}; }
Box2 BoxFromJson(const json& j) { return {VecFromJson(j.at("min")), VecFromJson(j.at("max"))}; }

json ArmToJson(const PlanarEmbodiment& a) {
  json limits = json::array();
  for (const auto& [lo, hi] : a.joint_limits) limits.push_back({lo, hi});
  return {{"name", a.name},
          {"base", VecToJson(a.base)},
          {"link_lengths", a.link_lengths},
          {"link_width", a.link_width},
          {"color", RgbToJson(a.color)},
          {"joint_limits", limits},
          {"tcp_offset", a.tcp_offset}};
}

PlanarEmbodiment ArmFromJson(const json& j, PlanarEmbodiment a) {
  if (j.contains("name")) a.name = j["name"].get<std::string>();
  if (j.contains("base")) a.base = VecFromJson(j["base"]);
  if (j.contains("link_lengths")) a.link_lengths = j["link_lengths"].get<std::vector<double>>();
  if (j.contains("link_width")) a.link_width = j["link_width"].get<double>();
  if (j.contains("color")) a.color = RgbFromJson(j["color"]);
  if (j.contains("joint_limits")) {
    a.joint_limits.clear();
    for (const auto& l : j["joint_limits"]) {
      const auto v = l.get<std::vector<double>>();
      if (v.size() != 2) throw Error(ErrorCode::kSchemaError, "joint limit must be [lower, upper]");
      a.joint_limits.emplace_back(v[0], v[1]);
    }
  }
  if (j.contains("tcp_offset")) a.tcp_offset = j["tcp_offset"].get<double>();
  return a;
}

}  // namespace

void PlanarEmbodiment::Validate() const {
  if (link_lengths.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "planar arm '" + name + "' needs at least two links");
  }
  if (!(link_width > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "planar arm '" + name + "' has non-positive width");
  }
  for (double l : link_lengths) {
    if (!(l > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "planar arm '" + name + "' has a non-positive link");
    }
  }
  if (joint_limits.size() != link_lengths.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "planar arm '" + name + "' needs one joint limit per link");
  }
  if (tcp_offset < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "planar arm '" + name + "' has negative tcp offset");
  }
}

RobotModel BuildArmModel(const PlanarEmbodiment& arm) {
  arm.Validate();
  RobotModel m;
  m.name = arm.name;
  m.links.push_back({"base", {}});
  for (int i = 0; i < arm.links(); ++i) {
    const double len = arm.link_lengths[i];
    Link link;
    link.name = "link" + std::to_string(i + 1);
    link.visuals.push_back(
        {MakeBox({len, arm.link_width, kArmThickness}),
         Transform::FromTranslation({len / 2.0, 0.0, 0.0})});
    m.links.push_back(std::move(link));
    JointSpec j;
    j.name = "joint" + std::to_string(i + 1);
    j.type = JointType::kRevolute;
    j.parent_link = i == 0 ? "base" : "link" + std::to_string(i);
    j.child_link = "link" + std::to_string(i + 1);
    j.origin = Transform::FromTranslation({i == 0 ? 0.0 : arm.link_lengths[i - 1], 0.0, 0.0});
    j.axis = Eigen::Vector3d::UnitZ();
    j.lower = arm.joint_limits[i].first;
    j.upper = arm.joint_limits[i].second;
    m.joints.push_back(std::move(j));
  }
  m.Finalize();
  return m;
}

Embodiment BuildEmbodiment(const PlanarEmbodiment& arm) {
  const RobotModel m = BuildArmModel(arm);
  return MakeEmbodiment(
      m, Transform::FromTranslation({arm.link_lengths.back() + arm.tcp_offset, 0.0, 0.0}),
      "link" + std::to_string(arm.links()));
}

bool Box2::Contains(const Eigen::Vector2d& p) const {
  return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

Eigen::Vector2d Box2::Clamp(const Eigen::Vector2d& p) const {
  return p.cwiseMax(min).cwiseMin(max);
}

void ToyScene::Validate() const {
  if (!(half_size > 0.0) || !(goal_half_size > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "block and goal half-sizes must be > 0");
  }
  if (!workspace.Contains(block)) throw Error(ErrorCode::kInvalidArgument, "block outside workspace");
  if (!workspace.Contains(goal)) throw Error(ErrorCode::kInvalidArgument, "goal outside workspace");
}

ToyWorldConfig ToyWorldConfig::Default() {
  ToyWorldConfig c;
  c.source.name = "orange2";
  c.source.base = {0.0, -0.6};
  c.source.link_lengths = {0.55, 0.45};
  c.source.link_width = 0.085;
  c.source.color = {255, 140, 0};
  c.source.joint_limits = {{-0.6, 2.2}, {0.3, 2.8}};
  c.source.tcp_offset = 0.06;
  c.target.name = "blue3";
  c.target.base = {0.2, -0.6};
  c.target.link_lengths = {0.45, 0.4, 0.2};
  c.target.link_width = 0.03;
  c.target.color = {30, 60, 220};
  c.target.joint_limits = {{-1.0, 2.4}, {0.2, 2.9}, {-1.2, 1.2}};
  c.target.tcp_offset = 0.04;
  c.ik.damping = 0.01;
  c.ik.step_scale = 1.0;
  c.ik.tol_pos = 1e-10;
  c.ik.tol_rot = 1e-10;
  c.ik.max_iters = 400;
  // Restarts could switch IK branches between frames; tracking is warm
  // started instead.
  c.ik.max_restarts = 0;
  return c;
}

json ToyWorldConfig::ToJson() const {
  return {{"image_size", image_size},
          {"view_center", VecToJson(view_center)},
          {"view_extent", view_extent},
          {"background", RgbToJson(background)},
          {"block_color", RgbToJson(block_color)},
          {"goal_color", RgbToJson(goal_color)},
          {"fill", RgbToJson(fill)},
          {"block_half_size", block_half_size},
          {"goal_half_size", goal_half_size},
          {"engage_radius", engage_radius},
          {"max_step", max_step},
          {"expert_gain", expert_gain},
          {"object_region", BoxToJson(object_region)},
          {"workspace", BoxToJson(workspace)},
          {"min_separation", min_separation},
          {"home", VecToJson(home)},
          {"home_jitter", home_jitter},
          {"horizon", horizon},
          {"source", ArmToJson(source)},
          {"target", ArmToJson(target)},
          {"ik",
           {{"damping", ik.damping},
            {"tol_pos", ik.tol_pos},
            {"tol_rot", ik.tol_rot},
            {"max_iters", ik.max_iters},
            {"step_scale", ik.step_scale},
            {"max_restarts", ik.max_restarts},
            {"stall_iters", ik.stall_iters}}}};
}

ToyWorldConfig ToyWorldConfig::FromJson(const json& j) {
  ToyWorldConfig c = Default();
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "toy world config must be an object");
  try {
    c.image_size = j.value("image_size", c.image_size);
    if (j.contains("view_center")) c.view_center = VecFromJson(j["view_center"]);
    c.view_extent = j.value("view_extent", c.view_extent);
    if (j.contains("background")) c.background = RgbFromJson(j["background"]);
    if (j.contains("block_color")) c.block_color = RgbFromJson(j["block_color"]);
    if (j.contains("goal_color")) c.goal_color = RgbFromJson(j["goal_color"]);
    if (j.contains("fill")) c.fill = RgbFromJson(j["fill"]);
    c.block_half_size = j.value("block_half_size", c.block_half_size);
    c.goal_half_size = j.value("goal_half_size", c.goal_half_size);
    c.engage_radius = j.value("engage_radius", c.engage_radius);
    c.max_step = j.value("max_step", c.max_step);
    c.expert_gain = j.value("expert_gain", c.expert_gain);
    if (j.contains("object_region")) c.object_region = BoxFromJson(j["object_region"]);
    if (j.contains("workspace")) c.workspace = BoxFromJson(j["workspace"]);
    c.min_separation = j.value("min_separation", c.min_separation);
    if (j.contains("home")) c.home = VecFromJson(j["home"]);
    c.home_jitter = j.value("home_jitter", c.home_jitter);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("source")) c.source = ArmFromJson(j["source"], c.source);
    if (j.contains("target")) c.target = ArmFromJson(j["target"], c.target);
    if (j.contains("ik")) {
      const json& k = j["ik"];
      c.ik.damping = k.value("damping", c.ik.damping);
      c.ik.tol_pos = k.value("tol_pos", c.ik.tol_pos);
      c.ik.tol_rot = k.value("tol_rot", c.ik.tol_rot);
      c.ik.max_iters = k.value("max_iters", c.ik.max_iters);
      c.ik.step_scale = k.value("step_scale", c.ik.step_scale);
      c.ik.max_restarts = k.value("max_restarts", c.ik.max_restarts);
      c.ik.stall_iters = k.value("stall_iters", c.ik.stall_iters);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("toy world config: ") + e.what());
  }
  return c;
}

std::string_view ToyRobotName(ToyRobot r) { return r == ToyRobot::kSource ? "source" : "target"; }

ToyWorld::ToyWorld(const ToyWorldConfig& config) : config_(config) {
  if (config_.source.links() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "the toy source arm must have two links");
  }
  if (config_.image_size <= 0 || config_.image_size % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "toy image size must be positive and even");
  }
  if (!(config_.view_extent > 0.0) || !(config_.block_half_size > 0.0) ||
      !(config_.max_step > 0.0) ||
      !(config_.expert_gain > 0.0 && config_.expert_gain <= 1.0) || config_.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "toy world sizes must be positive");
  }
  config_.ik.Validate();
  source_ = BuildEmbodiment(config_.source);
  target_ = BuildEmbodiment(config_.target);
  camera_ = Camera::Orthographic(config_.image_size / config_.view_extent, config_.image_size,
                                 config_.image_size);
  // Camera axes: x along world x, y along world -y, z looking down.
  const Eigen::Quaterniond down(Eigen::AngleAxisd(std::numbers::pi, Eigen::Vector3d::UnitX()));
  const Eigen::Vector3d eye(config_.view_center.x(), config_.view_center.y(), kCameraHeight);
  camera_from_world_ = Transform(down, Eigen::Vector3d::Zero()) *
                       Transform::FromTranslation(-eye);
  auto base_pose = [](const PlanarEmbodiment& a) {
    return Transform::FromTranslation({a.base.x(), a.base.y(), kArmHeight});
  };
  source_extrinsics_ = camera_from_world_ * base_pose(config_.source);
  target_extrinsics_ = camera_from_world_ * base_pose(config_.target);
}

const PlanarEmbodiment& ToyWorld::arm(ToyRobot r) const {
  return r == ToyRobot::kSource ? config_.source : config_.target;
}

const Embodiment& ToyWorld::embodiment(ToyRobot r) const {
  return r == ToyRobot::kSource ? source_ : target_;
}

const Transform& ToyWorld::extrinsics(ToyRobot r) const {
  return r == ToyRobot::kSource ? source_extrinsics_ : target_extrinsics_;
}

Calibration ToyWorld::calibration() const {
  Calibration c;
  c.camera = camera_;
  c.extrinsics[config_.source.name] = source_extrinsics_;
  c.extrinsics[config_.target.name] = target_extrinsics_;
  return c;
}

double ToyWorld::SourceHeading(const Eigen::Vector2d& p) const {
  const PlanarEmbodiment& s = config_.source;
  const double l1 = s.link_lengths[0];
  const double l2 = s.link_lengths[1] + s.tcp_offset;
  const Eigen::Vector2d d = p - s.base;
  const double c = std::clamp((d.squaredNorm() - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double q2 = std::acos(c);
  const double q1 = std::atan2(d.y(), d.x()) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  return q1 + q2;
}

Transform ToyWorld::EePose(ToyRobot r, const Eigen::Vector2d& p) const {
  const Eigen::Vector2d local = p - arm(r).base;
  return Transform(Eigen::Quaterniond(Eigen::AngleAxisd(SourceHeading(p), Eigen::Vector3d::UnitZ())),
                   Eigen::Vector3d(local.x(), local.y(), 0.0));
}

IkResult ToyWorld::Track(ToyRobot r, const Eigen::Vector2d& p, const JointState& seed) const {
  return SolveIk(embodiment(r), EePose(r, p), seed, config_.ik);
}

ToyRender ToyWorld::Render(const ToyScene& scene, const Embodiment& e, const Transform& extrinsics,
                           const JointState& q, Rgb arm_color) const {
  Rasterizer r(camera_);
  DrawSquare(r, camera_from_world_, scene.goal, scene.goal_half_size, kGoalHeight, 0);
  DrawSquare(r, camera_from_world_, scene.block, scene.half_size, kBlockHeight, 1);
  const int n = config_.image_size;
  ToyRender out;
  out.image.width = n;
  out.image.height = n;
  out.image.rgb.resize(static_cast<std::size_t>(n) * n * 3);
  out.scene_depth = r.depth();
  const double table_depth = (camera_from_world_ * Eigen::Vector3d::Zero()).z();
  for (std::size_t i = 0; i < r.labels().size(); ++i) {
    const std::int32_t label = r.labels()[i];
    const Rgb c = label == 0 ? config_.goal_color
                             : label == 1 ? config_.block_color : config_.background;
    out.image.rgb[3 * i] = c.r;
    out.image.rgb[3 * i + 1] = c.g;
    out.image.rgb[3 * i + 2] = c.b;
    if (label < 0) out.scene_depth.values[i] = table_depth;
  }
  if (e.empty()) {
    out.arm_mask = Mask(n, n);
  } else {
    out.arm_mask = RenderRobot(e, q, camera_, extrinsics).mask;
    FillMask(out.image, out.arm_mask, arm_color);
  }
  return out;
}

ToyRender ToyWorld::Render(const ToyScene& scene, ToyRobot r, const JointState& q) const {
  return Render(scene, embodiment(r), extrinsics(r), q, arm(r).color);
}

ToyScene ToyWorld::SampleScene(std::mt19937_64& rng) const {
  const Box2& region = config_.object_region;
  std::uniform_real_distribution<double> ux(region.min.x(), region.max.x());
  std::uniform_real_distribution<double> uy(region.min.y(), region.max.y());
  const double min_sep = std::max(config_.min_separation, 2.0 * config_.block_half_size);
  ToyScene s;
  s.half_size = config_.block_half_size;
  s.goal_half_size = config_.goal_half_size;
  s.workspace = config_.workspace;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 10000) {
      throw Error(ErrorCode::kInvalidArgument, "object region too small for the separation");
    }
    s.block = {ux(rng), uy(rng)};
    s.goal = {ux(rng), uy(rng)};
    if ((s.block - s.goal).norm() > min_sep) break;
  }
  s.Validate();
  return s;
}

Eigen::Vector2d ToyWorld::SampleHome(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-config_.home_jitter, config_.home_jitter);
  const double dx = u(rng);
  const double dy = u(rng);
  return config_.workspace.Clamp(config_.home + Eigen::Vector2d(dx, dy));
}

void ToyWorld::Step(ToyState& state, const ToyAction& action) const {
  const Eigen::Vector2d next = config_.workspace.Clamp(state.ee + ClipNorm(action.delta, config_.max_step));
  state.holding =
      action.engage > 0.5 && (state.ee - state.scene.block).norm() < config_.engage_radius;
  if (state.holding) state.scene.block = next;
  state.ee = next;
  ++state.t;
}

bool ToyWorld::Success(const ToyScene& scene) const {
  return (scene.block - scene.goal).norm() <= scene.half_size;
}

ToyAction ExpertAction(const ToyWorld& world, const ToyState& state) {
  const ToyWorldConfig& c = world.config();
  ToyAction a;
  if (world.Success(state.scene)) return a;
  if (state.holding) {
    a.delta = ClipNorm(c.expert_gain * (state.scene.goal - state.scene.block), c.max_step);
    a.engage = 1.0;
    return a;
  }
  // Close the gripper on the way in, once well inside the grasp radius.
  const Eigen::Vector2d to_block = state.scene.block - state.ee;
  a.delta = ClipNorm(c.expert_gain * to_block, c.max_step);
  a.engage = to_block.norm() < kExpertGraspFraction * c.engage_radius ? 1.0 : 0.0;
  return a;
}

ToyDemo ScriptedExpert(const ToyWorld& world, const ToyScene& scene, ToyRobot r,
                       std::uint64_t seed, const ExpertOptions& options) {
  scene.Validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ToyState state;
  state.scene = scene;
  state.ee = world.SampleHome(rng);
  JointState q = world.Track(r, state.ee, MidRange(world.embodiment(r))).q;
  ToyDemo demo;
  demo.record.trajectory_id = "expert";
  demo.success = world.Success(state.scene);
  const int max_len = options.pad_to > 0 ? options.pad_to : world.config().horizon;
  for (int t = 0; t < max_len; ++t) {
    ToyRender view = world.Render(state.scene, r, q);
    Frame f;
    f.image = std::move(view.image);
    if (options.keep_depth) f.scene_depth = std::move(view.scene_depth);
    f.joints = q;
    f.time_index = t;
    f.trajectory_id = demo.record.trajectory_id;
    const ToyAction label = ExpertAction(world, state);
    ToyAction executed = label;
    if (options.action_noise > 0.0 && !demo.success) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      executed.delta += options.action_noise * Eigen::Vector2d(nx, ny);
    }
    demo.ee.push_back(state.ee);
    world.Step(state, executed);
    q = world.Track(r, state.ee, q).q;
    demo.record.frames.push_back(std::move(f));
    demo.record.actions.push_back({world.EePose(r, state.ee), executed.engage});
    demo.labels.push_back(label);
    demo.success = demo.success || world.Success(state.scene);
    if (demo.success && options.pad_to <= 0) break;
  }
  if (!demo.success) {
    throw Error(ErrorCode::kExpertFailed, "expert did not reach the goal within the horizon");
  }
  return demo;
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void ExportToyDataset(const ToyWorld& world, ToyRobot r, const fs::path& root, int trajectories,
                      int frames, std::uint64_t seed, bool with_depth) {
  if (trajectories < 0 || frames < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need a non-negative trajectory count and >= 1 frame");
  }
  DatasetManifest m;
  m.name = std::string("toy_") + std::string(ToyRobotName(r));
  m.source_robot = world.arm(ToyRobot::kSource).name;
  m.target_robot = world.arm(ToyRobot::kTarget).name;
  m.recorded_on = world.arm(r).name;
  m.has_depth = with_depth;
  for (ToyRobot which : {ToyRobot::kSource, ToyRobot::kTarget}) {
    const PlanarEmbodiment& a = world.arm(which);
    const fs::path dir = root / "robots" / a.name;
    WriteUrdf(BuildArmModel(a), dir);
    RobotSpec spec;
    spec.urdf = fs::path("robots") / a.name / (a.name + ".urdf");
    spec.tcp = world.embodiment(which).tcp();
    spec.flange = world.embodiment(which).flange_link();
    m.robots[a.name] = spec;
  }
  ExpertOptions opts;
  opts.pad_to = frames;
  opts.keep_depth = with_depth;
  for (int i = 0; i < trajectories; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "traj_%03d", i);
    m.trajectories.push_back(id);
    std::mt19937_64 rng(MixSeed(seed, static_cast<std::uint64_t>(i)));
    for (int attempt = 0;; ++attempt) {
      const ToyScene scene = world.SampleScene(rng);
      try {
        ToyDemo demo = ScriptedExpert(world, scene, r, MixSeed(seed + 1, i * 1000 + attempt), opts);
        demo.record.trajectory_id = id;
        for (Frame& f : demo.record.frames) f.trajectory_id = id;
        WriteTrajectory(root / id, demo.record);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kExpertFailed || attempt >= 100) throw;
      }
    }
  }
  WriteDatasetHeader(root, m, world.calibration());
}

}  // namespace shadowkit
