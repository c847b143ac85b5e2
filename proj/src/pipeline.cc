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

#include "shadowkit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "shadowkit/error.h"
#include "shadowkit/image.h"
#include "shadowkit/urdf.h"

namespace shadowkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, what);
}

template <typename T>
T Get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) SchemaError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    SchemaError(where + ": bad '" + key + "': " + e.what());
  }
}

json JointStateToJson(const JointState& q) { return json(q.values); }

}  // namespace

json DatasetManifest::ToJson() const {
  json robots_json = json::object();
  for (const auto& [name, r] : robots) {
    json rj{{"urdf", r.urdf.generic_string()},
            {"mount", TransformToJson(r.mount)},
            {"tcp", TransformToJson(r.tcp)}};
    if (!r.gripper_urdf.empty()) rj["gripper_urdf"] = r.gripper_urdf.generic_string();
    if (!r.assets.empty()) rj["assets"] = r.assets.generic_string();
    if (!r.flange.empty()) rj["flange"] = r.flange;
    robots_json[name] = rj;
  }
  return json{{"name", name},
              {"source_robot", source_robot},
              {"target_robot", target_robot},
              {"recorded_on", recorded_on.empty() ? source_robot : recorded_on},
              {"calibration", calibration.generic_string()},
              {"trajectories", trajectories},
              {"image_format", image_format},
              {"has_depth", has_depth},
              {"robots", robots_json}};
}

DatasetManifest DatasetManifest::FromJson(const json& j) {
  if (!j.is_object()) SchemaError("manifest must be a JSON object");
  DatasetManifest m;
  m.name = Get<std::string>(j, "name", "manifest");
  m.source_robot = Get<std::string>(j, "source_robot", "manifest");
  m.target_robot = Get<std::string>(j, "target_robot", "manifest");
  m.recorded_on = j.contains("recorded_on") ? Get<std::string>(j, "recorded_on", "manifest")
                                            : m.source_robot;
  m.calibration = Get<std::string>(j, "calibration", "manifest");
  m.trajectories = Get<std::vector<std::string>>(j, "trajectories", "manifest");
  if (j.contains("image_format")) m.image_format = Get<std::string>(j, "image_format", "manifest");
  if (m.image_format != "png") SchemaError("manifest: only png images are supported");
  if (j.contains("has_depth")) m.has_depth = Get<bool>(j, "has_depth", "manifest");
  if (j.contains("robots")) {
    if (!j["robots"].is_object()) SchemaError("manifest: 'robots' must be an object");
    for (const auto& [name, rj] : j["robots"].items()) {
      const std::string where = "robot '" + name + "'";
      RobotSpec r;
      r.urdf = Get<std::string>(rj, "urdf", where);
      if (rj.contains("gripper_urdf")) r.gripper_urdf = Get<std::string>(rj, "gripper_urdf", where);
      if (rj.contains("assets")) r.assets = Get<std::string>(rj, "assets", where);
      if (rj.contains("mount")) r.mount = TransformFromJson(rj["mount"]);
      if (rj.contains("tcp")) r.tcp = TransformFromJson(rj["tcp"]);
      if (rj.contains("flange")) r.flange = Get<std::string>(rj, "flange", where);
      m.robots.emplace(name, r);
    }
  }
  return m;
}

std::string FrameFileName(std::int64_t t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "frame_%06lld.png", static_cast<long long>(t));
  return buf;
}

std::string DepthFileName(std::int64_t t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "depth_%06lld.png", static_cast<long long>(t));
  return buf;
}

json StateToJson(const StateRecord& s) {
  return json{{"t", s.t},
              {"q", JointStateToJson(s.joints)},
              {"aperture", s.joints.aperture},
              {"action", {{"ee", TransformToJson(s.action.ee)}, {"aperture", s.action.aperture}}}};
}

namespace {

StateRecord ParseStateLine(const std::string& line, const std::string& where, bool has_depth) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    SchemaError(where + ": " + e.what());
  }
  StateRecord s;
  s.t = Get<std::int64_t>(j, "t", where);
  s.joints.values = Get<std::vector<double>>(j, "q", where);
  s.joints.aperture = j.contains("aperture") ? Get<double>(j, "aperture", where) : 0.0;
  if (j.contains("action")) {
    const json& a = j["action"];
    if (!a.contains("ee")) SchemaError(where + ": action without 'ee'");
    s.action.ee = TransformFromJson(a["ee"]);
    s.action.aperture = a.contains("aperture") ? Get<double>(a, "aperture", where) : 0.0;
  }
  s.frame_file = j.contains("frame") ? Get<std::string>(j, "frame", where) : FrameFileName(s.t);
  if (has_depth) {
    s.depth_file = j.contains("depth") ? Get<std::string>(j, "depth", where) : DepthFileName(s.t);
  }
  s.raw = std::move(j);
  return s;
}

fs::path Resolve(const fs::path& root, const fs::path& p) {
  return p.is_absolute() ? p : root / p;
}

void RequireFile(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw Error(ErrorCode::kMissingFile, "missing file " + p.string());
}

}  // namespace

Dataset Dataset::Load(const fs::path& manifest_path) {
  RequireFile(manifest_path);
  Dataset d;
  d.root_ = manifest_path.parent_path();
  json j;
  try {
    j = json::parse(ReadTextFile(manifest_path));
  } catch (const json::exception& e) {
    SchemaError(std::string("manifest is not JSON: ") + e.what());
  }
  d.manifest_ = DatasetManifest::FromJson(j);
  const fs::path calib_path = Resolve(d.root_, d.manifest_.calibration);
  RequireFile(calib_path);
  d.calibration_ = LoadCalibration(calib_path);
  for (const auto& [name, r] : d.manifest_.robots) {
    RequireFile(Resolve(d.root_, r.urdf));
    if (!r.gripper_urdf.empty()) RequireFile(Resolve(d.root_, r.gripper_urdf));
  }
  for (const std::string& traj : d.manifest_.trajectories) {
    const fs::path dir = d.root_ / traj;
    const fs::path states_path = dir / "states.jsonl";
    RequireFile(states_path);
    std::istringstream in(ReadTextFile(states_path));
    std::vector<StateRecord> states;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = states_path.string() + ":" + std::to_string(line_no);
      StateRecord s = ParseStateLine(line, where, d.manifest_.has_depth);
      if (!states.empty() && s.t <= states.back().t) {
        SchemaError(where + ": time index not strictly increasing");
      }
      RequireFile(dir / s.frame_file);
      if (!s.depth_file.empty()) RequireFile(dir / s.depth_file);
      states.push_back(std::move(s));
    }
    d.states_.push_back(std::move(states));
  }
  return d;
}

std::size_t Dataset::total_frames() const {
  std::size_t n = 0;
  for (const auto& s : states_) n += s.size();
  return n;
}

fs::path Dataset::trajectory_dir(std::size_t traj) const {
  return root_ / manifest_.trajectories.at(traj);
}

Frame Dataset::LoadFrame(std::size_t traj, std::size_t k) const {
  const StateRecord& s = states_.at(traj).at(k);
  const fs::path dir = trajectory_dir(traj);
  Frame f;
  f.image = ReadPng(dir / s.frame_file);
  if (!s.depth_file.empty()) {
    RequireFile(dir / s.depth_file);
    f.scene_depth = DecodeDepthPng(ReadTextFile(dir / s.depth_file));
  }
  f.joints = s.joints;
  f.time_index = s.t;
  f.trajectory_id = manifest_.trajectories[traj];
  return f;
}

TrajectoryRecord Dataset::LoadTrajectory(std::size_t traj) const {
  TrajectoryRecord r;
  r.trajectory_id = manifest_.trajectories.at(traj);
  for (std::size_t k = 0; k < states_[traj].size(); ++k) {
    r.frames.push_back(LoadFrame(traj, k));
    r.actions.push_back(states_[traj][k].action);
  }
  return r;
}

Embodiment Dataset::LoadEmbodiment(const std::string& robot) const {
  auto it = manifest_.robots.find(robot);
  if (it == manifest_.robots.end()) SchemaError("manifest has no robot '" + robot + "'");
  const RobotSpec& r = it->second;
  const fs::path assets = r.assets.empty() ? fs::path{} : Resolve(root_, r.assets);
  const RobotModel arm = LoadUrdf(Resolve(root_, r.urdf), assets);
  RobotModel gripper;
  if (!r.gripper_urdf.empty()) gripper = LoadUrdf(Resolve(root_, r.gripper_urdf), assets);
  return AttachGripper(arm, gripper, r.mount, r.tcp, r.flange);
}

void WriteTrajectory(const fs::path& dir, const TrajectoryRecord& record) {
  fs::create_directories(dir);
  std::string lines;
  for (std::size_t k = 0; k < record.frames.size(); ++k) {
    const Frame& f = record.frames[k];
    StateRecord s;
    s.t = f.time_index;
    s.joints = f.joints;
    if (k < record.actions.size()) s.action = record.actions[k];
    WritePng(dir / FrameFileName(s.t), f.image);
    if (f.scene_depth) WriteTextFile(dir / DepthFileName(s.t), EncodeDepthPng(*f.scene_depth));
    lines += StateToJson(s).dump() + "\n";
  }
  WriteTextFile(dir / "states.jsonl", lines);
}

void WriteDatasetHeader(const fs::path& root, const DatasetManifest& manifest,
                        const Calibration& calibration) {
  fs::create_directories(root);
  WriteTextFile(root / "manifest.json", manifest.ToJson().dump(2) + "\n");
  WriteTextFile(Resolve(root, manifest.calibration), SerializeCalibration(calibration));
}

std::string_view DirectionName(Direction d) { return d == Direction::kTrain ? "train" : "eval"; }

Direction ParseDirection(std::string_view name) {
  if (name == "train") return Direction::kTrain;
  if (name == "eval") return Direction::kEval;
  throw Error(ErrorCode::kInvalidArgument, "unknown direction '" + std::string(name) + "'");
}

json EditReport::ToJson(bool include_timing) const {
  json issues_json = json::array();
  for (const FrameIssue& i : issues) {
    issues_json.push_back({{"trajectory", i.trajectory_id}, {"t", i.t}, {"error", i.error}});
  }
  json j{{"frames_processed", frames_processed},
         {"frames_edited", frames_edited},
         {"frames_skipped", frames_skipped},
         {"ik_failures", ik_failures},
         {"ik_failure_frames", ik_failure_frames},
         {"issues", issues_json},
         {"config", config}};
  if (include_timing) j["timing"] = {{"mean_frame_ms", mean_frame_ms}, {"p95_frame_ms", p95_frame_ms}};
  return j;
}

std::pair<Transform, Transform> MiscalibrateCamera(const Transform& calib_active,
                                                   const Transform& calib_virtual,
                                                   const CalibrationNoiseSpec& noise) {
  const Transform perturbed_virtual = PerturbExtrinsics(calib_virtual, noise);
  if (perturbed_virtual == calib_virtual) return {calib_active, calib_virtual};
  const Transform camera_error = perturbed_virtual * calib_virtual.Inverse();
  return {camera_error * calib_active, perturbed_virtual};
}

namespace {

struct EditContext {
  const Dataset* dataset;
  fs::path out_dir;
  Direction direction;
  EditConfig config;
  const Embodiment* active;
  const Embodiment* virtual_robot;
  Transform calib_active;
  Transform calib_virtual;
  Camera camera;
};

struct TrajectoryOutcome {
  std::size_t processed = 0, edited = 0, skipped = 0, ik_failures = 0;
  std::vector<std::int64_t> ik_failure_frames;
  std::vector<FrameIssue> issues;
  std::vector<double> frame_ms;
};

TrajectoryOutcome EditTrajectory(const EditContext& ctx, std::size_t traj) {
  TrajectoryOutcome out;
  const Dataset& ds = *ctx.dataset;
  const std::string& id = ds.manifest().trajectories[traj];
  const fs::path in_dir = ds.trajectory_dir(traj);
  const fs::path out_dir = ctx.out_dir / id;
  fs::create_directories(out_dir);
  const bool shadow = ctx.config.mode == EditMode::kShadow;
  const JointState cold_seed = shadow ? MidRange(*ctx.virtual_robot) : JointState{};
  JointState seed = cold_seed;
  std::optional<JointState> last_good;
  std::string lines;

  for (std::size_t k = 0; k < ds.states(traj).size(); ++k) {
    const StateRecord& s = ds.states(traj)[k];
    const auto start = std::chrono::steady_clock::now();
    ++out.processed;
    auto skip = [&](const std::string& why) {
      ++out.skipped;
      out.issues.push_back({id, s.t, why});
    };

    if (ctx.config.mode == EditMode::kNone) {
      // Pass-through: copy bytes so outputs match inputs exactly.
      try {
        fs::copy_file(in_dir / s.frame_file, out_dir / s.frame_file,
                      fs::copy_options::overwrite_existing);
        if (!s.depth_file.empty()) {
          fs::copy_file(in_dir / s.depth_file, out_dir / s.depth_file,
                        fs::copy_options::overwrite_existing);
        }
      } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::kIoError, e.what());
      }
      const Mask empty(ctx.camera.width(), ctx.camera.height());
      const std::string mask_png = EncodeMaskPng(empty);
      WriteTextFile(out_dir / ("active_mask_" + FrameFileName(s.t).substr(6)), mask_png);
      WriteTextFile(out_dir / ("virtual_mask_" + FrameFileName(s.t).substr(6)), mask_png);
      lines += s.raw.dump() + "\n";
      ++out.edited;
      out.frame_ms.push_back(
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count());
      continue;
    }

    Frame frame;
    CompositeResult r;
    try {
      frame = ds.LoadFrame(traj, k);
      r = EditFrame(frame, *ctx.active, *ctx.virtual_robot, ctx.calib_active,
                    ctx.calib_virtual, ctx.camera, ctx.config, seed);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIoError) throw;
      skip(e.what());
      continue;
    }

    if (shadow && !r.ik_converged) {
      ++out.ik_failures;
      out.ik_failure_frames.push_back(s.t);
      if (ctx.direction == Direction::kTrain || !last_good) {
        skip("IkNotConverged");
        seed = last_good.value_or(cold_seed);
        continue;
      }
      // Eval: freeze the virtual robot at its last converged pose.
      JointState frozen = *last_good;
      frozen.aperture = frame.joints.aperture;
      r.virtual_q = frozen;
      r.virtual_mask = RenderFilteredMask(*ctx.virtual_robot, frozen, ctx.camera,
                                          ctx.calib_virtual, frame.scene_depth,
                                          ctx.config.occlusion_tolerance);
      r.edited = frame.image;
      FillMask(r.edited, r.active_mask, ctx.config.fill);
      FillMask(r.edited, r.virtual_mask, ctx.config.fill);
      seed = *last_good;
    } else if (shadow) {
      last_good = r.virtual_q;
      seed = r.virtual_q;
    }

    WritePng(out_dir / s.frame_file, r.edited);
    if (!s.depth_file.empty()) {
      fs::copy_file(in_dir / s.depth_file, out_dir / s.depth_file,
                    fs::copy_options::overwrite_existing);
    }
    const std::string suffix = FrameFileName(s.t).substr(6);  // "<t>.png"
    WriteTextFile(out_dir / ("active_mask_" + suffix), EncodeMaskPng(r.active_mask));
    WriteTextFile(out_dir / ("virtual_mask_" + suffix), EncodeMaskPng(r.virtual_mask));
    json line = s.raw;
    line["edit"] = {{"ik_converged", r.ik_converged}};
    if (shadow) line["edit"]["virtual_q"] = JointStateToJson(r.virtual_q);
    lines += line.dump() + "\n";
    ++out.edited;
    out.frame_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count());
  }
  WriteTextFile(out_dir / "states.jsonl", lines);
  return out;
}

json ConfigEcho(const RunEditOptions& o, const std::string& source, const std::string& target) {
  const EditConfig& c = o.config;
  json j{{"direction", DirectionName(o.direction)},
         {"mode", EditModeName(c.mode)},
         {"fill", {c.fill.r, c.fill.g, c.fill.b}},
         {"occlusion_tolerance", c.occlusion_tolerance},
         {"ik",
          {{"damping", c.ik.damping},
           {"tol_pos", c.ik.tol_pos},
           {"tol_rot", c.ik.tol_rot},
           {"max_iters", c.ik.max_iters},
           {"step_scale", c.ik.step_scale},
           {"max_restarts", c.ik.max_restarts},
           {"stall_iters", c.ik.stall_iters},
           {"restart_seed", c.ik.restart_seed}}},
         {"source", source},
         {"target", target}};
  if (o.noise) {
    j["noise"] = {{"sigma_translation", o.noise->sigma_translation},
                  {"sigma_rotation", o.noise->sigma_rotation},
                  {"seed", o.noise->seed}};
  }
  return j;
}

struct ResolvedRobots {
  Embodiment active;
  Embodiment virtual_robot;
  Transform calib_active;
  Transform calib_virtual;
};

ResolvedRobots ResolveRobots(const Dataset& ds, Direction direction, const std::string& source,
                             const std::string& target, EditMode mode,
                             const std::optional<CalibrationNoiseSpec>& noise) {
  const std::string& active_name = direction == Direction::kTrain ? source : target;
  const std::string& virtual_name = direction == Direction::kTrain ? target : source;
  if (ds.manifest().recorded_on != active_name) {
    SchemaError("dataset was recorded on '" + ds.manifest().recorded_on + "' but the " +
                std::string(DirectionName(direction)) + " direction needs '" + active_name + "'");
  }
  ResolvedRobots r;
  r.active = ds.LoadEmbodiment(active_name);
  if (mode == EditMode::kShadow) r.virtual_robot = ds.LoadEmbodiment(virtual_name);
  r.calib_active = ds.calibration().Extrinsics(active_name);
  r.calib_virtual = ds.calibration().Extrinsics(virtual_name);
  if (noise) {
    std::tie(r.calib_active, r.calib_virtual) =
        MiscalibrateCamera(r.calib_active, r.calib_virtual, *noise);
  }
  return r;
}

}  // namespace

EditReport RunEdit(const Dataset& dataset, const fs::path& out_dir, const RunEditOptions& options) {
  const std::string source =
      options.source.empty() ? dataset.manifest().source_robot : options.source;
  const std::string target =
      options.target.empty() ? dataset.manifest().target_robot : options.target;
  const ResolvedRobots robots = ResolveRobots(dataset, options.direction, source, target,
                                              options.config.mode, options.noise);

  fs::create_directories(out_dir);
  DatasetManifest manifest = dataset.manifest();
  manifest.calibration = "calib.json";
  for (auto& [name, r] : manifest.robots) {
    r.urdf = fs::absolute(Resolve(dataset.root(), r.urdf)).lexically_normal();
    if (!r.gripper_urdf.empty()) {
      r.gripper_urdf = fs::absolute(Resolve(dataset.root(), r.gripper_urdf)).lexically_normal();
    }
    if (!r.assets.empty()) {
      r.assets = fs::absolute(Resolve(dataset.root(), r.assets)).lexically_normal();
    }
  }
  WriteDatasetHeader(out_dir, manifest, dataset.calibration());

  EditContext ctx{&dataset,          out_dir,
                  options.direction, options.config,
                  &robots.active,    &robots.virtual_robot,
                  robots.calib_active, robots.calib_virtual,
                  dataset.calibration().camera};

  const std::size_t n = dataset.size();
  std::vector<TrajectoryOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = EditTrajectory(ctx, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(std::max<std::size_t>(n, 1))));
  std::vector<std::thread> pool;
  for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EditReport report;
  report.config = ConfigEcho(options, source, target);
  std::vector<double> times;
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectoryOutcome& o = outcomes[i];
    report.frames_processed += o.processed;
    report.frames_edited += o.edited;
    report.frames_skipped += o.skipped;
    report.ik_failures += o.ik_failures;
    if (!o.ik_failure_frames.empty()) {
      report.ik_failure_frames[dataset.manifest().trajectories[i]] = o.ik_failure_frames;
    }
    report.issues.insert(report.issues.end(), o.issues.begin(), o.issues.end());
    times.insert(times.end(), o.frame_ms.begin(), o.frame_ms.end());
  }
  if (!times.empty()) {
    double sum = 0.0;
    for (double t : times) sum += t;
    report.mean_frame_ms = sum / times.size();
    std::sort(times.begin(), times.end());
    const std::size_t idx =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(times.size()))) - 1;
    report.p95_frame_ms = times[std::min(idx, times.size() - 1)];
  }
  WriteTextFile(out_dir / "report.json", report.ToJson(options.record_timing).dump(2) + "\n");
  return report;
}

FrameEditor FrameEditor::Open(const fs::path& manifest_path, Direction direction,
                              const EditConfig& config, std::optional<CalibrationNoiseSpec> noise) {
  const Dataset ds = Dataset::Load(manifest_path);
  ResolvedRobots r = ResolveRobots(ds, direction, ds.manifest().source_robot,
                                   ds.manifest().target_robot, config.mode, noise);
  FrameEditor editor;
  editor.active_ = std::move(r.active);
  editor.virtual_ = std::move(r.virtual_robot);
  editor.calib_active_ = r.calib_active;
  editor.calib_virtual_ = r.calib_virtual;
  editor.camera_ = ds.calibration().camera;
  editor.config_ = config;
  return editor;
}

FrameEditor::Output FrameEditor::Edit(std::span<const std::uint8_t> pixels, int width, int height,
                                      int channels, const JointState& joints,
                                      const std::optional<JointState>& seed) const {
  const std::size_t expected = static_cast<std::size_t>(camera_.width()) * camera_.height() * 3;
  if (channels != 3 || width != camera_.width() || height != camera_.height() ||
      pixels.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(expected) + " bytes (" +
                    std::to_string(camera_.width()) + "x" + std::to_string(camera_.height()) +
                    "x3), got " + std::to_string(pixels.size()) + " bytes as " +
                    std::to_string(width) + "x" + std::to_string(height) + "x" +
                    std::to_string(channels));
  }
  Output out;
  if (config_.mode == EditMode::kNone) {
    out.edited.assign(pixels.begin(), pixels.end());
    out.mask.assign(static_cast<std::size_t>(width) * height, 0);
    return out;
  }
  Frame frame;
  frame.image.width = width;
  frame.image.height = height;
  frame.image.rgb.assign(pixels.begin(), pixels.end());
  frame.joints = joints;
  const bool shadow = config_.mode == EditMode::kShadow;
  const JointState s = seed ? *seed : (shadow ? MidRange(virtual_) : JointState{});
  CompositeResult r =
      EditFrame(frame, active_, virtual_, calib_active_, calib_virtual_, camera_, config_, s);
  out.edited = std::move(r.edited.rgb);
  const Mask composite = r.active_mask.Union(r.virtual_mask);
  out.mask = composite.bits;
  out.virtual_q = r.virtual_q;
  out.ik_converged = r.ik_converged;
  return out;
}

}  // namespace shadowkit
