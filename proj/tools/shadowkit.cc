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

// Command-line front end: dataset editing, validation, IK and mask
// rendering probes, and the toy transfer experiment.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shadowkit/compose.h"
#include "shadowkit/error.h"
#include "shadowkit/image.h"
#include "shadowkit/json_io.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/pipeline.h"
#include "shadowkit/render.h"
#include "shadowkit/toy_transfer.h"
#include "shadowkit/toy_world.h"
#include "shadowkit/urdf.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shadowkit;

namespace {

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "not a number: '" + item + "'");
    }
  }
  return out;
}

// "x,y,z" or "x,y,z,qw,qx,qy,qz".
Transform ParsePose(const std::string& text) {
  const std::vector<double> v = ParseList(text);
  if (v.size() != 3 && v.size() != 7) {
    throw Error(ErrorCode::kInvalidArgument, "pose needs 3 or 7 comma-separated numbers");
  }
  const Eigen::Vector3d t(v[0], v[1], v[2]);
  if (v.size() == 3) return Transform::FromTranslation(t);
  return Transform(Eigen::Quaterniond(v[3], v[4], v[5], v[6]), t);
}

// Comma-separated values, a JSON array, a {"q": [...], "aperture": a}
// object, or a file holding either JSON form.
JointState ParseJoints(const std::string& text, double aperture) {
  JointState q;
  q.aperture = aperture;
  if (text.empty()) return q;
  std::string doc = text;
  if (text.front() != '[' && text.front() != '{' && std::filesystem::is_regular_file(text)) {
    doc = ReadTextFile(text);
  }
  const std::size_t first = doc.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || (doc[first] != '[' && doc[first] != '{')) {
    q.values = ParseList(text);
    return q;
  }
  const json j = json::parse(doc, nullptr, false);
  if (j.is_array()) {
    q.values = j.get<std::vector<double>>();
  } else if (j.is_object() && j.contains("q") && j["q"].is_array()) {
    q.values = j["q"].get<std::vector<double>>();
    if (j.contains("aperture")) q.aperture = j["aperture"].get<double>();
  } else {
    throw Error(ErrorCode::kInvalidArgument, "joints must be a list, a JSON array or {\"q\": [...]}");
  }
  return q;
}

Embodiment LoadRobot(const std::string& urdf, const std::string& assets, const std::string& tcp,
                     const std::string& flange) {
  const RobotModel arm = LoadUrdf(urdf, assets);
  return MakeEmbodiment(arm, tcp.empty() ? Transform() : ParsePose(tcp), flange);
}

int RunEditCommand(const std::string& manifest, const std::string& direction,
                   const std::string& mode, const std::string& source, const std::string& target,
                   double sigma_t, double sigma_r_deg, std::uint64_t seed, int jobs,
                   const std::string& out, bool timing) {
  const Dataset ds = Dataset::Load(manifest);
  RunEditOptions o;
  o.direction = ParseDirection(direction);
  o.config.mode = ParseEditMode(mode);
  o.source = source;
  o.target = target;
  o.jobs = jobs;
  o.record_timing = timing;
  if (sigma_t != 0.0 || sigma_r_deg != 0.0) {
    o.noise = CalibrationNoiseSpec{sigma_t, sigma_r_deg * std::numbers::pi / 180.0, seed};
    o.noise->Validate();
  }
  const EditReport r = RunEdit(ds, out, o);
  std::printf("processed %zu  edited %zu  skipped %zu  ik_failures %zu\n", r.frames_processed,
              r.frames_edited, r.frames_skipped, r.ik_failures);
  return 0;
}

int RunValidate(const std::string& manifest) {
  const Dataset ds = Dataset::Load(manifest);
  for (const auto& [name, spec] : ds.manifest().robots) {
    const Embodiment e = ds.LoadEmbodiment(name);
    std::printf("robot %-16s dof %d  triangles %zu\n", name.c_str(), e.dof(),
                e.model().TriangleCount());
    ds.calibration().Extrinsics(name);
  }
  std::printf("trajectories %zu  frames %zu\n", ds.size(), ds.total_frames());
  return 0;
}

int RunIk(const std::string& urdf, const std::string& assets, const std::string& tcp,
          const std::string& flange, const std::string& target, const std::string& seed) {
  const Embodiment e = LoadRobot(urdf, assets, tcp, flange);
  const JointState start = seed.empty() ? MidRange(e) : ParseJoints(seed, 0.0);
  const IkResult r = SolveIk(e, ParsePose(target), start, IkParams{});
  json j{{"q", r.q.values},
         {"converged", r.converged},
         {"iterations", r.iters},
         {"residual_pos", r.residual_pos},
         {"residual_rot", r.residual_rot}};
  std::cout << j.dump(2) << "\n";
  return r.converged ? 0 : 3;
}

int RunRenderMask(const std::string& urdf, const std::string& assets, const std::string& tcp,
                  const std::string& flange, const std::string& joints, const std::string& calib,
                  const std::string& robot_name, const std::string& out, const std::string& depth) {
  const Embodiment e = LoadRobot(urdf, assets, tcp, flange);
  const Calibration c =
      !calib.empty() && calib.front() == '{' ? ParseCalibration(calib) : LoadCalibration(calib);
  const JointState q = ParseJoints(joints, 0.0);
  const RenderResult r = RenderRobot(e, q, c.camera, c.Extrinsics(robot_name));
  WriteTextFile(out, EncodeMaskPng(r.mask));
  if (!depth.empty()) WriteTextFile(depth, EncodeDepthPng(r.depth));
  std::printf("%zu pixels\n", r.mask.Count());
  return 0;
}

Image Strip(const std::vector<Image>& frames) {
  Image out;
  if (frames.empty()) return out;
  const int w = frames[0].width;
  const int h = frames[0].height;
  out.width = w * static_cast<int>(frames.size());
  out.height = h;
  out.rgb.resize(static_cast<std::size_t>(out.width) * h * 3);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.set(static_cast<int>(f) * w + x, y, frames[f].at(x, y));
    }
  }
  return out;
}

int RunToy(const std::string& config_path, const std::string& out, int jobs) {
  ToyExperimentConfig cfg;
  if (!config_path.empty()) {
    try {
      cfg = ToyExperimentConfig::FromJson(json::parse(ReadTextFile(config_path)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kSchemaError, std::string("toy config is not JSON: ") + e.what());
    }
  }
  if (jobs > 0) cfg.jobs = jobs;
  const ToyExperimentReport report = RunExperiment(cfg);
  fs::create_directories(fs::path(out) / "strips");
  WriteTextFile(fs::path(out) / "report.json", report.ToJson().dump(2) + "\n");
  const std::string table = report.Table();
  WriteTextFile(fs::path(out) / "table.txt", table);
  for (const auto& [name, frames] : report.strips) {
    if (!frames.empty()) WritePng(fs::path(out) / "strips" / (name + ".png"), Strip(frames));
  }
  std::fputs(table.c_str(), stdout);
  return 0;
}

int RunToyDataset(const std::string& config_path, const std::string& robot, const std::string& out,
                  int trajectories, int frames, std::uint64_t seed, bool depth) {
  ToyWorldConfig cfg = ToyWorldConfig::Default();
  if (!config_path.empty()) cfg = ToyWorldConfig::FromJson(json::parse(ReadTextFile(config_path)));
  ToyRobot r;
  if (robot == "source") {
    r = ToyRobot::kSource;
  } else if (robot == "target") {
    r = ToyRobot::kTarget;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "robot must be 'source' or 'target'");
  }
  ExportToyDataset(ToyWorld(cfg), r, out, trajectories, frames, seed, depth);
  std::printf("wrote %d trajectories of %d frames to %s\n", trajectories, frames, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shadowkit: cross-embodiment image editing for robot datasets"};
  app.set_version_flag("--version", "shadowkit 0.1.0");
  app.require_subcommand(1);

  std::string manifest, direction = "train", mode = "shadow", source, target, out;
  double sigma_t = 0.0, sigma_r = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool timing = false;
  CLI::App* edit = app.add_subcommand("edit", "edit every frame of a dataset");
  edit->add_option("--manifest", manifest, "dataset manifest.json")->required();
  edit->add_option("--direction", direction, "train|eval")->check(CLI::IsMember({"train", "eval"}));
  edit->add_option("--mode", mode, "shadow|black_only|none")
      ->check(CLI::IsMember({"shadow", "black_only", "none"}));
  edit->add_option("--source", source, "source robot name (default: manifest)");
  edit->add_option("--target", target, "target robot name (default: manifest)");
  edit->add_option("--noise-sigma-t", sigma_t, "extrinsic translation noise, meters");
  edit->add_option("--noise-sigma-r", sigma_r, "extrinsic rotation noise, degrees");
  edit->add_option("--seed", seed, "noise seed");
  edit->add_option("--jobs", jobs, "parallel trajectories")->check(CLI::PositiveNumber);
  edit->add_option("-o,--out", out, "output directory")->required();
  edit->add_flag("--timing", timing, "record per-frame timing in report.json");

  CLI::App* validate = app.add_subcommand("validate", "check a dataset and its robots");
  validate->add_option("--manifest", manifest, "dataset manifest.json")->required();

  std::string urdf, assets, tcp, flange, pose, joints, calib, robot_name, depth_out;
  CLI::App* ik = app.add_subcommand("ik", "solve IK for one end-effector pose");
  ik->add_option("--robot", urdf, "arm URDF")->required();
  ik->add_option("--assets", assets, "mesh root (default: URDF directory)");
  ik->add_option("--tcp", tcp, "tcp offset in the flange frame, x,y,z[,qw,qx,qy,qz]");
  ik->add_option("--flange", flange, "flange link (default: deepest leaf)");
  ik->add_option("--target", pose, "x,y,z[,qw,qx,qy,qz] in the base frame")->required();
  ik->add_option("--seed", joints, "comma-separated seed joint values");

  CLI::App* render = app.add_subcommand("render-mask", "render a robot segmentation mask");
  render->add_option("--robot", urdf, "arm URDF")->required();
  render->add_option("--assets", assets, "mesh root (default: URDF directory)");
  render->add_option("--tcp", tcp, "tcp offset in the flange frame");
  render->add_option("--flange", flange, "flange link (default: deepest leaf)");
  render->add_option("--q", joints, "joint values: JSON array, JSON file or comma list")->required();
  render->add_option("--calib", calib, "calibration JSON file or inline JSON")->required();
  render->add_option("--robot-name", robot_name, "extrinsics key in the calibration")->required();
  render->add_option("-o,--out", out, "mask PNG")->required();
  render->add_option("--depth", depth_out, "optional 16-bit depth PNG");

  std::string config;
  CLI::App* toy = app.add_subcommand("toy", "run the toy transfer experiment");
  toy->add_option("--config", config, "experiment JSON (default: built-in)");
  toy->add_option("-o,--out", out, "report directory")->required();
  toy->add_option("--jobs", jobs, "parallel evaluation episodes")->check(CLI::PositiveNumber);

  std::string robot = "source";
  int trajectories = 10, frames = 40;
  bool with_depth = false;
  CLI::App* toy_data = app.add_subcommand("toy-dataset", "write expert demos as a dataset");
  toy_data->add_option("--config", config, "toy world JSON (default: built-in)");
  toy_data->add_option("--robot", robot, "source|target");
  toy_data->add_option("--trajectories", trajectories, "trajectory count");
  toy_data->add_option("--frames", frames, "frames per trajectory");
  toy_data->add_option("--seed", seed, "scene seed");
  toy_data->add_flag("--depth", with_depth, "also write scene depth");
  toy_data->add_option("-o,--out", out, "dataset directory")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*edit) {
      return RunEditCommand(manifest, direction, mode, source, target, sigma_t, sigma_r, seed, jobs,
                            out, timing);
    }
    if (*validate) return RunValidate(manifest);
    if (*ik) return RunIk(urdf, assets, tcp, flange, pose, joints);
    if (*render) {
      return RunRenderMask(urdf, assets, tcp, flange, joints, calib, robot_name, out, depth_out);
    }
    if (*toy) return RunToy(config, out, toy->count("--jobs") ? jobs : 0);
    if (*toy_data) {
      return RunToyDataset(config, robot, out, trajectories, frames, seed, with_depth);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
