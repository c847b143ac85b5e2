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

#ifndef SHADOWKIT_PIPELINE_H_
#define SHADOWKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shadowkit/compose.h"
#include "shadowkit/geometry.h"
#include "shadowkit/json_io.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/robot_model.h"

namespace shadowkit {

// Dataset layout:
//   <root>/manifest.json
//   <root>/calib.json
//   <root>/traj_<id>/states.jsonl     one JSON object per frame
//   <root>/traj_<id>/frame_<t>.png    RGB observation
//   <root>/traj_<id>/depth_<t>.png    optional 16-bit depth in millimeters
//
// states.jsonl line:
//   {"t": 3, "q": [...], "aperture": 0.0,
//    "action": {"ee": <pose>, "aperture": 0.0}}
// Optional "frame" / "depth" keys override the default file names.

// How to build an embodiment; paths are relative to the manifest directory.
struct RobotSpec {
  std::filesystem::path urdf;
  std::filesystem::path gripper_urdf;  // empty: no gripper
  std::filesystem::path assets;        // empty: the URDF's directory
  Transform mount;
  Transform tcp;
  std::string flange;  // empty: deepest arm leaf
};

struct DatasetManifest {
  std::string name;
  std::string source_robot;
  std::string target_robot;
  // Robot physically present in the recordings; defaults to source_robot.
  std::string recorded_on;
  std::filesystem::path calibration = "calib.json";
  std::vector<std::string> trajectories;  // directory names under the root
  std::string image_format = "png";
  bool has_depth = false;
  std::map<std::string, RobotSpec> robots;

  nlohmann::json ToJson() const;
  // Throws Error(kSchemaError).
  static DatasetManifest FromJson(const nlohmann::json& j);
};

struct Action {
  Transform ee;            // absolute end-effector pose in the recording robot's base frame
  double aperture = 0.0;   // gripper command in [0, 1]
};

struct StateRecord {
  std::int64_t t = 0;
  JointState joints;
  Action action;
  std::string frame_file;
  std::string depth_file;  // empty when absent
  nlohmann::json raw;      // the parsed line, passed through on export
};

struct TrajectoryRecord {
  std::string trajectory_id;
  std::vector<Frame> frames;
  std::vector<Action> actions;

  std::size_t length() const { return frames.size(); }
};

std::string FrameFileName(std::int64_t t);
std::string DepthFileName(std::int64_t t);
nlohmann::json StateToJson(const StateRecord& s);

// A dataset on disk whose metadata is loaded eagerly and whose images are
// decoded on demand.
class Dataset {
 public:
  // Validates the manifest schema, the calibration and the existence of
  // every referenced file. Throws Error(kMissingFile) naming the first
  // absent path, or Error(kSchemaError).
  static Dataset Load(const std::filesystem::path& manifest_path);

  const DatasetManifest& manifest() const { return manifest_; }
  const Calibration& calibration() const { return calibration_; }
  const std::filesystem::path& root() const { return root_; }
  std::size_t size() const { return states_.size(); }
  std::size_t total_frames() const;
  const std::vector<StateRecord>& states(std::size_t traj) const { return states_[traj]; }
  std::filesystem::path trajectory_dir(std::size_t traj) const;

  // Throws Error(kImageDecodeError) or Error(kMissingFile).
  Frame LoadFrame(std::size_t traj, std::size_t k) const;
  TrajectoryRecord LoadTrajectory(std::size_t traj) const;
  // Parses the robot's URDF(s). Throws Error(kSchemaError) for unknown names.
  Embodiment LoadEmbodiment(const std::string& robot) const;

 private:
  DatasetManifest manifest_;
  Calibration calibration_;
  std::filesystem::path root_;
  std::vector<std::vector<StateRecord>> states_;
};

// Writes a trajectory directory (images, optional depth, states.jsonl).
void WriteTrajectory(const std::filesystem::path& dir, const TrajectoryRecord& record);
// Writes manifest.json and calib.json under `root`.
void WriteDatasetHeader(const std::filesystem::path& root, const DatasetManifest& manifest,
                        const Calibration& calibration);

enum class Direction { kTrain, kEval };
std::string_view DirectionName(Direction d);
Direction ParseDirection(std::string_view name);

struct RunEditOptions {
  Direction direction = Direction::kTrain;
  EditConfig config;
  // Camera miscalibration applied once per run.
  std::optional<CalibrationNoiseSpec> noise;
  int jobs = 1;
  // Override the manifest's robot names when non-empty.
  std::string source;
  std::string target;
  // Adds wall-clock statistics to report.json. Off by default so that
  // output trees are reproducible byte for byte.
  bool record_timing = false;
};

struct FrameIssue {
  std::string trajectory_id;
  std::int64_t t = 0;
  std::string error;
};

struct EditReport {
  std::size_t frames_processed = 0;
  std::size_t frames_edited = 0;
  std::size_t frames_skipped = 0;
  std::size_t ik_failures = 0;
  std::map<std::string, std::vector<std::int64_t>> ik_failure_frames;
  std::vector<FrameIssue> issues;
  double mean_frame_ms = 0.0;
  double p95_frame_ms = 0.0;
  nlohmann::json config;

  nlohmann::json ToJson(bool include_timing) const;
};

// Camera extrinsics after a single camera-pose error: the noise is drawn
// for the virtual robot's calibration and the same camera-side correction
// is applied to the active robot's calibration.
std::pair<Transform, Transform> MiscalibrateCamera(const Transform& calib_active,
                                                   const Transform& calib_virtual,
                                                   const CalibrationNoiseSpec& noise);

// Edits every frame of `dataset` into `out_dir`, mirroring the input layout
// and adding active_mask_<t>.png / virtual_mask_<t>.png sidecars and
// report.json. Trajectories run in parallel; frames within a trajectory run
// in order so each IK solve is seeded with the previous solution. Per-frame
// failures are recorded and skipped; I/O and schema errors throw.
//
// IK failures skip the frame in the train direction and reuse the last
// converged virtual joint state in the eval direction.
EditReport RunEdit(const Dataset& dataset, const std::filesystem::path& out_dir,
                   const RunEditOptions& options);

// Byte-buffer front end for foreign callers. Immutable after Open().
class FrameEditor {
 public:
  static FrameEditor Open(const std::filesystem::path& manifest_path, Direction direction,
                          const EditConfig& config,
                          std::optional<CalibrationNoiseSpec> noise = std::nullopt);

  struct Output {
    std::vector<std::uint8_t> edited;  // width * height * 3
    std::vector<std::uint8_t> mask;    // width * height, 1 where filled
    JointState virtual_q;
    bool ik_converged = true;
  };

  // `pixels` is row-major RGB. Throws Error(kDimensionMismatch) naming the
  // expected byte count when the buffer does not match. `seed` defaults to
  // the virtual robot's mid-range posture.
  Output Edit(std::span<const std::uint8_t> pixels, int width, int height, int channels,
              const JointState& joints, const std::optional<JointState>& seed = {}) const;

  const Embodiment& active() const { return active_; }
  const Embodiment& virtual_robot() const { return virtual_; }

 private:
  Embodiment active_;
  Embodiment virtual_;
  Transform calib_active_;
  Transform calib_virtual_;
  Camera camera_;
  EditConfig config_;
};

}  // namespace shadowkit

#endif  // SHADOWKIT_PIPELINE_H_
