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

#ifndef SHADOWKIT_TOY_TRANSFER_H_
#define SHADOWKIT_TOY_TRANSFER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "shadowkit/compose.h"
#include "shadowkit/mlp.h"
#include "shadowkit/toy_world.h"

namespace shadowkit {

// Grayscale in [0, 1] averaged over factor x factor blocks, row-major.
Eigen::VectorXd ObservationFeatures(const Image& image, int factor);

// Per-feature standardization fitted on the training inputs. Features that
// barely vary keep a scale of at least `floor`.
struct InputNormalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static InputNormalizer Identity(Eigen::Index size);
  static InputNormalizer Fit(const Eigen::MatrixXd& x, double floor = 0.05);
  Eigen::VectorXd Apply(const Eigen::VectorXd& v) const;
  void ApplyInPlace(Eigen::MatrixXd& x) const;
};

// Behavior-cloned policy over a stack of downsampled observations, oldest
// first. Outputs are the end-effector step in units of max_step and the
// engage command.
class MlpPolicy {
 public:
  MlpPolicy(Mlp net, int stack, int down_width, int down_height, double max_step,
            std::optional<InputNormalizer> normalizer = std::nullopt);

  const Mlp& net() const { return net_; }
  int stack() const { return stack_; }
  int input_size() const { return stack_ * down_width_ * down_height_; }
  ToyAction Act(const Eigen::VectorXd& stacked) const;
  // Inverse of the output scaling: the training label of an action.
  Eigen::Vector3d Label(const ToyAction& a) const;

 private:
  Mlp net_;
  int stack_;
  int down_width_;
  int down_height_;
  double max_step_;
  InputNormalizer normalizer_;
};

// Closed-loop controller. `features` is the stacked observation; `state`
// is the true simulator state, used only by scripted reference policies.
using ToyPolicy = std::function<ToyAction(const Eigen::VectorXd& features, const ToyState& state)>;

struct NoiseLevel {
  double sigma_translation = 0.0;  // meters
  double sigma_rotation_deg = 0.0;

  bool zero() const { return sigma_translation == 0.0 && sigma_rotation_deg == 0.0; }
};

struct ObservationConfig {
  int stack = 2;
  int downsample = 2;
};

// Edits a rendered toy frame of the active robot. kShadow places the other
// robot as the virtual one; `virtual_seed` carries the IK warm start and is
// advanced on convergence.
Image EditToyFrame(const ToyWorld& world, const Image& image, ToyRobot active,
                   const JointState& q, EditMode mode, const Transform& calib_active,
                   const Transform& calib_virtual, JointState& virtual_seed);

struct EvalSpec {
  ToyRobot robot = ToyRobot::kSource;
  EditMode mode = EditMode::kNone;
  NoiseLevel noise;
  ObservationConfig observation;
  int episodes = 50;
  std::uint64_t seed = 0;
  int jobs = 1;
  // Frames of episode 0 kept for a preview strip; 0 keeps none.
  int strip_frames = 0;
};

struct EvalResult {
  int successes = 0;
  int episodes = 0;
  double rate() const { return episodes == 0 ? 0.0 : static_cast<double>(successes) / episodes; }
  std::vector<Image> strip;
};

// Rolls `policy` out on spec.robot. The source robot is edited in the train
// direction (target virtual), the target in the eval direction (source
// virtual). Calibration noise miscalibrates the camera once per episode.
// Episode i draws its scene from MixSeed(seed, i), so cells sharing a seed
// see the same scenes.
EvalResult Evaluate(const ToyWorld& world, const ToyPolicy& policy, const EvalSpec& spec);

struct ZTest {
  double z = 0.0;
  double p_two_sided = 1.0;
};

// Pooled two-proportion z-test. Throws Error(kDegenerateSample) when a
// sample is empty and Error(kInvalidArgument) when s > n or s < 0.
ZTest TwoProportionZTest(int s1, int n1, int s2, int n2);

struct ToyExperimentConfig {
  ToyWorldConfig world = ToyWorldConfig::Default();
  int demos = 1500;
  double demo_action_noise = 0.02;
  double input_scale_floor = 0.05;
  ObservationConfig observation;
  TrainConfig train;
  int episodes = 50;
  std::uint64_t seed = 7;
  std::vector<NoiseLevel> noise_levels{{0.0, 0.0}, {0.01, 5.0}, {0.02, 10.0}};
  int jobs = 1;
  int strip_frames = 12;

  static ToyExperimentConfig Default() { return {}; }
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static ToyExperimentConfig FromJson(const nlohmann::json& j);
};

struct ToyCell {
  EditMode mode = EditMode::kNone;
  ToyRobot robot = ToyRobot::kSource;
  NoiseLevel noise;
  int successes = 0;
  int episodes = 0;
  double rate() const { return episodes == 0 ? 0.0 : static_cast<double>(successes) / episodes; }
  std::string Name() const;
};

struct ToyComparison {
  std::string name;
  std::string a;
  std::string b;
  std::optional<ZTest> test;  // empty when a cell has no episodes
};

struct ToyExperimentReport {
  ToyExperimentConfig config;
  int demo_frames = 0;
  int expert_resamples = 0;
  std::map<std::string, double> train_loss;  // per edit mode
  std::vector<ToyCell> cells;        // mode x robot, exact calibration
  std::vector<ToyCell> noise_sweep;  // shadow on the target per noise level
  std::vector<ToyComparison> comparisons;
  std::map<std::string, std::vector<Image>> strips;  // by cell name

  const ToyCell& Cell(EditMode mode, ToyRobot robot) const;
  nlohmann::json ToJson() const;
  std::string Table() const;
};

// Expert demos on the source, one policy per edit mode trained on the
// correspondingly edited demos, each evaluated on both robots, plus a
// calibration-noise sweep of the shadow policy on the target.
ToyExperimentReport RunExperiment(const ToyExperimentConfig& config);

}  // namespace shadowkit

#endif  // SHADOWKIT_TOY_TRANSFER_H_
