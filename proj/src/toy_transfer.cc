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

#include "shadowkit/toy_transfer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <deque>
#include <thread>

#include "shadowkit/error.h"
#include "shadowkit/pipeline.h"

namespace shadowkit {

using nlohmann::json;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

ToyRobot Other(ToyRobot r) { return r == ToyRobot::kSource ? ToyRobot::kTarget : ToyRobot::kSource; }

// Oldest-first concatenation of the last `stack` observations; the first
// observation of an episode fills the whole stack.
class FrameStack {
 public:
  explicit FrameStack(int stack) : stack_(stack) {}

  Eigen::VectorXd Push(Eigen::VectorXd f) {
    if (frames_.empty()) {
      for (int i = 0; i < stack_; ++i) frames_.push_back(f);
    } else {
      frames_.pop_front();
      frames_.push_back(std::move(f));
    }
    const Eigen::Index n = frames_.front().size();
    Eigen::VectorXd out(n * stack_);
    for (int i = 0; i < stack_; ++i) out.segment(i * n, n) = frames_[i];
    return out;
  }

 private:
  int stack_;
  std::deque<Eigen::VectorXd> frames_;
};

std::vector<Image> Subsample(std::vector<Image> frames, int keep) {
  if (keep <= 0 || static_cast<int>(frames.size()) <= keep) return frames;
  std::vector<Image> out;
  for (int i = 0; i < keep; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i) * (frames.size() - 1) / (keep - 1);
    out.push_back(frames[idx]);
  }
  return out;
}

json NoiseToJson(const NoiseLevel& n) {
  return {{"sigma_translation", n.sigma_translation}, {"sigma_rotation_deg", n.sigma_rotation_deg}};
}

std::string FormatNoise(const NoiseLevel& n) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%gm_%gdeg", n.sigma_translation, n.sigma_rotation_deg);
  return buf;
}

}  // namespace

Eigen::VectorXd ObservationFeatures(const Image& image, int factor) {
  if (factor < 1 || image.width % factor != 0 || image.height % factor != 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be a multiple of the downsample factor");
  }
  const int w = image.width / factor;
  const int h = image.height / factor;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w) * h);
  const double scale = 1.0 / (255.0 * factor * factor);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Rgb c = image.at(x, y);
      const double gray = 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
      out[static_cast<Eigen::Index>(y / factor) * w + x / factor] += gray * scale;
    }
  }
  return out;
}

InputNormalizer InputNormalizer::Identity(Eigen::Index size) {
  return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Ones(size)};
}

InputNormalizer InputNormalizer::Fit(const Eigen::MatrixXd& x, double floor) {
  if (!(floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scale floor must be positive");
  if (x.cols() == 0) return Identity(x.rows());
  InputNormalizer n;
  n.mean = x.rowwise().mean();
  n.scale = (x.colwise() - n.mean).array().square().rowwise().mean().sqrt().max(floor).matrix();
  return n;
}

Eigen::VectorXd InputNormalizer::Apply(const Eigen::VectorXd& v) const {
  return ((v - mean).array() / scale.array()).matrix();
}

void InputNormalizer::ApplyInPlace(Eigen::MatrixXd& x) const {
  x = ((x.colwise() - mean).array().colwise() / scale.array()).matrix();
}

MlpPolicy::MlpPolicy(Mlp net, int stack, int down_width, int down_height, double max_step,
                     std::optional<InputNormalizer> normalizer)
    : net_(std::move(net)),
      stack_(stack),
      down_width_(down_width),
      down_height_(down_height),
      max_step_(max_step) {
  if (stack < 1 || down_width < 1 || down_height < 1 || !(max_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid policy input layout");
  }
  if (net_.input_size() != input_size() || net_.output_size() != 3) {
    throw Error(ErrorCode::kDimensionMismatch,
                "policy network must map " + std::to_string(input_size()) + " inputs to 3 outputs");
  }
  if (!net_.AllFinite()) throw Error(ErrorCode::kInvalidArgument, "policy weights are not finite");
  normalizer_ = normalizer ? std::move(*normalizer) : InputNormalizer::Identity(input_size());
  if (normalizer_.mean.size() != input_size() || normalizer_.scale.size() != input_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "normalizer size differs from policy input size");
  }
  if ((normalizer_.scale.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "normalizer scale must be positive");
  }
}

ToyAction MlpPolicy::Act(const Eigen::VectorXd& stacked) const {
  if (stacked.size() != input_size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "policy expects " + std::to_string(input_size()) + " features");
  }
  const Eigen::VectorXd out = net_.ForwardOne(normalizer_.Apply(stacked));
  ToyAction a;
  a.delta = out.head<2>() * max_step_;
  a.engage = out[2];
  return a;
}

Eigen::Vector3d MlpPolicy::Label(const ToyAction& a) const {
  return {a.delta.x() / max_step_, a.delta.y() / max_step_, a.engage};
}

Image EditToyFrame(const ToyWorld& world, const Image& image, ToyRobot active, const JointState& q,
                   EditMode mode, const Transform& calib_active, const Transform& calib_virtual,
                   JointState& virtual_seed) {
  if (mode == EditMode::kNone) return image;
  Frame frame;
  frame.image = image;
  frame.joints = q;
  EditConfig cfg;
  cfg.fill = world.config().fill;
  cfg.mode = mode;
  cfg.ik = world.config().ik;
  CompositeResult r = EditFrame(frame, world.embodiment(active), world.embodiment(Other(active)),
                                calib_active, calib_virtual, world.camera(), cfg, virtual_seed);
  if (mode == EditMode::kShadow) virtual_seed = r.virtual_q;
  return std::move(r.edited);
}

EvalResult Evaluate(const ToyWorld& world, const ToyPolicy& policy, const EvalSpec& spec) {
  if (spec.episodes < 0) throw Error(ErrorCode::kInvalidArgument, "negative episode count");
  const ToyRobot active = spec.robot;
  const ToyRobot virt = Other(active);
  const int n = spec.episodes;
  std::vector<char> success(n, 0);
  std::vector<Image> frames0;

  auto run_episode = [&](int i) {
    std::mt19937_64 rng(MixSeed(spec.seed, static_cast<std::uint64_t>(i)));
    ToyState state;
    state.scene = world.SampleScene(rng);
    state.ee = world.SampleHome(rng);
    Transform calib_active = world.extrinsics(active);
    Transform calib_virtual = world.extrinsics(virt);
    if (!spec.noise.zero()) {
      CalibrationNoiseSpec noise{spec.noise.sigma_translation,
                                 spec.noise.sigma_rotation_deg * kDegToRad,
                                 MixSeed(spec.seed ^ 0xC0FFEEULL, static_cast<std::uint64_t>(i))};
      std::tie(calib_active, calib_virtual) = MiscalibrateCamera(calib_active, calib_virtual, noise);
    }
    JointState q = world.Track(active, state.ee, MidRange(world.embodiment(active))).q;
    JointState virtual_seed = MidRange(world.embodiment(virt));
    FrameStack stack(spec.observation.stack);
    bool done = world.Success(state.scene);
    for (int t = 0; t < world.config().horizon && !done; ++t) {
      const ToyRender view = world.Render(state.scene, active, q);
      Image edited = EditToyFrame(world, view.image, active, q, spec.mode, calib_active,
                                  calib_virtual, virtual_seed);
      const Eigen::VectorXd obs = stack.Push(ObservationFeatures(edited, spec.observation.downsample));
      if (i == 0 && spec.strip_frames > 0) frames0.push_back(std::move(edited));
      const ToyAction a = policy(obs, state);
      world.Step(state, a);
      q = world.Track(active, state.ee, q).q;
      done = world.Success(state.scene);
    }
    success[i] = done ? 1 : 0;
  };

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < n; i = next++) run_episode(i);
  };
  const int jobs = std::clamp(spec.jobs, 1, std::max(n, 1));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  EvalResult result;
  result.episodes = n;
  for (char s : success) result.successes += s;
  result.strip = Subsample(std::move(frames0), spec.strip_frames);
  return result;
}

ZTest TwoProportionZTest(int s1, int n1, int s2, int n2) {
  if (n1 <= 0 || n2 <= 0) throw Error(ErrorCode::kDegenerateSample, "both samples need trials");
  if (s1 < 0 || s2 < 0 || s1 > n1 || s2 > n2) {
    throw Error(ErrorCode::kInvalidArgument, "successes must lie in [0, n]");
  }
  const double p1 = static_cast<double>(s1) / n1;
  const double p2 = static_cast<double>(s2) / n2;
  const double pooled = static_cast<double>(s1 + s2) / (n1 + n2);
  if (pooled <= 0.0 || pooled >= 1.0) return {};
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  const double z = (p1 - p2) / se;
  return {z, std::erfc(std::abs(z) / std::sqrt(2.0))};
}

json ToyExperimentConfig::ToJson() const {
  json levels = json::array();
  for (const NoiseLevel& n : noise_levels) levels.push_back(NoiseToJson(n));
  return {{"world", world.ToJson()},
          {"demos", demos},
          {"demo_action_noise", demo_action_noise},
          {"input_scale_floor", input_scale_floor},
          {"observation", {{"stack", observation.stack}, {"downsample", observation.downsample}}},
          {"train",
           {{"hidden", train.hidden},
            {"learning_rate", train.learning_rate},
            {"momentum", train.momentum},
            {"epochs", train.epochs},
            {"batch_size", train.batch_size},
            {"seed", train.seed}}},
          {"episodes", episodes},
          {"seed", seed},
          {"noise_levels", levels},
          {"strip_frames", strip_frames}};
}

ToyExperimentConfig ToyExperimentConfig::FromJson(const json& j) {
  ToyExperimentConfig c;
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "toy config must be an object");
  try {
    if (j.contains("world")) c.world = ToyWorldConfig::FromJson(j["world"]);
    c.demos = j.value("demos", c.demos);
    c.demo_action_noise = j.value("demo_action_noise", c.demo_action_noise);
    c.input_scale_floor = j.value("input_scale_floor", c.input_scale_floor);
    if (j.contains("observation")) {
      c.observation.stack = j["observation"].value("stack", c.observation.stack);
      c.observation.downsample = j["observation"].value("downsample", c.observation.downsample);
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      c.train.hidden = t.value("hidden", c.train.hidden);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.momentum = t.value("momentum", c.train.momentum);
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.seed = t.value("seed", c.train.seed);
    }
    c.episodes = j.value("episodes", c.episodes);
    c.seed = j.value("seed", c.seed);
    if (j.contains("noise_levels")) {
      c.noise_levels.clear();
      for (const json& n : j["noise_levels"]) {
        c.noise_levels.push_back({n.value("sigma_translation", 0.0), n.value("sigma_rotation_deg", 0.0)});
      }
    }
    c.jobs = j.value("jobs", c.jobs);
    c.strip_frames = j.value("strip_frames", c.strip_frames);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("toy config: ") + e.what());
  }
  if (c.demos < 1 || c.episodes < 0 || c.observation.stack < 1 || c.observation.downsample < 1) {
    throw Error(ErrorCode::kSchemaError, "toy config: demos >= 1, episodes >= 0, stack >= 1 required");
  }
  return c;
}

std::string ToyCell::Name() const {
  std::string name = std::string(EditModeName(mode)) + "_on_" + std::string(ToyRobotName(robot));
  if (!noise.zero()) name += "_noise_" + FormatNoise(noise);
  return name;
}

const ToyCell& ToyExperimentReport::Cell(EditMode mode, ToyRobot robot) const {
  for (const ToyCell& c : cells) {
    if (c.mode == mode && c.robot == robot) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "no such cell");
}

json ToyExperimentReport::ToJson() const {
  auto cell_json = [](const ToyCell& c) {
    return json{{"name", c.Name()},
                {"mode", EditModeName(c.mode)},
                {"robot", ToyRobotName(c.robot)},
                {"direction", c.robot == ToyRobot::kSource ? "train" : "eval"},
                {"noise", NoiseToJson(c.noise)},
                {"successes", c.successes},
                {"episodes", c.episodes},
                {"success_rate", c.rate()}};
  };
  json cells_json = json::array();
  for (const ToyCell& c : cells) cells_json.push_back(cell_json(c));
  json sweep_json = json::array();
  for (const ToyCell& c : noise_sweep) sweep_json.push_back(cell_json(c));
  json tests = json::array();
  for (const ToyComparison& t : comparisons) {
    json tj{{"name", t.name}, {"a", t.a}, {"b", t.b}};
    if (t.test) {
      tj["z"] = t.test->z;
      tj["p_two_sided"] = t.test->p_two_sided;
      tj["significant_at_0.05"] = t.test->p_two_sided < 0.05;
    } else {
      tj["z"] = nullptr;
      tj["p_two_sided"] = nullptr;
    }
    tests.push_back(tj);
  }
  return {{"config", config.ToJson()},
          {"demo_frames", demo_frames},
          {"expert_resamples", expert_resamples},
          {"train_loss", train_loss},
          {"episodes_per_cell", config.episodes},
          {"cells", cells_json},
          {"noise_sweep", sweep_json},
          {"z_tests", tests}};
}

std::string ToyExperimentReport::Table() const {
  std::string out;
  char line[160];
  auto rate = [&](const ToyCell& c) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f (%d/%d)", c.rate(), c.successes, c.episodes);
    return std::string(buf);
  };
  std::snprintf(line, sizeof(line), "%-12s %-18s %-18s\n", "mode", "source", "target");
  out += line;
  for (EditMode m : {EditMode::kNone, EditMode::kBlackOnly, EditMode::kShadow}) {
    std::snprintf(line, sizeof(line), "%-12s %-18s %-18s\n", std::string(EditModeName(m)).c_str(),
                  rate(Cell(m, ToyRobot::kSource)).c_str(), rate(Cell(m, ToyRobot::kTarget)).c_str());
    out += line;
  }
  out += "\nshadow on target under calibration noise\n";
  for (const ToyCell& c : noise_sweep) {
    std::snprintf(line, sizeof(line), "  %6.3f m %5.2f deg   %s\n", c.noise.sigma_translation,
                  c.noise.sigma_rotation_deg, rate(c).c_str());
    out += line;
  }
  out += "\ntwo-proportion z-tests\n";
  for (const ToyComparison& t : comparisons) {
    if (t.test) {
      std::snprintf(line, sizeof(line), "  %-40s z=%8.3f p=%.3g\n", t.name.c_str(), t.test->z,
                    t.test->p_two_sided);
    } else {
      std::snprintf(line, sizeof(line), "  %-40s (no episodes)\n", t.name.c_str());
    }
    out += line;
  }
  return out;
}

ToyExperimentReport RunExperiment(const ToyExperimentConfig& config) {
  config.train.Validate();
  const ToyWorld world(config.world);
  ToyExperimentReport report;
  report.config = config;

  ExpertOptions expert;
  expert.action_noise = config.demo_action_noise;
  std::vector<ToyDemo> demos;
  for (int i = 0; i < config.demos; ++i) {
    std::mt19937_64 rng(MixSeed(config.seed, 2 * static_cast<std::uint64_t>(i)));
    for (std::uint64_t attempt = 0;; ++attempt) {
      const ToyScene scene = world.SampleScene(rng);
      try {
        demos.push_back(ScriptedExpert(world, scene, ToyRobot::kSource,
                                       MixSeed(config.seed, 2 * static_cast<std::uint64_t>(i) + 1) + attempt,
                                       expert));
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kExpertFailed || attempt >= 100) throw;
        ++report.expert_resamples;
      }
    }
    report.demo_frames += static_cast<int>(demos.back().record.frames.size());
  }

  const int down = config.world.image_size / config.observation.downsample;
  const int inputs = config.observation.stack * down * down;
  const std::uint64_t eval_seed = MixSeed(config.seed, 0xE7A1ULL);
  auto cell_spec = [&](ToyRobot robot, EditMode mode, NoiseLevel noise) {
    EvalSpec s;
    s.robot = robot;
    s.mode = mode;
    s.noise = noise;
    s.observation = config.observation;
    s.episodes = config.episodes;
    s.seed = eval_seed;
    s.jobs = config.jobs;
    s.strip_frames = config.strip_frames;
    return s;
  };

  for (EditMode mode : {EditMode::kNone, EditMode::kBlackOnly, EditMode::kShadow}) {
    Eigen::MatrixXd x(inputs, report.demo_frames);
    Eigen::MatrixXd y(3, report.demo_frames);
    const MlpPolicy scale(Mlp::Zeros({inputs, 3}), config.observation.stack, down, down,
                          config.world.max_step);
    Eigen::Index col = 0;
    for (const ToyDemo& d : demos) {
      JointState virtual_seed = MidRange(world.embodiment(ToyRobot::kTarget));
      FrameStack stack(config.observation.stack);
      for (std::size_t k = 0; k < d.record.frames.size(); ++k) {
        const Frame& f = d.record.frames[k];
        const Image edited = EditToyFrame(world, f.image, ToyRobot::kSource, f.joints, mode,
                                          world.extrinsics(ToyRobot::kSource),
                                          world.extrinsics(ToyRobot::kTarget), virtual_seed);
        x.col(col) = stack.Push(ObservationFeatures(edited, config.observation.downsample));
        y.col(col) = scale.Label(d.labels[k]);
        ++col;
      }
    }
    InputNormalizer normalizer = InputNormalizer::Fit(x, config.input_scale_floor);
    normalizer.ApplyInPlace(x);
    TrainResult trained = TrainMlp(x, y, config.train);
    report.train_loss[std::string(EditModeName(mode))] = trained.final_loss;
    const MlpPolicy policy(std::move(trained.net), config.observation.stack, down, down,
                           config.world.max_step, std::move(normalizer));
    const ToyPolicy fn = [&policy](const Eigen::VectorXd& obs, const ToyState&) {
      return policy.Act(obs);
    };
    for (ToyRobot robot : {ToyRobot::kSource, ToyRobot::kTarget}) {
      const EvalResult r = Evaluate(world, fn, cell_spec(robot, mode, {}));
      ToyCell cell{mode, robot, {}, r.successes, r.episodes};
      report.strips[cell.Name()] = r.strip;
      report.cells.push_back(cell);
    }
    if (mode == EditMode::kShadow) {
      for (const NoiseLevel& level : config.noise_levels) {
        const EvalResult r = Evaluate(world, fn, cell_spec(ToyRobot::kTarget, mode, level));
        ToyCell cell{mode, ToyRobot::kTarget, level, r.successes, r.episodes};
        if (!level.zero()) report.strips[cell.Name()] = r.strip;
        report.noise_sweep.push_back(cell);
      }
    }
  }

  auto compare = [&](const std::string& name, const ToyCell& a, const ToyCell& b) {
    ToyComparison c{name, a.Name(), b.Name(), std::nullopt};
    if (a.episodes > 0 && b.episodes > 0) {
      c.test = TwoProportionZTest(a.successes, a.episodes, b.successes, b.episodes);
    }
    report.comparisons.push_back(c);
  };
  const ToyCell& shadow_t = report.Cell(EditMode::kShadow, ToyRobot::kTarget);
  compare("shadow_vs_black_only_on_target", shadow_t,
          report.Cell(EditMode::kBlackOnly, ToyRobot::kTarget));
  compare("shadow_vs_none_on_target", shadow_t, report.Cell(EditMode::kNone, ToyRobot::kTarget));
  compare("shadow_on_target_vs_none_on_source", shadow_t,
          report.Cell(EditMode::kNone, ToyRobot::kSource));
  compare("black_only_vs_none_on_source", report.Cell(EditMode::kBlackOnly, ToyRobot::kSource),
          report.Cell(EditMode::kNone, ToyRobot::kSource));
  if (report.noise_sweep.size() >= 2) {
    compare("noise_first_vs_last", report.noise_sweep.front(), report.noise_sweep.back());
  }
  return report;
}

}  // namespace shadowkit
