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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "kinematics_oracles.h"
#include "raster_oracle.h"
#include "shadowkit/compose.h"
#include "shadowkit/image.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/mesh.h"
#include "shadowkit/render.h"
#include "shadowkit/toy_transfer.h"
#include "shadowkit/toy_world.h"
#include "test_support.h"

namespace shadowkit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Outcome RasterOracle() {
  constexpr int kSize = 64;
  std::mt19937_64 rng(1);
  std::vector<testing::GridTriangle> tris;
  for (int i = 0; i < 200; ++i) tris.push_back(testing::RandomGridTriangle(rng, kSize));
  const auto start = Clock::now();
  Rasterizer r(Camera(CameraIntrinsics{1.0, 1.0, 0.0, 0.0, kSize, kSize}, Projection::kOrthographic));
  for (std::size_t i = 0; i < tris.size(); ++i) {
    r.Draw(tris[i].Vertex(0), tris[i].Vertex(1), tris[i].Vertex(2), static_cast<int>(i));
  }
  const testing::OracleImage oracle = testing::OracleRaster(tris, kSize);
  const double secs = Seconds(start);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < oracle.mask.size(); ++i) diff += r.mask().bits[i] != oracle.mask[i];
  return {diff == 0 && secs < 1.0,
          Format("%zu differing pixels, %.4f s including the oracle", diff, secs)};
}

Outcome FkExactness() {
  std::mt19937_64 rng(2);
  const Embodiment planar = testing::PlanarArm({0.7, 0.45});
  double planar_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const JointState q = testing::RandomJoints(planar, rng);
    const double a = q.values[0], b = q.values[1];
    const Eigen::Vector3d oracle(0.7 * std::cos(a) + 0.45 * std::cos(a + b),
                                 0.7 * std::sin(a) + 0.45 * std::sin(a + b), 0.0);
    planar_err = std::max(planar_err,
                          (ForwardKinematics(planar, q).ee.translation() - oracle).cwiseAbs().maxCoeff());
  }
  const Embodiment ur = testing::LoadFixture("ur_like.urdf");
  double ur_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const JointState q = testing::RandomJoints(ur, rng);
    const Eigen::Matrix4d got = ForwardKinematics(ur, q).ee.ToMatrix();
    ur_err = std::max(ur_err, (got - testing::UrLikeChain(q.values)).cwiseAbs().maxCoeff());
  }
  return {planar_err < 1e-12 && ur_err < 1e-10,
          Format("planar max error %.2e, 6-DOF max error %.2e", planar_err, ur_err)};
}

Outcome JacobianFd() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (const char* fixture : {"ur_like.urdf", "panda_like.urdf"}) {
    const Embodiment e = testing::LoadFixture(fixture);
    for (int i = 0; i < 100; ++i) {
      worst = std::max(worst, testing::JacobianFdError(e, testing::RandomJoints(e, rng), 1e-6));
    }
  }
  return {worst < 1e-5, Format("max-abs difference %.2e over 100 configs per fixture", worst)};
}

Outcome IkConvergence() {
  std::string detail;
  bool pass = true;
  for (const char* fixture : {"ur_like.urdf", "panda_like.urdf"}) {
    const Embodiment e = testing::LoadFixture(fixture);
    std::mt19937_64 rng(4);
    IkParams p;
    p.max_iters = 200;
    int solved = 0;
    for (int i = 0; i < 500; ++i) {
      const Transform target = ForwardKinematics(e, testing::RandomJoints(e, rng, 0.0)).ee;
      const IkResult r = SolveIk(e, target, MidRange(e), p);
      solved += r.converged && r.iters <= 200 && r.residual_pos < 1e-4 && r.residual_rot < 1e-3;
    }
    pass = pass && solved >= 495;
    detail += Format("%s %d/500 ", e.name().c_str(), solved);
  }
  return {pass, detail};
}

Outcome DistributionMatching() {
  const ToyWorld w(ToyWorldConfig::Default());
  std::mt19937_64 rng(5);
  ToyState state;
  state.scene = w.SampleScene(rng);
  state.ee = w.SampleHome(rng);
  JointState qs = w.Track(ToyRobot::kSource, state.ee, MidRange(w.embodiment(ToyRobot::kSource))).q;
  JointState qt = w.Track(ToyRobot::kTarget, state.ee, MidRange(w.embodiment(ToyRobot::kTarget))).q;
  JointState seed_t = qt, seed_s = qs;
  int identical = 0;
  for (int t = 0; t < 40; ++t) {
    const Image src = w.Render(state.scene, ToyRobot::kSource, qs).image;
    const Image tgt = w.Render(state.scene, ToyRobot::kTarget, qt).image;
    const Image es = EditToyFrame(w, src, ToyRobot::kSource, qs, EditMode::kShadow,
                                  w.extrinsics(ToyRobot::kSource), w.extrinsics(ToyRobot::kTarget),
                                  seed_t);
    const Image et = EditToyFrame(w, tgt, ToyRobot::kTarget, qt, EditMode::kShadow,
                                  w.extrinsics(ToyRobot::kTarget), w.extrinsics(ToyRobot::kSource),
                                  seed_s);
    identical += es == et;
    w.Step(state, ExpertAction(w, state));
    qs = w.Track(ToyRobot::kSource, state.ee, qs).q;
    qt = w.Track(ToyRobot::kTarget, state.ee, qt).q;
  }
  return {identical == 40, Format("%d/40 matched frames bit-identical", identical)};
}

struct ToyOutcomes {
  Outcome ordering, masked, noise;
};

ToyOutcomes ToyTransfer(int jobs) {
  ToyExperimentConfig cfg = ToyExperimentConfig::Default();
  cfg.jobs = jobs;
  cfg.strip_frames = 0;
  const auto start = Clock::now();
  const ToyExperimentReport r = RunExperiment(cfg);
  const double minutes = Seconds(start) / 60.0;
  std::printf("%s", r.Table().c_str());
  const double raw = r.Cell(EditMode::kNone, ToyRobot::kSource).rate();
  const double naive = r.Cell(EditMode::kNone, ToyRobot::kTarget).rate();
  const double black = r.Cell(EditMode::kBlackOnly, ToyRobot::kTarget).rate();
  const double shadow = r.Cell(EditMode::kShadow, ToyRobot::kTarget).rate();
  const double black_src = r.Cell(EditMode::kBlackOnly, ToyRobot::kSource).rate();
  double p = 1.0;
  for (const ToyComparison& c : r.comparisons) {
    if (c.name == "shadow_vs_black_only_on_target" && c.test) p = c.test->p_two_sided;
  }
  bool equal_episodes = true;
  for (const ToyCell& c : r.cells) equal_episodes = equal_episodes && c.episodes == 50;
  ToyOutcomes out;
  out.ordering = {equal_episodes && raw >= 0.8 && naive <= 0.2 && black <= shadow - 0.3 &&
                      shadow >= 0.8 * raw && p < 0.05 && minutes < 30.0,
                  Format("raw %.2f, naive %.2f, black_only %.2f, shadow %.2f, p=%.2g, "
                         "%.1f min on %d thread(s)",
                         raw, naive, black, shadow, p, minutes, jobs)};
  out.masked = {std::abs(black_src - raw) <= 0.15,
                Format("black_only on source %.2f vs raw %.2f", black_src, raw)};
  std::vector<double> rates;
  std::string levels;
  for (const ToyCell& c : r.noise_sweep) {
    rates.push_back(c.rate());
    levels += Format("(%.2f m, %.0f deg) %.2f  ", c.noise.sigma_translation,
                     c.noise.sigma_rotation_deg, c.rate());
  }
  bool monotone = rates.size() == 3;
  for (std::size_t i = 1; i < rates.size(); ++i) monotone = monotone && rates[i] <= rates[i - 1];
  out.noise = {monotone && rates.back() <= rates.front() - 0.3, levels};
  return out;
}

// Fixture arms with a dense sphere on every link, as large as fits the
// triangle budget.
std::pair<Embodiment, Embodiment> DenseArms(std::size_t budget, std::size_t* triangles) {
  const RobotModel panda = LoadUrdf(testing::DataPath("panda_like.urdf"), testing::DataPath(""));
  const RobotModel ur = LoadUrdf(testing::DataPath("ur_like.urdf"), testing::DataPath(""));
  auto densify = [](RobotModel m, int segments) {
    for (Link& l : m.links) l.visuals.push_back({MakeSphere(0.06, segments), Transform()});
    return m;
  };
  int best = 4;
  for (int s = 4; s < 400; ++s) {
    if (densify(panda, s).TriangleCount() + densify(ur, s).TriangleCount() > budget) break;
    best = s;
  }
  const RobotModel a = densify(panda, best), b = densify(ur, best);
  *triangles = a.TriangleCount() + b.TriangleCount();
  return {MakeEmbodiment(a), MakeEmbodiment(b)};
}

Outcome Throughput() {
  std::size_t triangles = 0;
  const auto [active, virt] = DenseArms(50000, &triangles);
  const Camera cam(CameraIntrinsics{280, 280, 120, 120, 240, 240});
  Eigen::Matrix3d rot;
  rot << 0, -1, 0, 0, 0, -1, -1, 0, 0;
  const Transform calib_a(Eigen::Quaterniond(rot), Eigen::Vector3d(0, 0.5, 2.0));
  const Transform calib_v(Eigen::Quaterniond(rot), Eigen::Vector3d(0.2, 0.5, 2.0));
  std::mt19937_64 rng(9);
  Frame f;
  f.image = Image(240, 240, Rgb{120, 130, 140});
  EditConfig cfg;
  std::vector<double> ms;
  std::size_t filled = 0;
  for (int i = 0; i < 20; ++i) {
    f.joints = testing::RandomJoints(active, rng, 0.2);
    const auto start = Clock::now();
    const CompositeResult r = EditFrame(f, active, virt, calib_a, calib_v, cam, cfg, MidRange(virt));
    ms.push_back(1000.0 * Seconds(start));
    filled += r.active_mask.Union(r.virtual_mask).Count();
  }
  std::sort(ms.begin(), ms.end());
  const double median = ms[ms.size() / 2];
  return {triangles <= 50000 && median <= 100.0 && filled > 0,
          Format("%zu triangles, median %.1f ms, slowest %.1f ms over 20 cold-start edits",
                 triangles, median, ms.back())};
}

std::map<std::string, std::string> Tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), root).generic_string()] = testing::ReadBytes(entry.path());
    }
  }
  return out;
}

Outcome PipelineDeterminism(const std::string& cli, const fs::path& work) {
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string data = (work / "data").string();
  if (!run("toy-dataset --trajectories 8 --frames 30 --seed 4 -o \"" + data + "\"")) {
    return {false, "toy-dataset failed"};
  }
  const std::string base = "edit --manifest \"" + data +
                           "/manifest.json\" --direction train --mode shadow "
                           "--noise-sigma-t 0.005 --noise-sigma-r 2 --seed 11 ";
  bool ok = run(base + "--jobs 1 -o \"" + (work / "j1").string() + "\"") &&
            run(base + "--jobs 8 -o \"" + (work / "j8").string() + "\"") &&
            run(base + "--jobs 8 -o \"" + (work / "j8_again").string() + "\"") &&
            run(base + "--jobs 1 -o \"" + (work / "j1_again").string() + "\"");
  if (!ok) return {false, "edit failed"};
  const auto a = Tree(work / "j1");
  const bool same = a == Tree(work / "j8") && a == Tree(work / "j8_again") &&
                    a == Tree(work / "j1_again");
  return {same && a.size() > 8 * 30, Format("%zu files per output tree, %s", a.size(),
                                            same ? "all trees identical" : "trees differ")};
}

}  // namespace
}  // namespace shadowkit

int main(int argc, char** argv) {
  using namespace shadowkit;
  CLI::App app{"acceptance checks"};
  std::string cli;
  std::vector<int> only;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--cli", cli, "path to the shadowkit executable")->required();
  app.add_option("--only", only, "criteria to run (default: all)");
  app.add_option("--jobs", jobs, "threads for the toy experiment");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = fs::temp_directory_path() /
                        ("shadowkit_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(work);
  auto wanted = [&](int k) { return only.empty() || std::count(only.begin(), only.end(), k); };

  std::map<int, std::pair<std::string, Outcome>> results;
  auto record = [&](int k, const char* name, auto&& fn) {
    if (!wanted(k)) return;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %d. %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
    std::fflush(stdout);
    results[k] = {name, o};
  };

  record(1, "rasterizer oracle", RasterOracle);
  record(2, "forward kinematics exactness", FkExactness);
  record(3, "Jacobian vs finite differences", JacobianFd);
  record(4, "IK convergence", IkConvergence);
  record(5, "distribution matching", DistributionMatching);
  if (wanted(6) || wanted(7) || wanted(8)) {
    ToyOutcomes toy;
    bool threw = false;
    std::string what;
    try {
      toy = ToyTransfer(jobs);
    } catch (const std::exception& e) {
      threw = true;
      what = e.what();
    }
    const Outcome failed{false, "exception: " + what};
    record(6, "toy transfer ordering", [&] { return threw ? failed : toy.ordering; });
    record(7, "masked vs raw equivalence", [&] { return threw ? failed : toy.masked; });
    record(8, "calibration noise monotonicity", [&] { return threw ? failed : toy.noise; });
  }
  record(9, "edit throughput", Throughput);
  record(10, "pipeline determinism", [&] { return PipelineDeterminism(cli, work / "pipeline"); });

  fs::remove_all(work);
  int failed = 0;
  for (const auto& [k, r] : results) failed += !r.second.pass;
  std::printf("%zu criteria run, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
