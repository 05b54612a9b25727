// Copyright 2026 The cplan Authors
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


// Acceptance suite: one PASS/FAIL line per criterion. Property checks run
// against the independent oracles in oracles.hpp; the benchmark criteria run
// the real `bench` command through the C interface.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "cplan/augment.hpp"
#include "cplan/errors.hpp"
#include "cplan/cplan.h"
#include "cplan/learn.hpp"
#include "cplan/planner.hpp"
#include "cplan/simctrl.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace cplan;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- 1. Relabel exactness and safety ------------------------------------------

Verdict RelabelSafety() {
  const auto t0 = Clock::now();
  AugmentConfig cfg;
  cfg.alpha = 1.0;  // every eligible frame attempts an insertion
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int target = 10000;
  int inserted = 0, attempts = 0, threatening = 0;
  int sum_fail = 0, unsafe_steps = 0, nonthreat_beta = 0;
  double worst_sum = 0.0, min_margin = std::numeric_limits<double>::infinity();
  while (inserted < target && attempts < 10 * target) {
    const std::uint64_t index = static_cast<std::uint64_t>(attempts++);
    Frame f = testutil::FrameWith(testutil::RandomEgo(gen));
    for (int k = 0, n = static_cast<int>(u(gen) * 4); k < n; ++k) {
      const Pose2 p{-40.0 + 80.0 * u(gen), -40.0 + 80.0 * u(gen), -M_PI + 2 * M_PI * u(gen)};
      const double v = 8.0 * u(gen);
      f.agents.push_back(testutil::MovingAgent(k + 1, p, v * std::cos(p.heading),
                                               v * std::sin(p.heading)));
    }
    PlanLabels labels;
    try {
      labels = DeriveLabels(f.ego);
    } catch (const Error&) {
      continue;
    }
    Rng rng = DeriveRng(2024, index);
    const AugmentResult r = AugmentFrame(f, labels, rng, cfg);
    if (!r.report.inserted) continue;
    ++inserted;
    const AgentTrack& agent = r.frame.agents.back();
    const double d_orig = labels.displacements.FutureSum();
    const double err = std::abs(r.labels.displacements.FutureSum() - r.report.beta * d_orig);
    worst_sum = std::max(worst_sum, err);
    sum_fail += err > 1e-9 ? 1 : 0;
    for (double d : oracle::RolloutDistances(r.labels, agent, cfg.ego_dims.length,
                                             cfg.ego_dims.width)) {
      unsafe_steps += d < cfg.d_safe ? 1 : 0;
      min_margin = std::min(min_margin, d - cfg.d_safe);
    }
    if (r.report.role == AgentRole::kThreatening) {
      ++threatening;
    } else {
      nonthreat_beta += r.report.beta != 1.0 ? 1 : 0;
    }
  }
  const double secs = Since(t0);
  const bool pass = inserted == target && sum_fail == 0 && unsafe_steps == 0 &&
                    nonthreat_beta == 0 && secs < 30.0;
  return {pass, Fmt("inserted=%d (threatening=%d) of %d frames; max|sum-beta*D|=%.2e; "
                    "unsafe steps=%d (min margin %.3g m); non-threatening beta!=1: %d; %.1f s",
                    inserted, threatening, attempts, worst_sum, unsafe_steps, min_margin,
                    nonthreat_beta, secs)};
}

// ---- 2. Geometry oracles --------------------------------------------------------

Verdict GeometryOracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double worst_rt = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto pts = oracle::RandomMonotonePath(rng, 8);
    const Polyline p(pts);
    const double s = std::uniform_real_distribution<double>(0.0, p.length())(rng);
    const Pose2 q = InterpAlong(p, s);
    const Vec2 w = oracle::WalkArc(pts, s);
    worst_rt = std::max({worst_rt, std::abs(oracle::ProjectArc(pts, q.position()) - s),
                         std::abs(q.x - w.x), std::abs(q.y - w.y)});
  }
  int pairs = 0, mismatches = 0, marginal = 0;
  while (pairs < 10000) {
    const auto a = oracle::RandomBox(rng, 4);
    const auto b = oracle::RandomBox(rng, 4);
    const bool grown = oracle::GridOverlap(oracle::Grown(a, 1e-3), oracle::Grown(b, 1e-3));
    const bool shrunk = oracle::GridOverlap(oracle::Grown(a, -1e-3), oracle::Grown(b, -1e-3));
    if (grown != shrunk) {
      ++marginal;
      continue;
    }
    ++pairs;
    mismatches += BoxesOverlap(a, b) != grown ? 1 : 0;
  }
  double worst_dist = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = oracle::RandomBox(rng, 8);
    const auto b = oracle::RandomBox(rng, 8);
    worst_dist = std::max(worst_dist,
                          std::abs(MinBoxDistance(a, b) - oracle::SampledBoundaryDistance(a, b)));
  }
  const double secs = Since(t0);
  const bool pass = worst_rt < 1e-9 && mismatches == 0 && worst_dist <= 1e-2 && secs < 60.0;
  return {pass, Fmt("round-trip max err=%.2e over 1000; overlap mismatches=%d/%d "
                    "(%d marginal skipped); distance max err=%.2e over 10000; %.1f s",
                    worst_rt, mismatches, pairs, marginal, worst_dist, secs)};
}

// ---- 3. Loss weights and WTA ------------------------------------------------------

Verdict LossAndWta() {
  const LossWeights w = LossWeights::Defaults();
  std::vector<Vec2> base;
  for (int i = 0; i < kDefaultPathPoints; ++i) base.push_back({2.0 * i, 0.0});
  auto offset_at = [&](int t) {
    std::vector<Vec2> p = base;
    p[t - 1].x += 1.0;
    return Polyline(p);
  };
  const Polyline gt(base);
  const double e0 = WeightedL1Path(gt, gt, w);
  const double e1 = WeightedL1Path(offset_at(1), gt, w);
  const double e7 = WeightedL1Path(offset_at(7), gt, w);
  const double e13 = WeightedL1Path(offset_at(13), gt, w);
  const bool examples = e0 == 0.0 && std::abs(e1 - 1.0) < 1e-12 && std::abs(e7 - 0.6) < 1e-12 &&
                        std::abs(e13 - 0.4) < 1e-12;

  std::mt19937_64 rng(303);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(-2, 2);
  int wta_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 12;
    const int d = 1 + (trial * 7) % 31;
    const bool ties = trial % 4 == 0;
    std::vector<std::vector<double>> anchors(m, std::vector<double>(d));
    std::vector<double> target(d);
    for (auto& a : anchors) for (auto& v : a) v = ties ? coarse(rng) : n(rng);
    for (auto& v : target) v = ties ? coarse(rng) : n(rng);
    std::size_t want = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += (anchors[i][k] - target[k]) * (anchors[i][k] - target[k]);
      if (s < best) {
        best = s;
        want = static_cast<std::size_t>(i);
      }
    }
    wta_mismatch += WtaAssign(anchors, target) != want ? 1 : 0;
  }
  return {examples && wta_mismatch == 0,
          Fmt("path loss examples: exact=%.3g t1=%.3g t7=%.3g t13=%.3g; "
              "WTA mismatches=%d/1000",
              e0, e1, e7, e13, wta_mismatch)};
}

// ---- 4. Gradient check -------------------------------------------------------------

Verdict GradientCheck() {
  const int in = static_cast<int>(FeatureDim(kDefaultHorizon));
  const int hidden = 16;
  const int out = kDefaultHorizon + 2;
  const LossWeights w = LossWeights::Defaults();
  Rng prng(404);
  std::mt19937_64 gen(405);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 4);
  int draws = 0, excluded = 0, failed = 0;
  double worst = 0.0;
  while (draws < 100) {
    RegressorParams p = RegressorParams::Random(in, hidden, out, prng, 1.0);
    std::vector<TrainSample> batch(3);
    for (auto& s : batch) {
      s.features.assign(5, std::vector<double>(in));
      s.anchors.assign(5, std::vector<double>(kDefaultHorizon + 1));
      for (auto& f : s.features) for (auto& v : f) v = n(gen);
      for (auto& a : s.anchors) for (auto& v : a) v = std::abs(n(gen));
      s.gt.resize(kDefaultHorizon + 1);
      for (auto& v : s.gt) v = std::abs(n(gen));
      s.winner = static_cast<std::size_t>(pick(gen));
    }
    // Points within 1e-4 of an L1 kink are excluded.
    double min_res = std::numeric_limits<double>::infinity();
    for (const auto& s : batch) {
      const auto o = Forward(p, s.features[s.winner]);
      for (std::size_t t = 1; t < s.gt.size(); ++t) {
        min_res = std::min(min_res, std::abs(s.anchors[s.winner][t] + o.offsets[t] - s.gt[t]));
      }
    }
    if (min_res < 1e-4) {
      ++excluded;
      continue;
    }
    ++draws;
    const auto analytic = LossAndGrad(p, batch, w).grad.Flatten();
    auto flat = p.Flatten();
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < flat.size(); ++i) {
      const double keep = flat[i];
      flat[i] = keep + 1e-6;
      p.Unflatten(flat);
      const double up = LossAndGrad(p, batch, w).loss;
      flat[i] = keep - 1e-6;
      p.Unflatten(flat);
      const double down = LossAndGrad(p, batch, w).loss;
      flat[i] = keep;
      const double fd = (up - down) / 2e-6;
      diff2 += (analytic[i] - fd) * (analytic[i] - fd);
      norm2 += fd * fd;
    }
    p.Unflatten(flat);
    const double rel = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
    worst = std::max(worst, rel);
    failed += rel > 1e-4 ? 1 : 0;
  }
  return {failed == 0, Fmt("draws=%d (%d near-kink draws excluded); params per draw=%d; "
                           "max relative error=%.2e; failures=%d",
                           draws, excluded, in * hidden + hidden + out * hidden + out, worst,
                           failed)};
}

// ---- 5. Control tracking ---------------------------------------------------------

Verdict ControlTracking() {
  const SimConfig cfg;
  auto constant = [](double per_step) -> PlannerFn {
    return [=](const Frame&, const Polyline& target) {
      PlanOutput o;
      o.path = target;
      o.disps = {std::vector<double>(kDefaultHorizon + 1, per_step), kDefaultDt};
      return o;
    };
  };
  auto scenario = [](double length, double duration, BicycleState start) {
    Scenario s;
    s.name = "tracking";
    s.family = "empty";
    s.route = BuildRoute({0, 0, 0}, {{length, 0.0}});
    s.ego_start = start;
    s.duration = duration;
    return s;
  };
  // Lateral: 1 m offset at 5 m/s.
  const auto lat = RunEpisode(scenario(300.0, 12.0, {{0.0, 1.0, 0.0}, 5.0}), constant(1.0), cfg);
  double t_lat = std::numeric_limits<double>::infinity();
  for (std::size_t i = lat.first.times.size(); i-- > 0;) {
    if (std::abs(lat.first.ego_trace[i].pose.y) >= 0.1) break;
    t_lat = lat.first.times[i];
  }
  // Speed step 0 -> 5 m/s.
  const auto lon = RunEpisode(scenario(400.0, 15.0, {{0.0, 0.0, 0.0}, 0.0}), constant(1.0), cfg);
  double t_settle = 0.0;
  for (std::size_t i = 0; i < lon.first.times.size(); ++i) {
    if (std::abs(lon.first.speeds[i] - 5.0) > 0.1) t_settle = lon.first.times[i];
  }
  // Circle closure.
  BicycleState b{{0, 0, 0}, 5.0};
  const double steer = 0.2;
  const double radius = b.wheelbase / std::tan(steer);
  const int steps = static_cast<int>(std::lround(2.0 * M_PI * radius / b.speed / 0.05));
  for (int i = 0; i < steps; ++i) b = StepBicycle(b, steer, 0.0, 0.05);
  const double closure = std::hypot(b.pose.x, b.pose.y) / (2.0 * M_PI * radius);
  const bool pass = t_lat <= 8.0 && t_settle <= 10.0 && closure < 0.01;
  return {pass, Fmt("offset<0.1 m from t=%.2f s (limit 8); speed within 2%% from t=%.2f s "
                    "(limit 10); circle closure=%.3f%% (limit 1%%)",
                    t_lat, t_settle, 100.0 * closure)};
}

// ---- 6. Refinement optimality -------------------------------------------------------

Verdict RefinementOptimality() {
  std::mt19937_64 rng(606);
  const CostConfig cfg;
  const int n = static_cast<int>(std::lround(cfg.max_scale / cfg.scale_step));
  int mismatches = 0, colliding = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = testutil::MakeRandomScene(rng);
    const CandidatePlan r = RefineDisplacements(s.candidate, s.frame, cfg);
    const int k = oracle::GridArgmin(s.candidate.path, s.candidate.displacements,
                                     s.frame.agents, cfg, n, cfg.scale_step);
    bool same = true;
    for (std::size_t t = 0; t < r.displacements.values.size(); ++t) {
      const double want = s.candidate.displacements.values[t] * k * cfg.scale_step;
      same = same && std::abs(r.displacements.values[t] - want) <= 1e-12;
    }
    mismatches += same ? 0 : 1;
    colliding += oracle::OverlapSteps(s.candidate.path, s.candidate.displacements,
                                      s.frame.agents, cfg.ego_dims.length,
                                      cfg.ego_dims.width) > 0
                     ? 1
                     : 0;
  }
  return {mismatches == 0, Fmt("mismatches=%d/500 against the %d-point grid "
                               "(%d scenes collide at scale 1)",
                               mismatches, n + 1, colliding)};
}

// ---- 7-9. Benchmark -------------------------------------------------------------------

using Table = std::vector<std::map<std::string, std::string>>;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Table ReadCsv(const fs::path& p) {
  std::istringstream in(ReadFile(p));
  std::string line;
  std::vector<std::string> header;
  Table rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (std::getline(in, line)) header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

struct BenchRun {
  bool ok = false;
  std::string error;
  double seconds = 0.0;
  fs::path dir;
};

BenchRun RunBench(const fs::path& dir) {
  BenchRun r;
  r.dir = dir;
  fs::remove_all(dir);
  cplan_config* cfg = nullptr;
  if (cplan_config_default(&cfg) != CPLAN_OK) {
    r.error = cplan_last_error();
    return r;
  }
  const auto t0 = Clock::now();
  cplan_bench_summary summary{};
  const cplan_status st = cplan_cmd_bench(cfg, dir.c_str(), &summary);
  r.seconds = Since(t0);
  cplan_config_free(cfg);
  r.ok = st == CPLAN_OK;
  if (!r.ok) r.error = std::string(cplan_status_name(st)) + ": " + cplan_last_error();
  return r;
}

double Num(const std::map<std::string, std::string>& row, const std::string& key) {
  auto it = row.find(key);
  return it == row.end() ? std::nan("") : std::stod(it->second);
}

Verdict TrendReproduction(const BenchRun& run) {
  if (!run.ok) return {false, "bench failed: " + run.error};
  const Table cmp = ReadCsv(run.dir / "comparison.csv");
  std::map<std::string, std::map<std::string, std::string>> by;
  for (const auto& row : cmp) by[row.at("variant")] = row;
  if (by.size() != 3) return {false, "comparison.csv does not hold three variants"};
  const double c_par = Num(by["parallel-baseline"], "collision_rate");
  const double c_cas = Num(by["cascaded"], "collision_rate");
  const double c_aug = Num(by["cascaded+augment"], "collision_rate");
  const double s_cas = Num(by["cascaded"], "success_rate");
  const double s_aug = Num(by["cascaded+augment"], "success_rate");
  const double episodes = Num(by["cascaded"], "episodes");
  const double reduction = c_par > 0.0 ? 1.0 - c_cas / c_par : 0.0;
  const bool a = c_par > 0.0 && c_cas <= 0.8 * c_par;
  const bool b = c_aug < c_cas && s_aug >= s_cas;
  const bool fast = run.seconds < 600.0;
  return {a && b && fast && episodes == 200.0,
          Fmt("episodes=%.0f; collision parallel=%.3f cascaded=%.3f (-%.1f%%, need >=20%%) "
              "[%s]; augmented=%.3f, success %.3f vs %.3f [%s]; bench %.0f s (limit 600)",
              episodes, c_par, c_cas, 100.0 * reduction, a ? "a ok" : "a FAIL", c_aug, s_aug,
              s_cas, b ? "b ok" : "b FAIL", run.seconds)};
}

Verdict AlphaSanity(const BenchRun& run) {
  if (!run.ok) return {false, "bench failed: " + run.error};
  std::map<std::string, std::map<std::string, std::string>> by;
  for (const auto& row : ReadCsv(run.dir / "alpha_sweep.csv")) by[row.at("alpha")] = row;
  if (!by.count("0.000") || !by.count("0.100")) return {false, "alpha sweep rows missing"};
  const double c0 = Num(by["0.000"], "collision_rate");
  const double c1 = Num(by["0.100"], "collision_rate");
  std::string extra;
  if (by.count("0.300")) {
    extra = Fmt("; alpha=0.3 collision=%.3f success=%.3f (recorded only)",
                Num(by["0.300"], "collision_rate"), Num(by["0.300"], "success_rate"));
  }
  return {c1 <= c0, Fmt("collision alpha=0: %.3f, alpha=0.1: %.3f", c0, c1) + extra};
}

Verdict Determinism(const BenchRun& first, const BenchRun& second) {
  if (!first.ok || !second.ok) {
    return {false, "bench failed: " + (first.ok ? second.error : first.error)};
  }
  std::set<fs::path> files;
  for (const auto& root : {first.dir, second.dir}) {
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") {
        files.insert(fs::relative(e.path(), root));
      }
    }
  }
  int differ = 0;
  for (const auto& f : files) differ += ReadFile(first.dir / f) != ReadFile(second.dir / f) ? 1 : 0;
  return {differ == 0 && !files.empty(),
          Fmt("%zu CSV files compared, %d differ (second run %.0f s)", files.size(), differ,
              second.seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite: one line per criterion"};
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / ("cplan_acceptance_" + std::to_string(::getpid()))).string();
  bool keep = false;
  app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
  app.add_option("--work-dir", work, "Directory for benchmark outputs");
  app.add_flag("--keep", keep, "Keep benchmark outputs");
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  const std::vector<std::pair<std::string, std::function<Verdict()>>> props = {
      {"relabel exactness & safety", RelabelSafety},
      {"geometry oracles", GeometryOracles},
      {"loss & WTA fidelity", LossAndWta},
      {"gradient check", GradientCheck},
      {"control tracking", ControlTracking},
      {"refinement optimality", RefinementOptimality},
  };

  int passed = 0, run = 0;
  auto report = [&](int id, const std::string& name, const Verdict& v) {
    ++run;
    passed += v.pass ? 1 : 0;
    std::printf("criterion %d %s %s: %s\n", id, v.pass ? "PASS" : "FAIL", name.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  };
  for (std::size_t i = 0; i < props.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted(id)) continue;
    Verdict v;
    try {
      v = props[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    report(id, props[i].first, v);
  }

  if (wanted(7) || wanted(8) || wanted(9)) {
    const BenchRun a = RunBench(fs::path(work) / "bench_a");
    if (wanted(7)) report(7, "cascade & augmentation trends", TrendReproduction(a));
    if (wanted(8)) report(8, "augmentation-rate sanity", AlphaSanity(a));
    if (wanted(9)) {
      const BenchRun b = RunBench(fs::path(work) / "bench_b");
      report(9, "bench determinism", Determinism(a, b));
    }
  }
  if (!keep) fs::remove_all(work);
  std::printf("acceptance: %d/%d criteria passed\n", passed, run);
  return passed == run ? 0 : 1;
}
