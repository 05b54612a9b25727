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

#include "cplan/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"

namespace cplan {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own slot, so the merged result is independent of scheduling.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

// --- Planner stack -----------------------------------------------------------

std::vector<CandidatePlan> PlanCandidates(const PlannerStack& stack, const Frame& frame,
                                          const Polyline& target) {
  auto all = GenCandidates(frame, target, stack.paths, stack.disps);
  // Selection is hierarchical, so only the best path's candidates can win.
  int best_path = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& c : all) {
    if (c.path_score > best_score) {
      best_score = c.path_score;
      best_path = c.anchor_ids.path;
    }
  }
  std::vector<CandidatePlan> cands;
  for (auto& c : all) {
    if (c.anchor_ids.path == best_path) cands.push_back(std::move(c));
  }

  Polyline straight;
  const Polyline* rollout = nullptr;
  if (!stack.path_aware) {
    straight = StraightAhead(frame.ego.pose, static_cast<std::size_t>(stack.path_points),
                             stack.path_spacing);
    rollout = &straight;
  }

  if (stack.mode == RefineMode::kCostDescent) {
    for (auto& c : cands) c = RefineDisplacements(c, frame, stack.cost, rollout);
  } else {
    if (!stack.params) Fail(ErrorCode::kInvalidArgument, "learned refinement needs parameters");
    for (auto& c : cands) {
      const std::size_t m = static_cast<std::size_t>(c.anchor_ids.disp);
      const double lookahead = m < stack.disps.lookaheads.size() ? stack.disps.lookaheads[m] : 0.0;
      const auto features =
          BuildFeatures(rollout ? *rollout : c.path, c.displacements, lookahead, frame,
                        stack.features);
      const auto out = Forward(*stack.params, features);
      for (std::size_t t = 0; t < c.displacements.values.size(); ++t) {
        c.displacements.values[t] = std::max(0.0, c.displacements.values[t] + out.offsets[t]);
      }
      c.base_score = out.score_logit;
    }
  }
  CollisionPenalizedScores(cands, frame, stack.cost, rollout);
  return cands;
}

PlanOutput PlanFrame(const PlannerStack& stack, const Frame& frame, const Polyline& target) {
  const auto cands = PlanCandidates(stack, frame, target);
  const CandidatePlan& best = SelectPlan(cands);
  PlanOutput out;
  out.path = best.path;
  out.disps = best.displacements;
  out.path_score = best.path_score;
  out.long_score = best.long_score;
  out.anchor_ids = best.anchor_ids;
  return out;
}

PlannerFn MakePlanner(PlannerStack stack) {
  return [stack = std::move(stack)](const Frame& frame, const Polyline& target) {
    return PlanFrame(stack, frame, target);
  };
}

PlannerStack MakeStack(const Config& cfg, PathAnchorSet paths, DisplacementAnchors disps,
                       std::optional<RegressorParams> params, bool path_aware) {
  PlannerStack s;
  s.paths = std::move(paths);
  s.disps = std::move(disps);
  s.cost = cfg.cost;
  s.features = cfg.learn.features;
  s.params = std::move(params);
  s.mode = s.params ? RefineMode::kLearned : RefineMode::kCostDescent;
  s.path_aware = path_aware;
  s.path_points = cfg.path_points;
  s.path_spacing = cfg.path_spacing;
  return s;
}

// --- Anchors -----------------------------------------------------------------

std::vector<LabeledFrame> LabelFrames(const FrameLog& log, const LabelOptions& opts,
                                      std::size_t* skipped) {
  std::vector<LabeledFrame> out;
  std::size_t skip = 0;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    try {
      out.push_back({i, DeriveLabels(log.frames[i].ego, opts)});
    } catch (const Error&) {
      ++skip;
    }
  }
  if (skipped) *skipped = skip;
  return out;
}

AnchorBuild BuildAnchors(const FrameLog& log, const Config& cfg) {
  if (log.frames.empty()) Fail(ErrorCode::kInvalidArgument, "no frames to build anchors from");
  AnchorBuild build;
  const auto labeled = LabelFrames(log, cfg.label_options(), &build.skipped);
  build.labeled = labeled.size();
  if (labeled.empty()) Fail(ErrorCode::kInvalidArgument, "no frame has derivable labels");
  std::vector<Polyline> local;
  local.reserve(labeled.size());
  for (const auto& lf : labeled) {
    local.push_back(ToEgoFrame(lf.labels.drive_path, log.frames[lf.index].ego.pose));
  }
  Rng rng = DeriveRng(cfg.seed, 11);
  auto cluster = ClusterPathAnchors(local, cfg.anchors.path_count, cfg.anchors.kmeans_iters, rng);
  build.paths = std::move(cluster.anchors);
  build.inertia_history = std::move(cluster.inertia_history);
  build.disps = MakeDisplacementAnchors(cfg.anchors.lookaheads, cfg.horizon, cfg.dt);
  return build;
}

std::string SerializeAnchors(const PathAnchorSet& paths, const DisplacementAnchors& disps) {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : paths.anchors) arr.push_back(PolylineToJson(p));
  j["paths"] = std::move(arr);
  j["disp"] = {{"dt", disps.dt}, {"lookaheads", disps.lookaheads}, {"values", disps.values}};
  return j.dump(1) + "\n";
}

std::pair<PathAnchorSet, DisplacementAnchors> ParseAnchors(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("anchors: ") + e.what());
  }
  const FieldContext ctx("anchors");
  RejectUnknownKeys(j, {"paths", "disp"}, ctx, ErrorCode::kParse);
  PathAnchorSet paths;
  const auto& arr = GetArray(j, "paths", ctx);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    paths.anchors.push_back(PolylineFromJson(arr[i], ctx.Child("paths", i)));
    if (paths.anchors.back().size() != paths.anchors.front().size()) {
      Fail(ErrorCode::kShape, "anchors.paths: all anchors need the same point count");
    }
  }
  if (paths.anchors.empty()) Fail(ErrorCode::kParse, "anchors.paths: empty");
  const auto& d = GetField(j, "disp", ctx);
  const auto dctx = ctx.Child("disp");
  RejectUnknownKeys(d, {"dt", "lookaheads", "values"}, dctx, ErrorCode::kParse);
  DisplacementAnchors disps;
  disps.dt = GetNumber(d, "dt", dctx);
  disps.lookaheads = NumberVector(GetArray(d, "lookaheads", dctx), dctx.Child("lookaheads"));
  const auto& vals = GetArray(d, "values", dctx);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    disps.values.push_back(NumberVector(vals[i], dctx.Child("values", i)));
    if (disps.values.back().size() != disps.values.front().size()) {
      Fail(ErrorCode::kShape, "anchors.disp.values: rows differ in length");
    }
    for (double v : disps.values.back()) {
      if (!(v >= 0.0)) Fail(ErrorCode::kParse, "anchors.disp.values: must be >= 0");
    }
  }
  if (disps.values.empty()) Fail(ErrorCode::kParse, "anchors.disp.values: empty");
  if (disps.lookaheads.size() != disps.values.size()) {
    Fail(ErrorCode::kShape, "anchors.disp: lookaheads and values differ in count");
  }
  return {std::move(paths), std::move(disps)};
}

// --- Augmentation ------------------------------------------------------------

AugmentBatch AugmentFrames(const FrameLog& log, const AugmentConfig& cfg,
                           const LabelOptions& opts, std::uint64_t seed) {
  cfg.Validate();
  AugmentBatch batch;
  batch.items.resize(log.frames.size());
  double beta_sum = 0.0;
  for (std::size_t i = 0; i < log.frames.size(); ++i) {
    AugmentedItem& item = batch.items[i];
    std::optional<PlanLabels> labels;
    try {
      labels = DeriveLabels(log.frames[i].ego, opts);
    } catch (const Error&) {
      item.frame = log.frames[i];
      continue;
    }
    ++batch.eligible;
    Rng rng = DeriveRng(seed, i);
    auto res = AugmentFrame(log.frames[i], *labels, rng, cfg);
    item.frame = std::move(res.frame);
    item.labels = std::move(res.labels);
    item.report = res.report;
    if (item.report.inserted) {
      ++batch.inserted;
      if (item.report.role == AgentRole::kThreatening) {
        ++batch.threatening;
        beta_sum += item.report.beta;
      }
    }
  }
  batch.mean_threat_beta = batch.threatening > 0 ? beta_sum / batch.threatening : 1.0;
  return batch;
}

std::string SerializeAugmentReports(const AugmentBatch& batch) {
  std::string out;
  for (std::size_t i = 0; i < batch.items.size(); ++i) {
    const auto& item = batch.items[i];
    nlohmann::ordered_json j;
    j["frame"] = i;
    j["eligible"] = item.labels.has_value();
    j["inserted"] = item.report.inserted;
    j["role"] = ToString(item.report.role);
    j["beta"] = item.report.beta;
    j["replaced_agent_id"] = item.report.replaced_agent_id
                                 ? nlohmann::ordered_json(*item.report.replaced_agent_id)
                                 : nlohmann::ordered_json(nullptr);
    j["inserted_agent_id"] = item.report.inserted_agent_id
                                 ? nlohmann::ordered_json(*item.report.inserted_agent_id)
                                 : nlohmann::ordered_json(nullptr);
    if (item.labels) {
      j["labels"] = {{"drive_path", PolylineToJson(item.labels->drive_path)},
                     {"displacements", item.labels->displacements.values}};
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

// --- Training ----------------------------------------------------------------

std::vector<TrainSample> BuildDataset(const std::vector<Frame>& frames,
                                      const std::vector<PlanLabels>& labels,
                                      const PathAnchorSet& paths,
                                      const DisplacementAnchors& disps,
                                      const FeatureConfig& features, bool path_aware,
                                      int path_points, double path_spacing) {
  if (frames.size() != labels.size()) Fail(ErrorCode::kShape, "frames and labels differ in count");
  std::vector<DisplacementSequence> anchor_seqs;
  for (const auto& v : disps.values) anchor_seqs.push_back({v, disps.dt});

  std::vector<TrainSample> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& frame = frames[i];
    const Pose2& pose = frame.ego.pose;
    const Polyline gt_local = ToEgoFrame(labels[i].drive_path, pose);
    const std::size_t p = WtaAssign(std::span<const Polyline>(paths.anchors), gt_local);
    const Polyline path =
        path_aware ? PlaceInWorld(paths.anchors[p], pose)
                   : StraightAhead(pose, static_cast<std::size_t>(path_points), path_spacing);
    TrainSample s;
    for (std::size_t m = 0; m < anchor_seqs.size(); ++m) {
      const double lookahead = m < disps.lookaheads.size() ? disps.lookaheads[m] : 0.0;
      s.features.push_back(BuildFeatures(path, anchor_seqs[m], lookahead, frame, features));
      s.anchors.push_back(anchor_seqs[m].values);
    }
    s.gt = labels[i].displacements.values;
    s.winner = WtaAssign(std::span<const DisplacementSequence>(anchor_seqs), labels[i].displacements);
    out.push_back(std::move(s));
  }
  return out;
}

TrainedModel TrainModel(const FrameLog& log, const PathAnchorSet& paths,
                        const DisplacementAnchors& disps, const Config& cfg, double alpha,
                        bool path_aware) {
  AugmentConfig acfg = cfg.augment;
  acfg.alpha = alpha;
  const AugmentBatch batch = AugmentFrames(log, acfg, cfg.label_options(), cfg.seed);
  std::vector<Frame> frames;
  std::vector<PlanLabels> labels;
  for (const auto& item : batch.items) {
    if (!item.labels) continue;
    frames.push_back(item.frame);
    labels.push_back(*item.labels);
  }
  if (frames.empty()) Fail(ErrorCode::kInvalidArgument, "no labeled frames to train on");
  const auto dataset = BuildDataset(frames, labels, paths, disps, cfg.learn.features, path_aware,
                                    cfg.path_points, cfg.path_spacing);

  const int in = static_cast<int>(FeatureDim(cfg.horizon));
  const int out = cfg.horizon + 2;
  Rng init_rng = DeriveRng(cfg.seed, 101);
  const auto init = RegressorParams::Random(in, cfg.learn.hidden, out, init_rng,
                                            cfg.learn.init_scale);
  Rng shuffle_rng = DeriveRng(cfg.seed, 102);
  auto result = Train(init, dataset, cfg.loss_weights(), cfg.learn.train, shuffle_rng);
  TrainedModel model;
  model.params = std::move(result.params);
  model.loss_history = std::move(result.loss_history);
  model.samples = dataset.size();
  model.augmented = batch.inserted;
  return model;
}

FrameLog RecordNominalFrames(const Config& cfg, int threads) {
  const std::size_t n = static_cast<std::size_t>(cfg.data.nominal_scenarios);
  std::vector<std::vector<Frame>> per(n);
  ParallelFor(n, threads, [&](std::size_t i) {
    const Scenario s = MakeNominalScenario(cfg.data.first_seed + i);
    per[i] = RecordExpertFrames(s, cfg.sim, cfg.data.record);
  });
  FrameLog log;
  log.dt = cfg.dt;
  for (auto& v : per) {
    for (auto& f : v) log.frames.push_back(std::move(f));
  }
  return log;
}

// --- Simulation --------------------------------------------------------------

std::vector<Scenario> MakeBenchSuite(const Config& cfg) {
  std::vector<Scenario> out;
  const auto per = static_cast<std::uint64_t>(cfg.bench.episodes_per_family);
  for (std::size_t f = 0; f < cfg.bench.families.size(); ++f) {
    for (std::uint64_t i = 0; i < per; ++i) {
      out.push_back(MakeScenario(cfg.bench.families[f], cfg.bench.first_seed + f * per + i,
                                 cfg.sim));
    }
  }
  return out;
}

SuiteResult RunSuite(const std::vector<Scenario>& scenarios, const PlannerStack& stack,
                     const SimConfig& sim, int threads) {
  SuiteResult r;
  r.logs.resize(scenarios.size());
  r.metrics.resize(scenarios.size());
  const PlannerFn planner = MakePlanner(stack);
  ParallelFor(scenarios.size(), threads, [&](std::size_t i) {
    try {
      auto [log, m] = RunEpisode(scenarios[i], planner, sim);
      r.logs[i] = std::move(log);
      r.metrics[i] = m;
    } catch (const Error& e) {
      // A failing episode is recorded and the suite continues.
      r.logs[i].scenario = scenarios[i].name;
      r.logs[i].seed = scenarios[i].seed;
      r.logs[i].failure_reason = std::string("error: ") + e.what();
      r.metrics[i] = EpisodeMetrics{};
    }
  });
  r.summary = ComputeSuiteMetrics(r.metrics);
  return r;
}

std::string MetricsCsv(const std::vector<Scenario>& scenarios, const SuiteResult& result) {
  std::string out = "scenario,seed,success,collided,completion,avg_speed,comfort\n";
  for (std::size_t i = 0; i < result.metrics.size(); ++i) {
    const auto& m = result.metrics[i];
    out += scenarios[i].family + "," + std::to_string(scenarios[i].seed) + "," +
           (m.success ? "1" : "0") + "," + (m.collided ? "1" : "0") + "," +
           Fixed(m.route_completion) + "," + Fixed(m.avg_speed) + "," + Fixed(m.comfort_proxy) +
           "\n";
  }
  return out;
}

std::string PlotCsv(const EpisodeLog& log) {
  std::string out = "time,speed,min_agent_distance\n";
  for (std::size_t i = 0; i < log.times.size(); ++i) {
    const double d = log.min_distances[i];
    out += Fixed(log.times[i], 3) + "," + Fixed(log.speeds[i]) + "," +
           (std::isfinite(d) ? Fixed(d) : std::string("inf")) + "\n";
  }
  return out;
}

// --- Bench -------------------------------------------------------------------

BenchResult RunBench(const Config& cfg, const FrameLog* log, int threads) {
  BenchResult result;
  FrameLog recorded;
  if (!log) {
    recorded = RecordNominalFrames(cfg, threads);
    log = &recorded;
  }
  result.train_frames = log->frames.size();
  result.anchors = BuildAnchors(*log, cfg);
  result.scenarios = MakeBenchSuite(cfg);

  struct Spec {
    const char* name;
    double alpha;
    bool path_aware;
  };
  const Spec specs[] = {{"parallel-baseline", 0.0, false},
                        {"cascaded", 0.0, true},
                        {"cascaded+augment", cfg.bench.augment_alpha, true}};
  std::vector<double> extra_alphas;
  for (double a : cfg.bench.alpha_sweep) {
    if (a != 0.0 && a != cfg.bench.augment_alpha &&
        std::find(extra_alphas.begin(), extra_alphas.end(), a) == extra_alphas.end()) {
      extra_alphas.push_back(a);
    }
  }
  const std::size_t n_models = 3 + extra_alphas.size();
  std::vector<TrainedModel> models(n_models);
  ParallelFor(n_models, threads, [&](std::size_t i) {
    const double alpha = i < 3 ? specs[i].alpha : extra_alphas[i - 3];
    const bool aware = i < 3 ? specs[i].path_aware : true;
    models[i] = TrainModel(*log, result.anchors.paths, result.anchors.disps, cfg, alpha, aware);
  });

  std::vector<SuiteResult> suites(n_models);
  for (std::size_t i = 0; i < n_models; ++i) {
    const bool aware = i < 3 ? specs[i].path_aware : true;
    const auto stack = MakeStack(cfg, result.anchors.paths, result.anchors.disps,
                                 models[i].params, aware);
    suites[i] = RunSuite(result.scenarios, stack, cfg.sim, threads);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    result.variants.push_back({specs[i].name, specs[i].alpha, specs[i].path_aware,
                               std::move(models[i]), std::move(suites[i])});
  }
  for (double a : cfg.bench.alpha_sweep) {
    if (a == 0.0) {
      result.alpha_sweep.emplace_back(a, result.variants[1].suite.summary);
    } else if (a == cfg.bench.augment_alpha) {
      result.alpha_sweep.emplace_back(a, result.variants[2].suite.summary);
    } else {
      const auto it = std::find(extra_alphas.begin(), extra_alphas.end(), a);
      result.alpha_sweep.emplace_back(a, suites[3 + (it - extra_alphas.begin())].summary);
    }
  }
  return result;
}

std::string BenchComparisonCsv(const BenchResult& result) {
  std::string out =
      "variant,alpha,path_aware,episodes,success_rate,collision_rate,mean_completion,"
      "mean_speed,mean_comfort\n";
  for (const auto& v : result.variants) {
    const auto& s = v.suite.summary;
    out += v.name + "," + Fixed(v.alpha, 3) + "," + (v.path_aware ? "1" : "0") + "," +
           std::to_string(s.episodes) + "," + Fixed(s.success_rate) + "," +
           Fixed(s.collision_rate) + "," + Fixed(s.mean_completion) + "," + Fixed(s.mean_speed) +
           "," + Fixed(s.mean_comfort) + "\n";
  }
  return out;
}

std::string BenchMetricsCsv(const BenchResult& result) {
  std::string out = "variant,scenario,seed,success,collided,completion,avg_speed,comfort\n";
  for (std::size_t i = 0; i < result.scenarios.size(); ++i) {
    for (const auto& v : result.variants) {
      const auto& m = v.suite.metrics[i];
      out += v.name + "," + result.scenarios[i].family + "," +
             std::to_string(result.scenarios[i].seed) + "," + (m.success ? "1" : "0") + "," +
             (m.collided ? "1" : "0") + "," + Fixed(m.route_completion) + "," +
             Fixed(m.avg_speed) + "," + Fixed(m.comfort_proxy) + "\n";
    }
  }
  return out;
}

std::string AlphaSweepCsv(const BenchResult& result) {
  std::string out = "alpha,episodes,success_rate,collision_rate,mean_completion\n";
  for (const auto& [alpha, s] : result.alpha_sweep) {
    out += Fixed(alpha, 3) + "," + std::to_string(s.episodes) + "," + Fixed(s.success_rate) + "," +
           Fixed(s.collision_rate) + "," + Fixed(s.mean_completion) + "\n";
  }
  return out;
}

}  // namespace cplan
