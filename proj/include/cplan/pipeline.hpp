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

#ifndef CPLAN_PIPELINE_HPP_
#define CPLAN_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cplan/config.hpp"

namespace cplan {

// --- Planner stack -----------------------------------------------------------

enum class RefineMode { kCostDescent, kLearned };

struct PlannerStack {
  PathAnchorSet paths;
  DisplacementAnchors disps;
  CostConfig cost;
  FeatureConfig features;
  RefineMode mode = RefineMode::kCostDescent;
  std::optional<RegressorParams> params;  // required for kLearned
  // false: longitudinal reasoning (features, collision rollout) runs on a
  // straight-ahead path instead of the selected drive path.
  bool path_aware = true;
  int path_points = kDefaultPathPoints;
  double path_spacing = kDefaultPathSpacing;
};

// Refined and scored candidates of the best-scoring drive path, in
// displacement-anchor order.
std::vector<CandidatePlan> PlanCandidates(const PlannerStack& stack, const Frame& frame,
                                          const Polyline& target);
PlanOutput PlanFrame(const PlannerStack& stack, const Frame& frame, const Polyline& target);
PlannerFn MakePlanner(PlannerStack stack);

// --- Anchors -----------------------------------------------------------------

struct LabeledFrame {
  std::size_t index = 0;  // position in the source log
  PlanLabels labels;
};

// Derives labels for every frame that supports them; others are counted.
std::vector<LabeledFrame> LabelFrames(const FrameLog& log, const LabelOptions& opts,
                                      std::size_t* skipped = nullptr);

struct AnchorBuild {
  PathAnchorSet paths;
  DisplacementAnchors disps;
  std::vector<double> inertia_history;
  std::size_t labeled = 0;
  std::size_t skipped = 0;
};

AnchorBuild BuildAnchors(const FrameLog& log, const Config& cfg);

std::string SerializeAnchors(const PathAnchorSet& paths, const DisplacementAnchors& disps);
std::pair<PathAnchorSet, DisplacementAnchors> ParseAnchors(const std::string& text);

// --- Augmentation ------------------------------------------------------------

struct AugmentedItem {
  Frame frame;
  std::optional<PlanLabels> labels;  // empty when the frame has no labels
  AugmentReport report;
};

struct AugmentBatch {
  std::vector<AugmentedItem> items;
  std::size_t eligible = 0;  // frames with derivable labels
  std::size_t inserted = 0;
  std::size_t threatening = 0;
  double mean_threat_beta = 1.0;
};

// Frame i draws from DeriveRng(seed, i), so results do not depend on
// batch order or thread count.
AugmentBatch AugmentFrames(const FrameLog& log, const AugmentConfig& cfg,
                           const LabelOptions& opts, std::uint64_t seed);

std::string SerializeAugmentReports(const AugmentBatch& batch);

// --- Training ----------------------------------------------------------------

std::vector<TrainSample> BuildDataset(const std::vector<Frame>& frames,
                                      const std::vector<PlanLabels>& labels,
                                      const PathAnchorSet& paths,
                                      const DisplacementAnchors& disps,
                                      const FeatureConfig& features, bool path_aware,
                                      int path_points, double path_spacing);

struct TrainedModel {
  RegressorParams params;
  std::vector<double> loss_history;
  std::size_t samples = 0;
  std::size_t augmented = 0;
};

TrainedModel TrainModel(const FrameLog& log, const PathAnchorSet& paths,
                        const DisplacementAnchors& disps, const Config& cfg, double alpha,
                        bool path_aware);

// Expert drives through `data.nominal_scenarios` nominal scenes.
FrameLog RecordNominalFrames(const Config& cfg, int threads);

// --- Simulation --------------------------------------------------------------

std::vector<Scenario> MakeBenchSuite(const Config& cfg);

struct SuiteResult {
  std::vector<EpisodeLog> logs;
  std::vector<EpisodeMetrics> metrics;
  SuiteMetrics summary;
};

// Runs every scenario on up to `threads` workers; results keep scenario order.
SuiteResult RunSuite(const std::vector<Scenario>& scenarios, const PlannerStack& stack,
                     const SimConfig& sim, int threads);

PlannerStack MakeStack(const Config& cfg, PathAnchorSet paths, DisplacementAnchors disps,
                       std::optional<RegressorParams> params, bool path_aware);

std::string MetricsCsv(const std::vector<Scenario>& scenarios, const SuiteResult& result);
std::string PlotCsv(const EpisodeLog& log);

// --- Bench -------------------------------------------------------------------

struct BenchVariant {
  std::string name;
  double alpha = 0.0;
  bool path_aware = true;
  TrainedModel model;
  SuiteResult suite;
};

struct BenchResult {
  AnchorBuild anchors;
  std::size_t train_frames = 0;
  std::vector<Scenario> scenarios;
  std::vector<BenchVariant> variants;  // parallel-baseline, cascaded, cascaded+augment
  std::vector<std::pair<double, SuiteMetrics>> alpha_sweep;
};

// Trains the three variants on the same expert log (recorded when `log` is
// null) and runs each over the same suite.
BenchResult RunBench(const Config& cfg, const FrameLog* log, int threads);

std::string BenchComparisonCsv(const BenchResult& result);
std::string BenchMetricsCsv(const BenchResult& result);
std::string AlphaSweepCsv(const BenchResult& result);

}  // namespace cplan

#endif  // CPLAN_PIPELINE_HPP_
