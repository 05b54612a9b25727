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

#ifndef CPLAN_CONFIG_HPP_
#define CPLAN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cplan/augment.hpp"
#include "cplan/learn.hpp"
#include "cplan/planner.hpp"
#include "cplan/simctrl.hpp"

namespace cplan {

struct AnchorConfig {
  int path_count = 6;      // N_d
  int kmeans_iters = 50;
  std::vector<double> lookaheads = kDefaultLookaheads;  // m reached after 1 s
};

struct LearnConfig {
  int hidden = 64;
  double init_scale = 1.0;
  TrainOptions train{0.01, 200, 16};  // lr, epochs, batch size
  double lambda_plan = 2.0;
  FeatureConfig features;
  double augment_alpha = 0.0;  // used by the `train` subcommand
  bool path_aware = true;      // false trains the parallel-baseline head
};

struct DataConfig {
  int nominal_scenarios = 120;  // expert episodes recorded for training
  std::uint64_t first_seed = 1;
  RecordOptions record;
};

struct BenchConfig {
  std::vector<std::string> families = {"cut_in", "crossing", "lead_brake", "merge"};
  int episodes_per_family = 50;
  std::uint64_t first_seed = 1000;
  double augment_alpha = 0.1;
  std::vector<double> alpha_sweep = {0.0, 0.1, 0.3};
  std::vector<std::string> plot_scenarios;  // empty: first episode of each family
};

struct IoConfig {
  std::string frames;     // NDJSON frame log input
  std::string anchors;    // anchor JSON input
  std::string params;     // regressor JSON input; empty selects cost descent
  std::string scenarios;  // scenario JSON; empty generates the bench suite
};

struct Config {
  std::uint64_t seed = 7;
  double dt = kDefaultDt;
  int horizon = kDefaultHorizon;
  int path_points = kDefaultPathPoints;
  double path_spacing = kDefaultPathSpacing;
  BoxDims vehicle;
  AugmentConfig augment;
  AnchorConfig anchors;
  CostConfig cost;
  LearnConfig learn;
  SimConfig sim;
  DataConfig data;
  BenchConfig bench;
  IoConfig io;

  // Copies the shared fields (dt, horizon, path geometry, vehicle) into the
  // per-module blocks and checks every invariant. Throws kConfig.
  void Finalize();

  LabelOptions label_options() const { return {horizon, path_points, path_spacing, dt}; }
  LossWeights loss_weights() const;
};

// Parses a config document. Relative io paths are resolved against
// `base_dir`. Every failure, malformed JSON included, throws kConfig.
Config ParseConfig(const std::string& text, const std::string& base_dir = "");
Config LoadConfig(const std::string& path);
// Full config tree with every key present.
std::string SerializeConfig(const Config& cfg);

}  // namespace cplan

#endif  // CPLAN_CONFIG_HPP_
