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

#ifndef CPLAN_LEARN_HPP_
#define CPLAN_LEARN_HPP_

#include <span>
#include <string>
#include <vector>

#include "cplan/augment.hpp"
#include "cplan/geometry.hpp"
#include "cplan/planner.hpp"
#include "cplan/scene.hpp"

namespace cplan {

struct LossWeights {
  std::vector<double> path_weights;  // P entries
  std::vector<double> disp_weights;  // T entries, steps 1..T
  double lambda_drivepath = 2.0;
  double lambda_plan = 2.0;

  // 1.0 for t = 1-5, 0.6 for t = 6-11, 0.4 beyond.
  static std::vector<double> BandedWeights(int n);
  static LossWeights Defaults(int path_points = kDefaultPathPoints,
                              int horizon = kDefaultHorizon);
};

// Index of the candidate closest (L2 over the flattened values) to gt;
// lowest index on ties. Throws kShape on empty input or mismatched sizes.
std::size_t WtaAssign(std::span<const std::vector<double>> anchors,
                      std::span<const double> gt);
std::size_t WtaAssign(std::span<const Polyline> anchors, const Polyline& gt);
std::size_t WtaAssign(std::span<const DisplacementSequence> anchors,
                      const DisplacementSequence& gt);

// sum_t w_t (|dx_t| + |dy_t|) over all P points.
double WeightedL1Path(const Polyline& pred, const Polyline& gt, const LossWeights& w);
// sum_{t=1..T} w_t |pred_t - gt_t|; index 0 is not supervised.
double WeightedL1Disp(std::span<const double> pred, std::span<const double> gt,
                      const LossWeights& w);

// Per-candidate input for the offset regressor.
struct FeatureConfig {
  double distance_clip = 20.0;
  double penetration_clip = 2.0;
  double scale = 10.0;
  double agent_radius = 40.0;  // agents farther than this from the ego are ignored
  BoxDims ego_dims;
};

std::size_t FeatureDim(int horizon);

// Reference points sit on `path` at the anchor's cumulative displacements.
// Per step t = 0..T: signed distance from the ego box at the reference point
// to the nearest agent box at step t, and that agent's bearing relative to
// the path heading; then ego speed, mean absolute path curvature and the
// anchor look-ahead.
std::vector<double> BuildFeatures(const Polyline& path, const DisplacementSequence& anchor,
                                  double lookahead, const Frame& frame,
                                  const FeatureConfig& cfg);

// out = W2 tanh(W1 x + b1) + b2; out[0..T] are displacement offsets and
// out[T+1] is the confidence logit.
struct RegressorParams {
  int input_dim = 0;
  int hidden_dim = 0;
  int output_dim = 0;
  std::vector<double> w1;  // hidden x input, row-major
  std::vector<double> b1;
  std::vector<double> w2;  // output x hidden, row-major
  std::vector<double> b2;

  static RegressorParams Zeros(int input_dim, int hidden_dim, int output_dim);
  static RegressorParams Random(int input_dim, int hidden_dim, int output_dim, Rng& rng,
                                double scale);
  std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  // Flat views in the order w1, b1, w2, b2.
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> flat);
  void Validate() const;
};

struct RegressorOutput {
  std::vector<double> offsets;
  double score_logit = 0.0;
};

RegressorOutput Forward(const RegressorParams& params, std::span<const double> features);

// One training example: the M displacement candidates of the
// ground-truth-closest path.
struct TrainSample {
  std::vector<std::vector<double>> features;  // M x D
  std::vector<std::vector<double>> anchors;   // M x (T+1)
  std::vector<double> gt;                     // T+1
  std::size_t winner = 0;
};

struct LossAndGradResult {
  double loss = 0.0;
  RegressorParams grad;
};

// Mean over the batch of lambda_plan * weighted L1 on the winner plus binary
// cross-entropy of every candidate's logit (winner positive).
LossAndGradResult LossAndGrad(const RegressorParams& params, std::span<const TrainSample> batch,
                              const LossWeights& weights);

struct TrainOptions {
  double lr = 0.05;
  int epochs = 30;
  int batch_size = 32;
};

struct TrainResult {
  RegressorParams params;
  std::vector<double> loss_history;  // mean loss per epoch
};

// Mini-batch gradient descent with per-epoch shuffling. Throws
// kTrainingDiverged on a non-finite loss.
TrainResult Train(const RegressorParams& init, std::span<const TrainSample> dataset,
                  const LossWeights& weights, const TrainOptions& opts, Rng& rng);

std::string SerializeParams(const RegressorParams& params);
RegressorParams ParseParams(const std::string& text);

}  // namespace cplan

#endif  // CPLAN_LEARN_HPP_
