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

#include "cplan/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"

namespace cplan {

std::vector<double> LossWeights::BandedWeights(int n) {
  std::vector<double> w(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const int t = i + 1;
    w[i] = t <= 5 ? 1.0 : (t <= 11 ? 0.6 : 0.4);
  }
  return w;
}

LossWeights LossWeights::Defaults(int path_points, int horizon) {
  LossWeights w;
  w.path_weights = BandedWeights(path_points);
  w.disp_weights = BandedWeights(horizon);
  return w;
}

std::size_t WtaAssign(std::span<const std::vector<double>> anchors,
                      std::span<const double> gt) {
  if (anchors.empty()) Fail(ErrorCode::kShape, "WTA needs at least one anchor");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].size() != gt.size()) {
      Fail(ErrorCode::kShape, "anchor " + std::to_string(i) + " has " +
                                  std::to_string(anchors[i].size()) + " values, gt has " +
                                  std::to_string(gt.size()));
    }
    double d = 0.0;
    for (std::size_t j = 0; j < gt.size(); ++j) {
      d += (anchors[i][j] - gt[j]) * (anchors[i][j] - gt[j]);
    }
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::size_t WtaAssign(std::span<const Polyline> anchors, const Polyline& gt) {
  auto flat = [](const Polyline& p) {
    std::vector<double> v;
    for (const auto& q : p.points()) {
      v.push_back(q.x);
      v.push_back(q.y);
    }
    return v;
  };
  std::vector<std::vector<double>> a;
  a.reserve(anchors.size());
  for (const auto& p : anchors) a.push_back(flat(p));
  const auto g = flat(gt);
  return WtaAssign(a, g);
}

std::size_t WtaAssign(std::span<const DisplacementSequence> anchors,
                      const DisplacementSequence& gt) {
  std::vector<std::vector<double>> a;
  a.reserve(anchors.size());
  for (const auto& d : anchors) a.push_back(d.values);
  return WtaAssign(a, gt.values);
}

double WeightedL1Path(const Polyline& pred, const Polyline& gt, const LossWeights& w) {
  if (pred.size() != gt.size() || w.path_weights.size() < pred.size()) {
    Fail(ErrorCode::kShape, "path loss needs equal point counts and enough weights");
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const Vec2 d = pred.points()[t] - gt.points()[t];
    loss += w.path_weights[t] * (std::abs(d.x) + std::abs(d.y));
  }
  return loss;
}

double WeightedL1Disp(std::span<const double> pred, std::span<const double> gt,
                      const LossWeights& w) {
  if (pred.size() != gt.size() || pred.empty() || w.disp_weights.size() < pred.size() - 1) {
    Fail(ErrorCode::kShape, "displacement loss needs equal lengths and enough weights");
  }
  double loss = 0.0;
  for (std::size_t t = 1; t < pred.size(); ++t) {
    loss += w.disp_weights[t - 1] * std::abs(pred[t] - gt[t]);
  }
  return loss;
}

RegressorParams RegressorParams::Zeros(int input_dim, int hidden_dim, int output_dim) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 2) {
    Fail(ErrorCode::kShape, "regressor dimensions must be positive (output >= 2)");
  }
  RegressorParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.output_dim = output_dim;
  p.w1.assign(static_cast<std::size_t>(hidden_dim) * input_dim, 0.0);
  p.b1.assign(hidden_dim, 0.0);
  p.w2.assign(static_cast<std::size_t>(output_dim) * hidden_dim, 0.0);
  p.b2.assign(output_dim, 0.0);
  return p;
}

RegressorParams RegressorParams::Random(int input_dim, int hidden_dim, int output_dim,
                                        Rng& rng, double scale) {
  RegressorParams p = Zeros(input_dim, hidden_dim, output_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s1 = scale / std::sqrt(static_cast<double>(input_dim));
  const double s2 = scale / std::sqrt(static_cast<double>(hidden_dim));
  for (auto& v : p.w1) v = s1 * normal(rng);
  for (auto& v : p.w2) v = s2 * normal(rng);
  return p;
}

std::vector<double> RegressorParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), w1.begin(), w1.end());
  flat.insert(flat.end(), b1.begin(), b1.end());
  flat.insert(flat.end(), w2.begin(), w2.end());
  flat.insert(flat.end(), b2.begin(), b2.end());
  return flat;
}

void RegressorParams::Unflatten(std::span<const double> flat) {
  if (flat.size() != size()) Fail(ErrorCode::kShape, "flat parameter size mismatch");
  auto it = flat.begin();
  for (auto* v : {&w1, &b1, &w2, &b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
    it += static_cast<std::ptrdiff_t>(v->size());
  }
}

void RegressorParams::Validate() const {
  const auto h = static_cast<std::size_t>(hidden_dim);
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 2 ||
      w1.size() != h * input_dim || b1.size() != h ||
      w2.size() != static_cast<std::size_t>(output_dim) * h ||
      b2.size() != static_cast<std::size_t>(output_dim)) {
    Fail(ErrorCode::kShape, "regressor parameter dimensions are inconsistent");
  }
  for (double v : Flatten()) {
    if (!std::isfinite(v)) Fail(ErrorCode::kShape, "non-finite regressor parameter");
  }
}

namespace {

struct Activations {
  std::vector<double> hidden;  // tanh outputs
  std::vector<double> out;
};

Activations Evaluate(const RegressorParams& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.input_dim) {
    Fail(ErrorCode::kShape, "feature dimension " + std::to_string(x.size()) +
                                " does not match regressor input " +
                                std::to_string(p.input_dim));
  }
  Activations a;
  a.hidden.resize(p.hidden_dim);
  for (int h = 0; h < p.hidden_dim; ++h) {
    const double* row = &p.w1[static_cast<std::size_t>(h) * p.input_dim];
    double z = p.b1[h];
    for (int i = 0; i < p.input_dim; ++i) z += row[i] * x[i];
    a.hidden[h] = std::tanh(z);
  }
  a.out.resize(p.output_dim);
  for (int o = 0; o < p.output_dim; ++o) {
    const double* row = &p.w2[static_cast<std::size_t>(o) * p.hidden_dim];
    double z = p.b2[o];
    for (int h = 0; h < p.hidden_dim; ++h) z += row[h] * a.hidden[h];
    a.out[o] = z;
  }
  return a;
}

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

RegressorOutput Forward(const RegressorParams& params, std::span<const double> features) {
  const Activations a = Evaluate(params, features);
  RegressorOutput r;
  r.offsets.assign(a.out.begin(), a.out.end() - 1);
  r.score_logit = a.out.back();
  return r;
}

LossAndGradResult LossAndGrad(const RegressorParams& params, std::span<const TrainSample> batch,
                              const LossWeights& weights) {
  LossAndGradResult result;
  result.grad = RegressorParams::Zeros(params.input_dim, params.hidden_dim, params.output_dim);
  if (batch.empty()) return result;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const int n_off = params.output_dim - 1;
  RegressorParams& g = result.grad;
  std::vector<double> dout(params.output_dim);
  std::vector<double> dpre(params.hidden_dim);

  for (const auto& sample : batch) {
    const std::size_t m_count = sample.features.size();
    if (sample.anchors.size() != m_count || sample.winner >= m_count ||
        static_cast<int>(sample.gt.size()) != n_off) {
      Fail(ErrorCode::kShape, "malformed training sample");
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      const auto& x = sample.features[m];
      const Activations a = Evaluate(params, x);
      std::fill(dout.begin(), dout.end(), 0.0);

      const bool is_winner = m == sample.winner;
      if (is_winner) {
        if (static_cast<int>(sample.anchors[m].size()) != n_off) {
          Fail(ErrorCode::kShape, "anchor length does not match regressor output");
        }
        for (int t = 1; t < n_off; ++t) {
          const double r = sample.anchors[m][t] + a.out[t] - sample.gt[t];
          const double w = weights.lambda_plan * weights.disp_weights.at(t - 1);
          result.loss += inv_n * w * std::abs(r);
          dout[t] = inv_n * w * Sign(r);
        }
      }
      const double z = a.out.back();
      const double y = is_winner ? 1.0 : 0.0;
      result.loss += inv_n * (Softplus(z) - y * z);
      dout.back() = inv_n * (Sigmoid(z) - y);

      for (int o = 0; o < params.output_dim; ++o) {
        if (dout[o] == 0.0) continue;
        double* grow = &g.w2[static_cast<std::size_t>(o) * params.hidden_dim];
        for (int h = 0; h < params.hidden_dim; ++h) grow[h] += dout[o] * a.hidden[h];
        g.b2[o] += dout[o];
      }
      for (int h = 0; h < params.hidden_dim; ++h) {
        double dh = 0.0;
        for (int o = 0; o < params.output_dim; ++o) {
          dh += params.w2[static_cast<std::size_t>(o) * params.hidden_dim + h] * dout[o];
        }
        dpre[h] = dh * (1.0 - a.hidden[h] * a.hidden[h]);
      }
      for (int h = 0; h < params.hidden_dim; ++h) {
        if (dpre[h] == 0.0) continue;
        double* grow = &g.w1[static_cast<std::size_t>(h) * params.input_dim];
        for (int i = 0; i < params.input_dim; ++i) grow[i] += dpre[h] * x[i];
        g.b1[h] += dpre[h];
      }
    }
  }
  return result;
}

TrainResult Train(const RegressorParams& init, std::span<const TrainSample> dataset,
                  const LossWeights& weights, const TrainOptions& opts, Rng& rng) {
  if (!(opts.lr >= 0.0) || opts.epochs < 0 || opts.batch_size < 1) {
    Fail(ErrorCode::kInvalidArgument, "invalid training options");
  }
  TrainResult result{init, {}};
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TrainSample> batch;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      const std::size_t end = std::min(order.size(), start + opts.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(dataset[order[i]]);
      const auto lg = LossAndGrad(result.params, batch, weights);
      if (!std::isfinite(lg.loss)) {
        Fail(ErrorCode::kTrainingDiverged, "loss became non-finite in epoch " +
                                               std::to_string(epoch));
      }
      epoch_loss += lg.loss * static_cast<double>(end - start);
      if (opts.lr == 0.0) continue;
      auto step = [&](std::vector<double>& p, const std::vector<double>& gr) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= opts.lr * gr[i];
      };
      step(result.params.w1, lg.grad.w1);
      step(result.params.b1, lg.grad.b1);
      step(result.params.w2, lg.grad.w2);
      step(result.params.b2, lg.grad.b2);
    }
    result.loss_history.push_back(dataset.empty() ? 0.0 : epoch_loss / dataset.size());
  }
  for (double v : result.params.Flatten()) {
    if (!std::isfinite(v)) Fail(ErrorCode::kTrainingDiverged, "parameters became non-finite");
  }
  return result;
}

std::string SerializeParams(const RegressorParams& p) {
  using json = nlohmann::ordered_json;
  auto matrix = [](const std::vector<double>& flat, int rows, int cols) {
    json m = json::array();
    for (int r = 0; r < rows; ++r) {
      m.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r) * cols,
                                      flat.begin() + static_cast<std::ptrdiff_t>(r + 1) * cols));
    }
    return m;
  };
  json j;
  j["dims"] = {p.input_dim, p.hidden_dim, p.output_dim};
  j["W1"] = matrix(p.w1, p.hidden_dim, p.input_dim);
  j["b1"] = p.b1;
  j["W2"] = matrix(p.w2, p.output_dim, p.hidden_dim);
  j["b2"] = p.b2;
  return j.dump() + "\n";
}

RegressorParams ParseParams(const std::string& text) {
  using json = nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("params: ") + e.what());
  }
  const FieldContext ctx("params");
  const auto dims = NumberTuple(GetField(j, "dims", ctx), 3, ctx.Child("dims"));
  RegressorParams p = RegressorParams::Zeros(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                                             static_cast<int>(dims[2]));
  auto read_matrix = [&](const char* key, std::vector<double>& flat, int rows, int cols) {
    const json& m = GetArray(j, key, ctx);
    if (static_cast<int>(m.size()) != rows) Fail(ErrorCode::kShape, ctx.Describe(key) + ": row count");
    for (int r = 0; r < rows; ++r) {
      const auto row = NumberVector(m[r], ctx.Child(key, r));
      if (static_cast<int>(row.size()) != cols) {
        Fail(ErrorCode::kShape, ctx.Describe(key) + ": column count");
      }
      std::copy(row.begin(), row.end(), flat.begin() + static_cast<std::ptrdiff_t>(r) * cols);
    }
  };
  read_matrix("W1", p.w1, p.hidden_dim, p.input_dim);
  read_matrix("W2", p.w2, p.output_dim, p.hidden_dim);
  p.b1 = NumberVector(GetArray(j, "b1", ctx), ctx.Child("b1"));
  p.b2 = NumberVector(GetArray(j, "b2", ctx), ctx.Child("b2"));
  p.Validate();
  return p;
}

}  // namespace cplan
