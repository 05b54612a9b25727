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

#include "cplan/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cplan/errors.hpp"

namespace cplan {

namespace {

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct CategoryShape {
  AgentCategory category;
  double length;
  double width;
  double max_speed;
};

constexpr CategoryShape kShapes[] = {
    {AgentCategory::kVehicle, 4.5, 2.0, 15.0},
    {AgentCategory::kCyclist, 1.8, 0.8, 8.0},
    {AgentCategory::kPedestrian, 0.8, 0.8, 3.0},
};

const CategoryShape& SampleShape(Rng& rng) {
  const double u = Uniform(rng, 0.0, 1.0);
  if (u < 0.6) return kShapes[0];
  if (u < 0.8) return kShapes[1];
  return kShapes[2];
}

// Time (s) at which the labelled ego rollout reaches arc `s`, linearly
// interpolated between steps; +inf when it never does.
double ArrivalTime(const std::vector<double>& cum, double dt, double s) {
  for (std::size_t t = 1; t < cum.size(); ++t) {
    if (cum[t] >= s) {
      const double step = cum[t] - cum[t - 1];
      const double frac = step > 0.0 ? (s - cum[t - 1]) / step : 1.0;
      return (static_cast<double>(t - 1) + frac) * dt;
    }
  }
  return std::numeric_limits<double>::infinity();
}

PlanLabels ScaleFuture(const PlanLabels& labels, double beta) {
  PlanLabels out = labels;
  for (std::size_t t = 1; t < out.displacements.values.size(); ++t) {
    out.displacements.values[t] = labels.displacements.values[t] * beta;
  }
  return out;
}

}  // namespace

Rng DeriveRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x5eedu};
  return Rng(seq);
}

void AugmentConfig::Validate() const {
  auto bad = [](const std::string& what) { Fail(ErrorCode::kConfig, "augment: " + what); };
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must be in [0,1]");
  if (!(threat_prob >= 0.0 && threat_prob <= 1.0)) bad("threat_prob must be in [0,1]");
  if (!(delta >= 0.0)) bad("delta must be >= 0");
  if (!(d_safe > 0.0)) bad("d_safe must be > 0");
  for (const Interval* r : {&near_range, &far_range, &arrival_time_range}) {
    if (!(r->lo > 0.0 && r->hi >= r->lo)) bad("ranges must be non-empty with positive bounds");
  }
  if (agent_capacity < 1) bad("agent_capacity must be >= 1");
  if (max_attempts < 1) bad("max_attempts must be >= 1");
  if (!(ego_dims.length > 0.0 && ego_dims.width > 0.0)) bad("ego dims must be positive");
}

std::string_view ToString(AgentRole role) {
  switch (role) {
    case AgentRole::kNone: return "none";
    case AgentRole::kThreatening: return "threatening";
    case AgentRole::kNonThreatening: return "non_threatening";
  }
  return "none";
}

bool ShouldInsert(Rng& rng, double ego_displacement_3s, const AugmentConfig& cfg) {
  if (ego_displacement_3s < cfg.delta) return false;
  return Uniform(rng, 0.0, 1.0) < cfg.alpha;
}

OrientedBox EgoBoxAt(const PlanLabels& labels, const std::vector<double>& cumulative,
                     std::size_t t, const BoxDims& dims) {
  return {InterpAlong(labels.drive_path, cumulative[t]), dims.length, dims.width};
}

double MinRolloutDistance(const PlanLabels& labels, const AgentTrack& agent,
                          const BoxDims& ego_dims) {
  const auto cum = labels.displacements.Cumulative();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < cum.size(); ++t) {
    best = std::min(best, MinBoxDistance(EgoBoxAt(labels, cum, t, ego_dims), agent.BoxAt(t)));
  }
  return best;
}

AgentTrack SampleVirtualAgent(Rng& rng, AgentRole role, const PlanLabels& labels,
                              const AugmentConfig& cfg) {
  if (role == AgentRole::kNone) Fail(ErrorCode::kInvalidArgument, "role must be set");
  if (labels.drive_path.size() < 2) {
    Fail(ErrorCode::kAugmentInfeasible, "drive path has fewer than 2 points");
  }
  const auto& disp = labels.displacements;
  const std::size_t horizon = disp.horizon();
  const double dt = disp.dt;
  const auto cum = disp.Cumulative();
  const double reach = cum.back();
  const double min_arc = 0.5 * cfg.ego_dims.length;
  if (horizon == 0 || reach <= min_arc) {
    Fail(ErrorCode::kAugmentInfeasible, "ego rollout too short to place a waypoint");
  }

  PlanLabels parked = labels;
  std::fill(parked.displacements.values.begin() + 1, parked.displacements.values.end(), 0.0);

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const double s_w = Uniform(rng, min_arc, reach);
    const Pose2 w = InterpAlong(labels.drive_path, s_w);
    const double t_w = ArrivalTime(cum, dt, s_w);
    const CategoryShape& shape = SampleShape(rng);

    double t_arr = 0.0;
    double radius = 0.0;
    double bearing = 0.0;
    if (role == AgentRole::kThreatening) {
      const double lo = std::max(cfg.arrival_time_range.lo, t_w - cfg.threat_window);
      const double hi = std::min(cfg.arrival_time_range.hi, t_w + cfg.threat_window);
      if (!(hi > lo)) continue;
      t_arr = Uniform(rng, lo, hi);
      radius = Uniform(rng, cfg.near_range.lo, cfg.near_range.hi);
      const double side = Uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : -1.0;
      bearing = w.heading + side * Uniform(rng, std::numbers::pi / 6, 5 * std::numbers::pi / 6);
    } else {
      // Ego clears the waypoint once its rear has passed it by d_safe.
      const double t_clear =
          ArrivalTime(cum, dt, s_w + cfg.ego_dims.length + cfg.d_safe);
      const double base = std::isfinite(t_clear) ? t_clear : static_cast<double>(horizon) * dt;
      const double lo = std::max(cfg.arrival_time_range.lo, base + cfg.nonthreat_gap);
      const double hi = std::max(cfg.arrival_time_range.hi, lo + 1.0);
      t_arr = Uniform(rng, lo, hi);
      radius = Uniform(rng, cfg.far_range.lo, cfg.far_range.hi);
      bearing = w.heading + Uniform(rng, -std::numbers::pi, std::numbers::pi);
    }
    const double speed = radius / t_arr;
    if (speed > std::min(cfg.max_agent_speed, shape.max_speed)) continue;

    const Vec2 start = w.position() + Vec2{std::cos(bearing), std::sin(bearing)} * radius;
    const Vec2 dir = (w.position() - start) * (1.0 / radius);
    const double heading = std::atan2(dir.y, dir.x);

    AgentTrack agent;
    agent.category = shape.category;
    agent.box = {{start.x, start.y, heading}, shape.length, shape.width};
    agent.confidence = 1.0;
    agent.future.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
      const Vec2 p = start + dir * (speed * static_cast<double>(t) * dt);
      agent.future.push_back({p.x, p.y, heading});
    }

    // A stopped ego must always stay clear so relabelling can reach safety.
    if (MinRolloutDistance(parked, agent, cfg.ego_dims) < cfg.d_safe) continue;
    const double rollout_min = MinRolloutDistance(labels, agent, cfg.ego_dims);
    if (role == AgentRole::kThreatening && rollout_min >= cfg.d_safe) continue;
    if (role == AgentRole::kNonThreatening && rollout_min < cfg.d_safe) continue;
    return agent;
  }
  Fail(ErrorCode::kAugmentInfeasible,
       "no feasible " + std::string(ToString(role)) + " agent after " +
           std::to_string(cfg.max_attempts) + " attempts");
}

std::optional<int> InsertAgent(Frame& frame, AgentTrack& agent, int capacity) {
  std::optional<int> removed;
  if (!frame.agents.empty() && static_cast<int>(frame.agents.size()) >= capacity) {
    auto victim = std::min_element(
        frame.agents.begin(), frame.agents.end(), [](const AgentTrack& a, const AgentTrack& b) {
          if (a.confidence != b.confidence) return a.confidence < b.confidence;
          return a.id < b.id;
        });
    removed = victim->id;
    frame.agents.erase(victim);
  }
  int next_id = 0;
  for (const auto& a : frame.agents) next_id = std::max(next_id, a.id + 1);
  if (removed) next_id = std::max(next_id, *removed + 1);
  agent.id = next_id;
  frame.agents.push_back(agent);
  return removed;
}

double SafeTotalDisplacement(const PlanLabels& labels, const AgentTrack& agent,
                             const BoxDims& ego_dims, double d_safe) {
  const std::size_t horizon = labels.displacements.horizon();
  if (agent.future.size() < horizon) {
    Fail(ErrorCode::kInvalidArgument, "agent future shorter than the label horizon");
  }
  const auto cum = labels.displacements.Cumulative();
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (MinBoxDistance(EgoBoxAt(labels, cum, t, ego_dims), agent.BoxAt(t)) < d_safe) {
      return cum[t - 1];
    }
  }
  return cum[horizon];
}

std::pair<PlanLabels, double> RelabelDisplacements(const PlanLabels& labels,
                                                   double d_safe_total) {
  const double d_orig = labels.displacements.FutureSum();
  if (!(d_orig > 0.0)) {
    Fail(ErrorCode::kRelabelDegenerate, "original displacement sum is zero");
  }
  if (!(d_safe_total >= 0.0 && d_safe_total <= d_orig * (1.0 + 1e-12))) {
    Fail(ErrorCode::kInvalidArgument, "D_safe must lie in [0, D_orig]");
  }
  const double beta = std::min(1.0, d_safe_total / d_orig);
  return {ScaleFuture(labels, beta), beta};
}

AugmentResult AugmentFrame(const Frame& frame, const PlanLabels& labels, Rng& rng,
                           const AugmentConfig& cfg) {
  AugmentResult result{frame, labels, {}};
  const auto& values = labels.displacements.values;
  const std::size_t steps_3s = std::min<std::size_t>(
      labels.displacements.horizon(),
      static_cast<std::size_t>(std::lround(3.0 / labels.displacements.dt)));
  double disp_3s = 0.0;
  for (std::size_t t = 1; t <= steps_3s; ++t) disp_3s += values[t];

  if (!ShouldInsert(rng, disp_3s, cfg)) return result;
  const AgentRole role = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < cfg.threat_prob
                             ? AgentRole::kThreatening
                             : AgentRole::kNonThreatening;
  AgentTrack agent;
  try {
    agent = SampleVirtualAgent(rng, role, labels, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kAugmentInfeasible) throw;
    return result;
  }

  PlanLabels relabeled = labels;
  double beta = 1.0;
  if (role == AgentRole::kThreatening) {
    // Scaling moves every ego step, so re-check the scaled rollout until its
    // safe prefix covers the whole horizon. The zero plan is safe by
    // construction of the sampled agent.
    const double d_orig = labels.displacements.FutureSum();
    double d_cur = d_orig;
    bool settled = false;
    for (int iter = 0; iter < 64 && !settled; ++iter) {
      const PlanLabels trial = ScaleFuture(labels, d_cur / d_orig);
      const double safe = SafeTotalDisplacement(trial, agent, cfg.ego_dims, cfg.d_safe);
      if (safe >= trial.displacements.FutureSum()) {
        settled = true;
      } else {
        d_cur = safe;
      }
    }
    if (!settled) d_cur = 0.0;
    std::tie(relabeled, beta) = RelabelDisplacements(labels, d_cur);
    if (MinRolloutDistance(relabeled, agent, cfg.ego_dims) < cfg.d_safe) return result;
  }

  result.report.replaced_agent_id = InsertAgent(result.frame, agent, cfg.agent_capacity);
  result.report.inserted_agent_id = agent.id;
  result.report.inserted = true;
  result.report.role = role;
  result.report.beta = beta;
  result.labels = std::move(relabeled);
  return result;
}

}  // namespace cplan
