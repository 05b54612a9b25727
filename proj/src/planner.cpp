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

#include "cplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cplan/errors.hpp"

namespace cplan {

namespace {

std::vector<double> Flatten(const Polyline& p) {
  std::vector<double> v;
  v.reserve(2 * p.size());
  for (const auto& pt : p.points()) {
    v.push_back(pt.x);
    v.push_back(pt.y);
  }
  return v;
}

double SquaredDistance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

Polyline Unflatten(const std::vector<double>& v) {
  std::vector<Vec2> pts(v.size() / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {v[2 * i], v[2 * i + 1]};
  return Polyline(std::move(pts));
}

}  // namespace

ClusterResult ClusterPathAnchors(const std::vector<Polyline>& gt_paths, int k, int iters,
                                 Rng& rng) {
  if (k < 1) Fail(ErrorCode::kCluster, "k must be >= 1");
  if (gt_paths.empty()) Fail(ErrorCode::kCluster, "no ground-truth paths to cluster");
  const std::size_t n_points = gt_paths[0].size();
  std::vector<std::vector<double>> data;
  data.reserve(gt_paths.size());
  for (const auto& p : gt_paths) {
    if (p.size() != n_points) Fail(ErrorCode::kCluster, "paths have differing point counts");
    data.push_back(Flatten(p));
  }
  const std::set<std::vector<double>> distinct(data.begin(), data.end());
  if (static_cast<std::size_t>(k) > distinct.size()) {
    Fail(ErrorCode::kCluster, "k=" + std::to_string(k) + " exceeds the " +
                                  std::to_string(distinct.size()) + " distinct paths");
  }

  // k-means++ seeding.
  std::vector<std::vector<double>> centers;
  centers.push_back(data[std::uniform_int_distribution<std::size_t>(0, data.size() - 1)(rng)]);
  std::vector<double> d2(data.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, SquaredDistance(data[i], c));
      d2[i] = best;
      total += best;
    }
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    std::size_t pick = 0;
    for (; pick + 1 < data.size(); ++pick) {
      if (d2[pick] > 0.0 && u < d2[pick]) break;
      u -= d2[pick];
    }
    while (d2[pick] == 0.0) pick = (pick + 1) % data.size();
    centers.push_back(data[pick]);
  }

  ClusterResult result;
  result.assignment.assign(data.size(), -1);
  for (int it = 0; it < std::max(iters, 1); ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(data[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      changed = changed || result.assignment[i] != best_c;
      result.assignment[i] = best_c;
      inertia += best;
    }
    result.inertia_history.push_back(inertia);
    if (!changed && it > 0) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(data[0].size(), 0.0));
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const int c = result.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < data[i].size(); ++j) sums[c][j] += data[i][j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // keep the previous center
      for (auto& v : sums[c]) v /= counts[c];
      centers[c] = std::move(sums[c]);
    }
  }
  for (const auto& c : centers) result.anchors.anchors.push_back(Unflatten(c));
  return result;
}

DisplacementAnchors MakeDisplacementAnchors(const std::vector<double>& lookaheads, int horizon,
                                            double dt) {
  if (lookaheads.empty() || horizon < 1 || !(dt > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "invalid displacement anchor parameters");
  }
  DisplacementAnchors out;
  out.lookaheads = lookaheads;
  out.dt = dt;
  for (double l : lookaheads) {
    if (!(l >= 0.0)) Fail(ErrorCode::kInvalidArgument, "look-ahead must be >= 0");
    out.values.emplace_back(static_cast<std::size_t>(horizon) + 1, l * dt);
  }
  return out;
}

void CostConfig::Validate() const {
  if (w_progress < 0.0 || w_collision < 0.0 || w_smooth < 0.0) {
    Fail(ErrorCode::kConfig, "cost weights must be >= 0");
  }
  if (w_progress + w_collision + w_smooth <= 0.0) {
    Fail(ErrorCode::kConfig, "at least one cost weight must be > 0");
  }
  if (!(collision_check_dt > 0.0)) Fail(ErrorCode::kConfig, "collision_check_dt must be > 0");
  if (!(max_scale >= 0.0) || !(scale_step > 0.0)) Fail(ErrorCode::kConfig, "bad scale grid");
  if (!(speed_limit > 0.0)) Fail(ErrorCode::kConfig, "speed_limit must be > 0");
}

Polyline PlaceInWorld(const Polyline& local, const Pose2& pose) {
  std::vector<Vec2> pts;
  pts.reserve(local.size());
  for (const auto& p : local.points()) pts.push_back(ToWorld(pose, p));
  return Polyline(std::move(pts));
}

Polyline ToEgoFrame(const Polyline& world, const Pose2& pose) {
  std::vector<Vec2> pts;
  pts.reserve(world.size());
  for (const auto& p : world.points()) pts.push_back(ToLocal(pose, p));
  return Polyline(std::move(pts));
}

double PathRmsDistance(const Polyline& candidate, const Polyline& target) {
  double sum = 0.0;
  const auto& pts = candidate.points();
  const auto& arc = candidate.cum_arc();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Pose2 q = InterpAlong(target, arc[i]);
    const double d = Distance(pts[i], q.position());
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(pts.size()));
}

std::vector<CandidatePlan> GenCandidates(const Frame& frame, const Polyline& target_path,
                                         const PathAnchorSet& path_set,
                                         const DisplacementAnchors& disp_anchors) {
  if (path_set.anchors.empty() || disp_anchors.values.empty()) {
    Fail(ErrorCode::kNoCandidates, "empty anchor set");
  }
  std::vector<CandidatePlan> out;
  out.reserve(path_set.anchors.size() * disp_anchors.size());
  for (std::size_t i = 0; i < path_set.anchors.size(); ++i) {
    const Polyline placed = PlaceInWorld(path_set.anchors[i], frame.ego.pose);
    const double score = -PathRmsDistance(placed, target_path);
    for (std::size_t m = 0; m < disp_anchors.size(); ++m) {
      CandidatePlan c;
      c.path = placed;
      c.path_score = score;
      c.displacements = {disp_anchors.values[m], disp_anchors.dt};
      c.anchor_ids = {static_cast<int>(i), static_cast<int>(m)};
      out.push_back(std::move(c));
    }
  }
  return out;
}

int CountOverlapSteps(const Polyline& path, const DisplacementSequence& disps,
                      const std::vector<AgentTrack>& agents, const CostConfig& cfg) {
  const auto cum = disps.Cumulative();
  const int stride = std::max(1, static_cast<int>(std::lround(cfg.collision_check_dt / disps.dt)));
  int count = 0;
  for (std::size_t t = stride; t < cum.size(); t += stride) {
    const OrientedBox ego{InterpAlong(path, cum[t]), cfg.ego_dims.length, cfg.ego_dims.width};
    for (const auto& a : agents) {
      if (BoxesOverlap(ego, a.BoxAt(t))) {
        ++count;
        break;
      }
    }
  }
  return count;
}

double RefinementCost(const DisplacementSequence& disps, int overlap_steps,
                      const CostConfig& cfg) {
  double smooth = 0.0;
  for (std::size_t t = 1; t < disps.values.size(); ++t) {
    const double d = disps.values[t] - disps.values[t - 1];
    smooth += d * d;
  }
  return -cfg.w_progress * disps.FutureSum() + cfg.w_collision * overlap_steps +
         cfg.w_smooth * smooth;
}

CandidatePlan RefineDisplacements(const CandidatePlan& candidate, const Frame& frame,
                                  const CostConfig& cfg, const Polyline* rollout_path) {
  const Polyline& path = rollout_path ? *rollout_path : candidate.path;
  const auto& base = candidate.displacements;
  const double peak = base.values.empty()
                          ? 0.0
                          : *std::max_element(base.values.begin(), base.values.end());
  const double cap = cfg.speed_limit * base.dt;
  const int steps = static_cast<int>(std::lround(cfg.max_scale / cfg.scale_step));

  CandidatePlan best = candidate;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;
  DisplacementSequence trial = base;
  for (int i = 0; i <= steps; ++i) {
    const double k = i * cfg.scale_step;
    if (i > 0 && k * peak > cap) break;
    for (std::size_t t = 0; t < trial.values.size(); ++t) {
      trial.values[t] = std::max(0.0, base.values[t] * k);
    }
    const int overlaps = CountOverlapSteps(path, trial, frame.agents, cfg);
    const double cost = RefinementCost(trial, overlaps, cfg);
    if (cost < best_cost) {
      best_cost = cost;
      best.displacements = trial;
      best.overlap_steps = overlaps;
      found = true;
    }
  }
  if (!found) best.displacements.values.assign(base.values.size(), 0.0);
  best.base_score = cfg.w_progress * best.displacements.FutureSum();
  best.long_score = best.base_score;
  return best;
}

void CollisionPenalizedScores(std::vector<CandidatePlan>& candidates, const Frame& frame,
                              const CostConfig& cfg, const Polyline* rollout_path) {
  for (auto& c : candidates) {
    const Polyline& path = rollout_path ? *rollout_path : c.path;
    c.overlap_steps = CountOverlapSteps(path, c.displacements, frame.agents, cfg);
    c.long_score = c.base_score - cfg.w_collision * c.overlap_steps;
  }
}

const CandidatePlan& SelectPlan(const std::vector<CandidatePlan>& candidates) {
  if (candidates.empty()) Fail(ErrorCode::kNoCandidates, "no candidates to select from");
  const CandidatePlan* best_path = &candidates[0];
  for (const auto& c : candidates) {
    if (c.path_score > best_path->path_score ||
        (c.path_score == best_path->path_score && c.anchor_ids.path < best_path->anchor_ids.path)) {
      best_path = &c;
    }
  }
  const int path_index = best_path->anchor_ids.path;
  const CandidatePlan* best = nullptr;
  for (const auto& c : candidates) {
    if (c.anchor_ids.path != path_index) continue;
    if (!best || c.long_score > best->long_score ||
        (c.long_score == best->long_score && c.anchor_ids.disp < best->anchor_ids.disp)) {
      best = &c;
    }
  }
  return *best;
}

std::vector<TimedPose> ReconstructTrajectory(const Polyline& path,
                                             const DisplacementSequence& disps) {
  const auto cum = disps.Cumulative();
  std::vector<TimedPose> out;
  out.reserve(cum.size() > 0 ? cum.size() - 1 : 0);
  for (std::size_t t = 1; t < cum.size(); ++t) {
    out.push_back({static_cast<double>(t) * disps.dt, InterpAlong(path, cum[t])});
  }
  return out;
}

Polyline StraightAhead(const Pose2& pose, std::size_t points, double spacing) {
  std::vector<Vec2> pts;
  pts.reserve(points);
  for (std::size_t i = 0; i < std::max<std::size_t>(points, 2); ++i) {
    pts.push_back(ToWorld(pose, {static_cast<double>(i) * spacing, 0.0}));
  }
  return Polyline(std::move(pts));
}

Polyline RouteAhead(const Polyline& route, const Pose2& pose, std::size_t points,
                    double spacing) {
  const double s0 = ProjectOnto(route, pose.position()).arc;
  std::vector<Vec2> pts;
  pts.reserve(points);
  for (std::size_t i = 0; i < std::max<std::size_t>(points, 2); ++i) {
    pts.push_back(InterpAlong(route, s0 + static_cast<double>(i) * spacing).position());
  }
  return Polyline(std::move(pts));
}

}  // namespace cplan
