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

#ifndef CPLAN_PLANNER_HPP_
#define CPLAN_PLANNER_HPP_

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "cplan/augment.hpp"
#include "cplan/geometry.hpp"
#include "cplan/scene.hpp"

namespace cplan {

// Drive-path prototypes in the ego frame (origin at the ego, +x forward).
struct PathAnchorSet {
  std::vector<Polyline> anchors;
  std::size_t points_per_anchor() const { return anchors.empty() ? 0 : anchors[0].size(); }
};

struct ClusterResult {
  PathAnchorSet anchors;
  std::vector<double> inertia_history;  // within-cluster sum of squares per iteration
  std::vector<int> assignment;
};

// k-means (k-means++ seeding) over paths flattened to 2P-dim vectors.
// Throws kCluster when k exceeds the number of distinct paths.
ClusterResult ClusterPathAnchors(const std::vector<Polyline>& gt_paths, int k, int iters,
                                 Rng& rng);

// M constant per-step displacement profiles over T+1 steps.
struct DisplacementAnchors {
  std::vector<double> lookaheads;            // m reached after one second
  std::vector<std::vector<double>> values;   // M x (T+1)
  double dt = kDefaultDt;

  std::size_t size() const { return values.size(); }
};

inline const std::vector<double> kDefaultLookaheads = {0.25, 1.7, 4.0, 6.0, 8.5};

// Per-step value L * dt for every look-ahead L.
DisplacementAnchors MakeDisplacementAnchors(const std::vector<double>& lookaheads, int horizon,
                                            double dt);

struct AnchorIds {
  int path = 0;
  int disp = 0;
  bool operator==(const AnchorIds&) const = default;
};

struct CandidatePlan {
  Polyline path;
  double path_score = 0.0;
  DisplacementSequence displacements;
  double base_score = 0.0;  // progress or learned confidence, before penalty
  double long_score = 0.0;
  AnchorIds anchor_ids;
  int overlap_steps = 0;
};

struct CostConfig {
  double w_progress = 1.0;
  double w_collision = 100.0;
  double w_smooth = 0.1;
  double collision_check_dt = kDefaultDt;
  BoxDims ego_dims;
  double max_scale = 1.5;
  double scale_step = 0.01;
  // Per-step displacement cap (speed_limit * dt); infinite disables it.
  double speed_limit = std::numeric_limits<double>::infinity();

  void Validate() const;
};

// Places each anchor at the ego pose and pairs it with every displacement
// anchor: N_d x M candidates, path-major. path_score = -RMS distance to
// target_path.
std::vector<CandidatePlan> GenCandidates(const Frame& frame, const Polyline& target_path,
                                         const PathAnchorSet& path_set,
                                         const DisplacementAnchors& disp_anchors);

double PathRmsDistance(const Polyline& candidate, const Polyline& target);

// Steps t in 1..T (every collision_check_dt) where the ego box rolled along
// `path` overlaps any agent box at the same step.
int CountOverlapSteps(const Polyline& path, const DisplacementSequence& disps,
                      const std::vector<AgentTrack>& agents, const CostConfig& cfg);

double RefinementCost(const DisplacementSequence& disps, int overlap_steps,
                      const CostConfig& cfg);

// Grid search over a uniform scaling factor k in [0, max_scale] applied to
// the candidate's displacement profile; the argmin (smallest k on ties)
// replaces the displacements. base_score is set to w_progress * sum.
// `rollout_path` overrides the path used for the collision rollout.
CandidatePlan RefineDisplacements(const CandidatePlan& candidate, const Frame& frame,
                                  const CostConfig& cfg,
                                  const Polyline* rollout_path = nullptr);

// long_score = base_score - w_collision * overlap steps.
void CollisionPenalizedScores(std::vector<CandidatePlan>& candidates, const Frame& frame,
                              const CostConfig& cfg,
                              const Polyline* rollout_path = nullptr);

// Best path_score first (lowest path index on ties), then best long_score
// within that path (lowest displacement index on ties). Throws kNoCandidates.
const CandidatePlan& SelectPlan(const std::vector<CandidatePlan>& candidates);

struct TimedPose {
  double t = 0.0;
  Pose2 pose;
};

// Waypoint t (1..T) at arc sum_{k=1..t} values[k], time t * dt.
std::vector<TimedPose> ReconstructTrajectory(const Polyline& path,
                                             const DisplacementSequence& disps);

// Straight polyline along the ego heading with the same vertex spacing.
Polyline StraightAhead(const Pose2& pose, std::size_t points, double spacing);

// Target path for the planner: the route sampled ahead of `pose`.
Polyline RouteAhead(const Polyline& route, const Pose2& pose, std::size_t points,
                    double spacing);

// Places a path given in the ego frame at `pose`.
Polyline PlaceInWorld(const Polyline& local, const Pose2& pose);
Polyline ToEgoFrame(const Polyline& world, const Pose2& pose);

}  // namespace cplan

#endif  // CPLAN_PLANNER_HPP_
