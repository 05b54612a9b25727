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

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cplan/errors.hpp"
#include "cplan/scene.hpp"

namespace cplan {

std::string_view ToString(AgentCategory c) {
  switch (c) {
    case AgentCategory::kVehicle: return "vehicle";
    case AgentCategory::kPedestrian: return "pedestrian";
    case AgentCategory::kCyclist: return "cyclist";
  }
  return "vehicle";
}

std::string_view ToString(MapRole r) {
  switch (r) {
    case MapRole::kLane: return "lane";
    case MapRole::kStopLine: return "stop_line";
    case MapRole::kBoundary: return "boundary";
  }
  return "lane";
}

AgentCategory ParseCategory(std::string_view s) {
  if (s == "vehicle") return AgentCategory::kVehicle;
  if (s == "pedestrian") return AgentCategory::kPedestrian;
  if (s == "cyclist") return AgentCategory::kCyclist;
  Fail(ErrorCode::kParse, "unknown agent category '" + std::string(s) + "'");
}

MapRole ParseMapRole(std::string_view s) {
  if (s == "lane") return MapRole::kLane;
  if (s == "stop_line") return MapRole::kStopLine;
  if (s == "boundary") return MapRole::kBoundary;
  Fail(ErrorCode::kParse, "unknown map role '" + std::string(s) + "'");
}

double DisplacementSequence::FutureSum() const {
  double sum = 0.0;
  for (std::size_t t = 1; t < values.size(); ++t) sum += values[t];
  return sum;
}

std::vector<double> DisplacementSequence::Cumulative() const {
  std::vector<double> cum(values.size(), 0.0);
  for (std::size_t t = 1; t < values.size(); ++t) cum[t] = cum[t - 1] + values[t];
  return cum;
}

namespace {

long StepIndex(double t, double dt) { return std::lround(t / dt); }

}  // namespace

PlanLabels DeriveLabels(const EgoRecord& ego, const LabelOptions& opts) {
  if (opts.horizon < 1 || opts.path_points < 2 || !(opts.dt > 0.0) ||
      !(opts.path_spacing > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "invalid label options");
  }
  const double dt = opts.dt;
  const Vec2 current = ego.pose.position();

  std::optional<Vec2> previous;
  std::vector<Vec2> ahead;  // positions at steps 1, 2, ...
  long expected = 1;
  for (const auto& sample : ego.future) {
    const long k = StepIndex(sample.t, dt);
    if (std::abs(sample.t - static_cast<double>(k) * dt) > 1e-6) {
      Fail(ErrorCode::kInvalidArgument, "ego future sample off the dt grid at t=" +
                                            std::to_string(sample.t));
    }
    if (k == -1) {
      previous = Vec2{sample.x, sample.y};
    } else if (k == 0) {
      continue;
    } else if (k == expected) {
      ahead.push_back({sample.x, sample.y});
      ++expected;
    } else if (k > 0) {
      Fail(ErrorCode::kInvalidArgument, "ego future samples are not consecutive");
    }
  }
  if (static_cast<int>(ahead.size()) < opts.horizon) {
    Fail(ErrorCode::kInsufficientHorizon,
         "ego future covers " + std::to_string(ahead.size()) + " steps, need " +
             std::to_string(opts.horizon));
  }

  // Reject reversing: each motion step must not point backwards relative to
  // the previous motion direction (or the ego heading for the first step).
  Vec2 last_dir{std::cos(ego.pose.heading), std::sin(ego.pose.heading)};
  Vec2 prev_pt = current;
  for (const auto& p : ahead) {
    const Vec2 d = p - prev_pt;
    if (d.Norm() > 1e-6) {
      if (d.Dot(last_dir) < 0.0) {
        Fail(ErrorCode::kReverseMotion, "ego future contains reversing motion");
      }
      last_dir = d;
    }
    prev_pt = p;
  }

  PlanLabels labels;
  labels.displacements.dt = dt;
  labels.displacements.values.assign(static_cast<std::size_t>(opts.horizon) + 1, 0.0);
  labels.displacements.values[0] = previous ? Distance(*previous, current) : 0.0;
  prev_pt = current;
  for (int t = 1; t <= opts.horizon; ++t) {
    labels.displacements.values[t] = Distance(prev_pt, ahead[t - 1]);
    prev_pt = ahead[t - 1];
  }

  std::vector<Vec2> trajectory;
  trajectory.reserve(ahead.size() + 1);
  trajectory.push_back(current);
  trajectory.insert(trajectory.end(), ahead.begin(), ahead.end());
  const Polyline dense = ResamplePath(trajectory, opts.path_spacing);
  // Vertices 0..full sit at exact multiples of the spacing along the
  // trajectory; a shorter tail vertex may follow. Beyond them the path is
  // extended straight along the final direction.
  double travelled = 0.0;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    travelled += Distance(trajectory[i - 1], trajectory[i]);
  }
  const auto& dp = dense.points();
  const std::size_t full = std::min(
      dp.size() - 1, static_cast<std::size_t>(std::floor(travelled / opts.path_spacing + 1e-9)));
  const Vec2 tail_dir = full + 1 < dp.size() ? dp.back() - dp[full] : dp[full] - dp[full - 1];
  const Vec2 unit = tail_dir * (1.0 / tail_dir.Norm());
  std::vector<Vec2> path_pts;
  path_pts.reserve(opts.path_points);
  for (std::size_t k = 0; k < static_cast<std::size_t>(opts.path_points); ++k) {
    path_pts.push_back(k <= full ? dp[k]
                                 : dp[full] + unit * (static_cast<double>(k - full) *
                                                      opts.path_spacing));
  }
  labels.extended = (opts.path_points - 1) * opts.path_spacing > travelled + 1e-9;
  labels.drive_path = Polyline(std::move(path_pts));
  return labels;
}

void ValidateFrame(const Frame& frame, double dt) {
  std::set<int> ids;
  for (const auto& a : frame.agents) {
    if (!ids.insert(a.id).second) {
      Fail(ErrorCode::kInvalidArgument, "duplicate agent id " + std::to_string(a.id));
    }
    if (!(a.confidence >= 0.0 && a.confidence <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "agent confidence outside [0,1]");
    }
    if (!a.box.Valid()) Fail(ErrorCode::kInvalidArgument, "invalid agent box");
  }
  if (!(frame.ego.speed >= 0.0)) Fail(ErrorCode::kInvalidArgument, "negative ego speed");
  // Consecutive samples on the dt grid; the t = 0 sample may be omitted.
  for (std::size_t i = 1; i < frame.ego.future.size(); ++i) {
    const double prev = frame.ego.future[i - 1].t;
    const double gap = frame.ego.future[i].t - prev;
    const bool skips_now = std::abs(prev + dt) < 1e-6 && std::abs(gap - 2.0 * dt) < 1e-6;
    if (std::abs(gap - dt) > 1e-6 && !skips_now) {
      Fail(ErrorCode::kInvalidArgument, "ego future timestamps not at dt spacing");
    }
  }
}

}  // namespace cplan
