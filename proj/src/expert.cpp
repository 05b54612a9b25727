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
#include <limits>

#include "cplan/errors.hpp"
#include "cplan/simctrl.hpp"

namespace cplan {

namespace {

struct IdmParams {
  double time_headway = 1.2;  // s
  double min_gap = 2.5;       // m
  double max_accel = 1.5;     // m/s^2
  double comfort_decel = 2.0; // m/s^2
  double max_lateral_accel = 2.0;
};

double RouteCurvature(const Polyline& route, double arc) {
  const double ds = 4.0;
  const double a = std::clamp(arc, 0.0, std::max(0.0, route.length() - ds));
  const double h0 = InterpAlong(route, a).heading;
  const double h1 = InterpAlong(route, a + ds).heading;
  return NormalizeAngle(h1 - h0) / ds;
}

}  // namespace

PlannerFn MakeExpertPlanner(const Scenario& scenario, const SimConfig& cfg) {
  const Polyline route = scenario.route;
  const double cruise = scenario.cruise_speed;
  const IdmParams idm;
  const BoxDims ego_dims = cfg.ego_dims;
  const int horizon = cfg.horizon;
  const double dt = cfg.plan_dt;

  return [=](const Frame& frame, const Polyline& target) {
    const double v = frame.ego.speed;
    const double ego_arc = ProjectOnto(route, frame.ego.pose.position()).arc;

    // Curve speed: respect a lateral acceleration budget over the next 25 m.
    double v_des = cruise;
    for (double ds = 0.0; ds <= 25.0; ds += 2.5) {
      const double k = std::abs(RouteCurvature(route, ego_arc + ds));
      if (k > 1e-6) v_des = std::min(v_des, std::sqrt(idm.max_lateral_accel / k) + 0.15 * ds);
    }
    v_des = std::max(v_des, 1.0);

    // Nearest in-lane obstacle ahead, now or within the next two seconds.
    double gap = std::numeric_limits<double>::infinity();
    double lead_speed = 0.0;
    for (const auto& a : frame.agents) {
      const double half_width = 0.5 * (ego_dims.width + a.box.width) + 0.3;
      const std::size_t look = std::min<std::size_t>(a.future.size(), 10);
      for (std::size_t t = 0; t <= look; ++t) {
        const OrientedBox box = a.BoxAt(t);
        const auto proj = ProjectOnto(route, box.center.position());
        if (std::abs(proj.lateral) > half_width) continue;
        const double g = proj.arc - ego_arc - 0.5 * (ego_dims.length + box.length);
        if (proj.arc - ego_arc <= 0.0) break;
        if (g < gap) {
          gap = g;
          double s_next = proj.arc;
          if (!a.future.empty()) {
            s_next = ProjectOnto(route, a.BoxAt(std::min(t + 1, a.future.size()))
                                            .center.position()).arc;
          }
          lead_speed = t < a.future.size() ? std::max(0.0, (s_next - proj.arc) / dt) : 0.0;
          if (t > 0) lead_speed = 0.0;  // entering the lane: treat as standing
        }
        break;
      }
    }

    double accel = idm.max_accel * (1.0 - std::pow(v / v_des, 4.0));
    if (std::isfinite(gap)) {
      const double dv = v - lead_speed;
      const double s_star =
          idm.min_gap + std::max(0.0, v * idm.time_headway +
                                          v * dv / (2.0 * std::sqrt(idm.max_accel *
                                                                    idm.comfort_decel)));
      const double g = std::max(gap, 0.1);
      accel -= idm.max_accel * (s_star / g) * (s_star / g);
    }
    accel = std::clamp(accel, -6.0, idm.max_accel);

    PlanOutput out;
    out.path = target;
    out.disps.dt = dt;
    out.disps.values.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    out.disps.values[0] = v * dt;
    for (int t = 1; t <= horizon; ++t) {
      // Mean speed over step t under constant acceleration.
      const double vt = std::clamp(v + accel * (t - 0.5) * dt, 0.0, std::max(cruise, v));
      out.disps.values[static_cast<std::size_t>(t)] = vt * dt;
    }
    return out;
  };
}

std::vector<Frame> RecordExpertFrames(const Scenario& scenario, const SimConfig& cfg,
                                      const RecordOptions& opts) {
  if (!(opts.frame_interval > 0.0) || !(opts.future_seconds > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "record options must be positive");
  }
  SimConfig run_cfg = cfg;
  run_cfg.record_steps = false;
  const auto [log, metrics] = RunEpisode(scenario, MakeExpertPlanner(scenario, cfg), run_cfg);
  (void)metrics;

  const int stride = static_cast<int>(std::lround(cfg.plan_dt / cfg.dt_sim));
  const int max_future = static_cast<int>(std::lround(opts.future_seconds / cfg.plan_dt));
  const int frame_stride = std::max(1, static_cast<int>(std::lround(opts.frame_interval / cfg.dt_sim)));
  const int n = static_cast<int>(log.ego_trace.size());

  std::vector<Frame> frames;
  for (int f = frame_stride; f < n; f += frame_stride) {
    if (f - stride < 0) continue;
    const int available = (n - 1 - f) / stride;
    if (available < cfg.horizon + 1) break;
    const int future_steps = std::min(available, max_future);

    Frame frame;
    frame.timestamp = f * cfg.dt_sim;
    const BicycleState& ego = log.ego_trace[static_cast<std::size_t>(f)];
    frame.ego.pose = ego.pose;
    frame.ego.speed = ego.speed;
    const Pose2& prev = log.ego_trace[static_cast<std::size_t>(f - stride)].pose;
    frame.ego.future.push_back({-cfg.plan_dt, prev.x, prev.y});
    for (int k = 1; k <= future_steps; ++k) {
      const Pose2& p = log.ego_trace[static_cast<std::size_t>(f + k * stride)].pose;
      frame.ego.future.push_back({k * cfg.plan_dt, p.x, p.y});
    }

    const auto& boxes = log.agent_trace[static_cast<std::size_t>(f)];
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (Distance(boxes[i].center.position(), ego.pose.position()) > opts.agent_radius) continue;
      AgentTrack a;
      a.id = static_cast<int>(i);
      a.category = scenario.agents[i].category;
      a.box = boxes[i];
      for (int k = 1; k <= cfg.horizon; ++k) {
        const std::size_t idx = static_cast<std::size_t>(std::min(f + k * stride, n - 1));
        a.future.push_back(log.agent_trace[idx][i].center);
      }
      frame.agents.push_back(std::move(a));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace cplan
