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
#include <string>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"
#include "cplan/simctrl.hpp"

namespace cplan {

namespace {

constexpr int kStopLineIdBase = 100000;

struct StopLineState {
  bool released = false;
  double waited = 0.0;
};

// A stop line is presented to the planner as a thin static obstacle across
// the lane until the ego has waited there for the required time.
AgentTrack StopLinePhantom(const Polyline& route, const StopLine& line, int index, int horizon) {
  const Pose2 at = InterpAlong(route, std::min(line.arc, route.length()));
  AgentTrack a;
  a.id = kStopLineIdBase + index;
  a.category = AgentCategory::kVehicle;
  a.box = {at, 0.5, 4.0};
  a.future.assign(static_cast<std::size_t>(horizon), at);
  a.confidence = 1.0;
  return a;
}

}  // namespace

void SimConfig::Validate() const {
  if (!(dt_sim > 0.0)) Fail(ErrorCode::kConfig, "sim.dt_sim must be > 0");
  if (!(replan_dt >= dt_sim)) Fail(ErrorCode::kConfig, "sim.replan_dt must be >= sim.dt_sim");
  const double ratio = replan_dt / dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-6) {
    Fail(ErrorCode::kConfig, "sim.replan_dt must be a multiple of sim.dt_sim");
  }
  if (horizon < 1 || path_points < 2) Fail(ErrorCode::kConfig, "invalid horizon or path_points");
  if (!(path_spacing > 0.0) || !(plan_dt > 0.0)) {
    Fail(ErrorCode::kConfig, "path spacing and plan dt must be > 0");
  }
  if (!(ego_dims.length > 0.0 && ego_dims.width > 0.0)) {
    Fail(ErrorCode::kConfig, "ego dims must be > 0");
  }
  if (speed_preview_steps < 1) Fail(ErrorCode::kConfig, "sim.speed_preview_steps must be >= 1");
  lateral.gains.Validate();
  speed.Validate();
  if (!(goal_tolerance >= 0.0)) Fail(ErrorCode::kConfig, "sim.goal_tolerance must be >= 0");
}

std::pair<EpisodeLog, EpisodeMetrics> RunEpisode(const Scenario& scenario,
                                                 const PlannerFn& planner,
                                                 const SimConfig& cfg) {
  scenario.Validate();
  cfg.Validate();
  const Polyline& route = scenario.route;
  AgentWorld world(scenario);
  BicycleState ego = scenario.ego_start;
  EpisodeLog log;
  log.scenario = scenario.name;
  log.seed = scenario.seed;

  const int replan_every = static_cast<int>(std::lround(cfg.replan_dt / cfg.dt_sim));
  const int max_steps = static_cast<int>(std::floor(scenario.duration / cfg.dt_sim + 1e-9));
  const double arc0 = ProjectOnto(route, ego.pose.position()).arc;
  const double goal_arc = std::max(arc0, route.length() - cfg.goal_tolerance);
  std::vector<StopLineState> stops(scenario.stop_lines.size());

  PidState lat_pid, lon_pid;
  PlanOutput plan;
  bool reached = false;
  bool collided = false;
  double best_arc = arc0;
  double min_dist = std::numeric_limits<double>::infinity();
  double speed_sum = 0.0;
  std::vector<double> accels;

  auto ego_box = [&](const BicycleState& s) {
    return OrientedBox{s.pose, cfg.ego_dims.length, cfg.ego_dims.width};
  };
  auto record_trace = [&](double t) {
    const auto boxes = world.Boxes();
    double d = std::numeric_limits<double>::infinity();
    for (const auto& b : boxes) d = std::min(d, MinBoxDistance(ego_box(ego), b));
    log.times.push_back(t);
    log.speeds.push_back(ego.speed);
    log.min_distances.push_back(d);
    log.ego_trace.push_back(ego);
    log.agent_trace.push_back(boxes);
    min_dist = std::min(min_dist, d);
    return d;
  };
  record_trace(0.0);

  for (int step = 0; step < max_steps; ++step) {
    const double t = step * cfg.dt_sim;
    const double ego_arc = ProjectOnto(route, ego.pose.position()).arc;

    if (step % replan_every == 0) {
      Frame frame;
      frame.timestamp = t;
      frame.ego.pose = ego.pose;
      frame.ego.speed = ego.speed;
      frame.agents = world.Tracks(t, cfg.horizon, cfg.plan_dt);
      for (std::size_t i = 0; i < stops.size(); ++i) {
        if (!stops[i].released) {
          frame.agents.push_back(
              StopLinePhantom(route, scenario.stop_lines[i], static_cast<int>(i), cfg.horizon));
        }
      }
      const Polyline target = RouteAhead(route, ego.pose, cfg.path_points, cfg.path_spacing);
      try {
        plan = planner(frame, target);
      } catch (const Error& e) {
        log.failure_reason = std::string("planner: ") + e.what();
        break;
      }
    }

    double steer = 0.0;
    try {
      steer = LateralControl(ego, plan.path, cfg.lateral, lat_pid, cfg.dt_sim);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPathExhausted) throw;
      log.failure_reason = "path exhausted";
      break;
    }
    const double accel = LongitudinalControl(ego, plan.disps, cfg.speed, lon_pid, cfg.dt_sim,
                                             cfg.speed_preview_steps);

    if (cfg.record_steps && step % replan_every == 0) {
      EpisodeStep rec;
      rec.t = t;
      rec.ego = ego;
      const auto boxes = world.Boxes();
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        rec.agents.emplace_back(static_cast<int>(i), boxes[i]);
      }
      rec.plan = plan;
      rec.steer = steer;
      rec.accel = accel;
      log.steps.push_back(std::move(rec));
    }

    const double prev_speed = ego.speed;
    ego = StepBicycle(ego, steer, accel, cfg.dt_sim);
    world.Step(t, cfg.dt_sim, ego_arc);
    accels.push_back((ego.speed - prev_speed) / cfg.dt_sim);
    speed_sum += ego.speed;

    const double d = record_trace(t + cfg.dt_sim);
    if (d <= 0.0) {
      collided = true;
      log.failure_reason = "collision";
      break;
    }

    const double arc = ProjectOnto(route, ego.pose.position()).arc;
    best_arc = std::max(best_arc, arc);
    for (std::size_t i = 0; i < stops.size(); ++i) {
      if (stops[i].released) continue;
      const double gap = scenario.stop_lines[i].arc - arc;
      if (gap < 0.0) {
        stops[i].released = true;  // ran the line
      } else if (ego.speed < 0.3 && gap < cfg.ego_dims.length * 0.5 + 6.0) {
        stops[i].waited += cfg.dt_sim;
        if (stops[i].waited >= scenario.stop_lines[i].hold) stops[i].released = true;
      }
    }
    if (arc >= goal_arc) {
      reached = true;
      break;
    }
  }
  if (!reached && !collided && log.failure_reason.empty()) log.failure_reason = "timeout";

  EpisodeMetrics m;
  m.collided = collided;
  m.success = reached && !collided;
  m.route_completion =
      reached ? 1.0
              : std::clamp((best_arc - arc0) / std::max(goal_arc - arc0, 1e-9), 0.0, 1.0);
  const std::size_t n = accels.size();
  m.avg_speed = n > 0 ? speed_sum / static_cast<double>(n) : 0.0;
  double jerk = 0.0;
  for (std::size_t i = 1; i < n; ++i) jerk += std::abs(accels[i] - accels[i - 1]) / cfg.dt_sim;
  m.comfort_proxy = n > 1 ? jerk / static_cast<double>(n - 1) : 0.0;
  m.min_agent_distance = std::isfinite(min_dist) ? min_dist : -1.0;
  return {std::move(log), m};
}

bool ScanForCollision(const EpisodeLog& log, const BoxDims& ego_dims) {
  const std::size_t n = std::min(log.ego_trace.size(), log.agent_trace.size());
  for (std::size_t i = 0; i < n; ++i) {
    const OrientedBox ego{log.ego_trace[i].pose, ego_dims.length, ego_dims.width};
    for (const auto& b : log.agent_trace[i]) {
      if (BoxesOverlap(ego, b)) return true;
    }
  }
  return false;
}

SuiteMetrics ComputeSuiteMetrics(const std::vector<EpisodeMetrics>& metrics) {
  SuiteMetrics s;
  s.episodes = metrics.size();
  if (metrics.empty()) return s;
  for (const auto& m : metrics) {
    s.success_rate += m.success ? 1.0 : 0.0;
    s.collision_rate += m.collided ? 1.0 : 0.0;
    s.mean_completion += m.route_completion;
    s.mean_comfort += m.comfort_proxy;
    s.mean_speed += m.avg_speed;
  }
  const double n = static_cast<double>(metrics.size());
  s.success_rate /= n;
  s.collision_rate /= n;
  s.mean_completion /= n;
  s.mean_comfort /= n;
  s.mean_speed /= n;
  return s;
}

std::string SerializeEpisodeLog(const EpisodeLog& log) {
  using json = nlohmann::ordered_json;
  std::string out;
  for (const auto& step : log.steps) {
    json j;
    j["t"] = step.t;
    j["ego"] = {{"x", step.ego.pose.x},
                {"y", step.ego.pose.y},
                {"heading", step.ego.pose.heading},
                {"speed", step.ego.speed}};
    json agents = json::array();
    for (const auto& [id, box] : step.agents) {
      agents.push_back({{"id", id},
                        {"x", box.center.x},
                        {"y", box.center.y},
                        {"heading", box.center.heading},
                        {"length", box.length},
                        {"width", box.width}});
    }
    j["agents"] = std::move(agents);
    j["plan"] = {{"path", PolylineToJson(step.plan.path)},
                 {"disps", step.plan.disps.values},
                 {"scores", {{"path", step.plan.path_score}, {"long", step.plan.long_score}}},
                 {"anchors", {{"path", step.plan.anchor_ids.path},
                              {"disp", step.plan.anchor_ids.disp}}}};
    j["cmd"] = {{"steer", step.steer}, {"accel", step.accel}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace cplan
