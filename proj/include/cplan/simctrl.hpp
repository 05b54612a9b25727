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

#ifndef CPLAN_SIMCTRL_HPP_
#define CPLAN_SIMCTRL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cplan/augment.hpp"
#include "cplan/geometry.hpp"
#include "cplan/planner.hpp"
#include "cplan/scene.hpp"

namespace cplan {

struct BicycleState {
  Pose2 pose;
  double speed = 0.0;  // m/s, never negative
  double wheelbase = 2.8;
};

// Kinematic bicycle: heading integrates v/L tan(steer); the position moves
// along the mid-step heading; speed is clamped at zero.
BicycleState StepBicycle(const BicycleState& state, double steer, double accel, double dt);

struct PIDGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 1.0;
  double out_min = -1.0;
  double out_max = 1.0;

  void Validate() const;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

// Returns the clamped command; the integral is clamped to +-integral_limit.
double PidStep(const PIDGains& gains, PidState& state, double error, double dt);

struct LateralConfig {
  PIDGains gains{1.2, 0.05, 0.1, 0.5, -0.6, 0.6};
  double look_ahead_min = 4.0;   // m
  double look_ahead_gain = 0.6;  // s, look-ahead = max(min, gain * v)
  double max_steer = 0.6;        // rad
};

// Heading error towards a look-ahead point on `path` (left positive).
// Throws kPathExhausted when the ego has passed the end of the path.
double LateralControl(const BicycleState& ego, const Polyline& path, const LateralConfig& cfg,
                      PidState& pid, double dt);

// Desired speed is the mean planned speed over the first `preview_steps`
// future steps (1: values[1] / dt); PID output clamped to [out_min, out_max]
// (brake < 0 < throttle).
double LongitudinalControl(const BicycleState& ego, const DisplacementSequence& disps,
                           const PIDGains& gains, PidState& pid, double dt,
                           int preview_steps = 1);

enum class ScriptKind { kParked, kCrossing, kCutIn, kLeadBrake, kMerge };
std::string_view ToString(ScriptKind kind);

// Scripted agent. Fields are interpreted per kind:
//   parked:     pose
//   crossing:   pose (start), speed, start_time (stands still before)
//   cut_in:     arc, lateral, speed, trigger_distance, lateral_speed,
//               cut_speed (speed after the trigger)
//   lead_brake: arc, speed, start_time (brake onset), decel, min_speed
//   merge:      path (followed from arc 0 at speed), start_time
// Route-relative kinds use the scenario route.
struct AgentScript {
  ScriptKind kind = ScriptKind::kParked;
  AgentCategory category = AgentCategory::kVehicle;
  double length = 4.5;
  double width = 2.0;
  Pose2 pose;
  double arc = 0.0;
  double lateral = 0.0;
  double speed = 0.0;
  double start_time = 0.0;
  double trigger_distance = 10.0;
  double lateral_speed = 1.0;
  double cut_speed = 0.0;
  double decel = 0.0;
  double min_speed = 0.0;
  std::optional<Polyline> path;
};

struct StopLine {
  double arc = 0.0;   // along the route
  double hold = 0.0;  // seconds the ego must wait once stopped at the line
};

struct Scenario {
  std::string name;
  std::string family;
  std::uint64_t seed = 0;
  Polyline route;
  BicycleState ego_start;
  double cruise_speed = 6.0;  // used by the expert driver
  std::vector<AgentScript> agents;
  std::vector<StopLine> stop_lines;
  double duration = 20.0;

  void Validate() const;
};

// Runtime state of one scripted agent.
struct AgentRuntime {
  double arc = 0.0;
  double lateral = 0.0;
  double speed = 0.0;
  Pose2 pose;
  bool triggered = false;
  int phase = 0;            // lead_brake: 0 cruise, 1 brake, 2 hold, 3 recover, 4 done
  double phase_time = 0.0;  // seconds spent in the current phase
};

class AgentWorld {
 public:
  AgentWorld(const Scenario& scenario);

  // Advances all agents by dt; `ego_arc` drives cut-in triggers.
  void Step(double t, double dt, double ego_arc);

  std::vector<OrientedBox> Boxes() const;

  // Current tracks with `horizon` predicted poses at `dt` spacing, rolled out
  // from the scripts. Cut-ins depend on the ego's future motion, so a pending
  // cut-in is predicted as staying in its lane until it triggers.
  std::vector<AgentTrack> Tracks(double t, int horizon, double dt) const;

  const std::vector<AgentRuntime>& runtime() const { return runtime_; }

 private:
  Pose2 PoseOf(const AgentScript& s, const AgentRuntime& r, double lateral_rate) const;
  void Advance(const AgentScript& s, AgentRuntime& r, double t, double dt,
               std::optional<double> ego_arc) const;

  const Scenario* scenario_;
  std::vector<AgentRuntime> runtime_;
};

struct PlanOutput {
  Polyline path;
  DisplacementSequence disps;
  double path_score = 0.0;
  double long_score = 0.0;
  AnchorIds anchor_ids;
};

using PlannerFn = std::function<PlanOutput(const Frame& frame, const Polyline& target_path)>;

struct SimConfig {
  double dt_sim = 0.05;
  double replan_dt = 0.2;
  int horizon = kDefaultHorizon;
  int path_points = kDefaultPathPoints;
  double path_spacing = kDefaultPathSpacing;
  double plan_dt = kDefaultDt;
  BoxDims ego_dims;
  LateralConfig lateral;
  PIDGains speed{2.0, 0.0, 0.0, 1.0, -6.0, 3.0};
  int speed_preview_steps = 5;  // plan steps averaged into the speed reference
  double goal_tolerance = 2.0;
  bool record_steps = true;

  void Validate() const;
};

struct EpisodeStep {
  double t = 0.0;
  BicycleState ego;
  std::vector<std::pair<int, OrientedBox>> agents;
  PlanOutput plan;
  double steer = 0.0;
  double accel = 0.0;
};

struct EpisodeMetrics {
  bool success = false;
  bool collided = false;
  double route_completion = 0.0;
  double avg_speed = 0.0;
  double comfort_proxy = 0.0;  // mean |jerk|, m/s^3
  double min_agent_distance = 0.0;
};

struct EpisodeLog {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<EpisodeStep> steps;
  std::string failure_reason;  // empty on success
  // Time series for plotting, one entry per sim step.
  std::vector<double> times;
  std::vector<double> speeds;
  std::vector<double> min_distances;
  std::vector<BicycleState> ego_trace;
  std::vector<std::vector<OrientedBox>> agent_trace;
};

std::pair<EpisodeLog, EpisodeMetrics> RunEpisode(const Scenario& scenario,
                                                 const PlannerFn& planner,
                                                 const SimConfig& cfg);

// True if the ego box overlaps any agent box at any recorded sim step.
bool ScanForCollision(const EpisodeLog& log, const BoxDims& ego_dims);

struct SuiteMetrics {
  std::size_t episodes = 0;
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double mean_completion = 0.0;
  double mean_comfort = 0.0;
  double mean_speed = 0.0;
};

SuiteMetrics ComputeSuiteMetrics(const std::vector<EpisodeMetrics>& metrics);

// Episode log as newline-delimited JSON, one object per planning step.
std::string SerializeEpisodeLog(const EpisodeLog& log);

// --- Scenario construction -------------------------------------------------

// Route from a start pose and (length, curvature) pieces, sampled every `step` m.
Polyline BuildRoute(const Pose2& start, const std::vector<std::pair<double, double>>& pieces,
                    double step = 1.0);

// Randomized evaluation scenario of the given family: "cut_in", "crossing",
// "lead_brake", "merge", "stop_line", "empty".
Scenario MakeScenario(const std::string& family, std::uint64_t seed, const SimConfig& cfg);

// Nominal driving scene for expert demonstrations (no forced conflicts).
Scenario MakeNominalScenario(std::uint64_t seed);

std::string SerializeScenarios(const std::vector<Scenario>& scenarios);
std::vector<Scenario> ParseScenarios(const std::string& text);

// --- Expert demonstrations -------------------------------------------------

// Rule-based driver: follows the route with the lateral controller and keeps
// an IDM gap to in-lane agents.
PlannerFn MakeExpertPlanner(const Scenario& scenario, const SimConfig& cfg);

struct RecordOptions {
  double frame_interval = 0.4;  // s between recorded frames
  double future_seconds = 8.0;  // ego future stored per frame
  double agent_radius = 60.0;
};

// Runs the expert on `scenario` and slices the rollout into frames whose
// ego future and agent futures are the realized motion.
std::vector<Frame> RecordExpertFrames(const Scenario& scenario, const SimConfig& cfg,
                                      const RecordOptions& opts = {});

}  // namespace cplan

#endif  // CPLAN_SIMCTRL_HPP_
