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
#include <string>

#include "cplan/errors.hpp"
#include "cplan/simctrl.hpp"

namespace cplan {

BicycleState StepBicycle(const BicycleState& state, double steer, double accel, double dt) {
  BicycleState next = state;
  const double v = state.speed;
  const double dheading = v / state.wheelbase * std::tan(steer) * dt;
  const double mid = state.pose.heading + 0.5 * dheading;
  next.pose.x += v * std::cos(mid) * dt;
  next.pose.y += v * std::sin(mid) * dt;
  next.pose.heading = NormalizeAngle(state.pose.heading + dheading);
  next.speed = std::max(0.0, v + accel * dt);
  return next;
}

void PIDGains::Validate() const {
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) Fail(ErrorCode::kConfig, "PID gains must be >= 0");
  if (!(integral_limit > 0.0)) Fail(ErrorCode::kConfig, "PID integral_limit must be > 0");
  if (!(out_min < out_max)) Fail(ErrorCode::kConfig, "PID output_limit must have min < max");
}

double PidStep(const PIDGains& gains, PidState& state, double error, double dt) {
  if (!(dt > 0.0)) Fail(ErrorCode::kInvalidArgument, "pid dt must be > 0");
  state.integral = std::clamp(state.integral + error * dt, -gains.integral_limit,
                              gains.integral_limit);
  const double derivative = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  state.prev_error = error;
  state.has_prev = true;
  const double u = gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
  return std::clamp(u, gains.out_min, gains.out_max);
}

double LateralControl(const BicycleState& ego, const Polyline& path, const LateralConfig& cfg,
                      PidState& pid, double dt) {
  const Vec2 pos = ego.pose.position();
  const Projection proj = ProjectOnto(path, pos);
  if (proj.arc >= path.length() - 1e-9) {
    const Pose2 end = InterpAlong(path, path.length());
    if (ToLocal(end, pos).x > 1e-9) {
      Fail(ErrorCode::kPathExhausted, "ego has passed the end of the drive path");
    }
  }
  const double look = std::max(cfg.look_ahead_min, cfg.look_ahead_gain * ego.speed);
  const Pose2 target = InterpAlong(path, proj.arc + look);
  const Vec2 rel = target.position() - pos;
  const double error = NormalizeAngle(std::atan2(rel.y, rel.x) - ego.pose.heading);
  const double steer = PidStep(cfg.gains, pid, error, dt);
  return std::clamp(steer, -cfg.max_steer, cfg.max_steer);
}

double LongitudinalControl(const BicycleState& ego, const DisplacementSequence& disps,
                           const PIDGains& gains, PidState& pid, double dt, int preview_steps) {
  if (disps.values.size() < 2 || !(disps.dt > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "displacement sequence needs at least one future step");
  }
  if (preview_steps < 1) Fail(ErrorCode::kInvalidArgument, "preview_steps must be >= 1");
  // Mean planned speed over the first `preview_steps` future steps.
  const std::size_t k = std::min(disps.values.size() - 1, static_cast<std::size_t>(preview_steps));
  double sum = 0.0;
  for (std::size_t t = 1; t <= k; ++t) sum += disps.values[t];
  const double desired = sum / (static_cast<double>(k) * disps.dt);
  return PidStep(gains, pid, desired - ego.speed, dt);
}

}  // namespace cplan
