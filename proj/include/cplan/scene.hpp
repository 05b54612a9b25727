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

#ifndef CPLAN_SCENE_HPP_
#define CPLAN_SCENE_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cplan/geometry.hpp"

namespace cplan {

inline constexpr double kDefaultDt = 0.2;
inline constexpr int kDefaultHorizon = 15;
inline constexpr int kDefaultPathPoints = 15;
inline constexpr double kDefaultPathSpacing = 2.0;

enum class AgentCategory { kVehicle, kPedestrian, kCyclist };
enum class MapRole { kLane, kStopLine, kBoundary };

std::string_view ToString(AgentCategory c);
std::string_view ToString(MapRole r);
AgentCategory ParseCategory(std::string_view s);
MapRole ParseMapRole(std::string_view s);

struct AgentTrack {
  int id = 0;
  AgentCategory category = AgentCategory::kVehicle;
  OrientedBox box;            // current state
  std::vector<Pose2> future;  // poses at dt, 2dt, ..., T*dt
  double confidence = 1.0;

  // Box at step t (t = 0 is the current state).
  OrientedBox BoxAt(std::size_t t) const {
    if (t == 0 || future.empty()) return box;
    const Pose2& p = future[std::min(t, future.size()) - 1];
    return {p, box.length, box.width};
  }
};

struct TimedPoint {
  double t = 0.0;  // seconds relative to the frame timestamp
  double x = 0.0;
  double y = 0.0;
};

struct EgoRecord {
  Pose2 pose;
  double speed = 0.0;
  // Consecutive samples at dt spacing. May start at t = -dt (the previous
  // position) or at t = dt; a t = 0 sample, if present, is ignored in favour
  // of `pose`.
  std::vector<TimedPoint> future;
};

struct MapLine {
  MapRole role = MapRole::kLane;
  Polyline line;
};

struct Frame {
  double timestamp = 0.0;
  EgoRecord ego;
  std::vector<AgentTrack> agents;
  std::vector<MapLine> map_lines;
};

struct DisplacementSequence {
  std::vector<double> values;  // T+1 entries, index 0 is the current step
  double dt = kDefaultDt;

  std::size_t horizon() const { return values.empty() ? 0 : values.size() - 1; }
  // Sum over the future steps 1..T.
  double FutureSum() const;
  // Cumulative arc after step t, excluding values[0]; Cumulative(0) == 0.
  std::vector<double> Cumulative() const;
};

struct PlanLabels {
  Polyline drive_path;
  DisplacementSequence displacements;
  bool extended = false;  // drive path padded by straight extrapolation
};

struct LabelOptions {
  int horizon = kDefaultHorizon;
  int path_points = kDefaultPathPoints;
  double path_spacing = kDefaultPathSpacing;
  double dt = kDefaultDt;
};

// Throws kInsufficientHorizon, kReverseMotion, kDegenerateGeometry.
PlanLabels DeriveLabels(const EgoRecord& ego, const LabelOptions& opts = {});

// Checks frame invariants (unique agent ids, confidences in range, ego sample
// spacing). Throws kInvalidArgument.
void ValidateFrame(const Frame& frame, double dt);

// Newline-delimited JSON frame log with a schema header line.
inline constexpr std::string_view kFrameSchema = "cplan-frames/1";

struct FrameLog {
  double dt = kDefaultDt;
  std::vector<Frame> frames;
};

FrameLog LoadFrames(const std::string& path);
void SaveFrames(const FrameLog& log, const std::string& path);
std::string SerializeFrames(const FrameLog& log);
// One frame as a single JSON line (no trailing newline).
std::string SerializeFrame(const Frame& frame);
FrameLog ParseFrames(std::string_view text);

}  // namespace cplan

#endif  // CPLAN_SCENE_HPP_
