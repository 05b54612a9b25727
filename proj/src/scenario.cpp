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
#include <numbers>
#include <string>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"
#include "cplan/simctrl.hpp"

namespace cplan {

namespace {

constexpr double kLaneWidth = 3.5;

// Route pose that also extends backwards past the start.
Pose2 RoutePose(const Polyline& route, double arc) {
  if (arc >= 0.0) return InterpAlong(route, arc);
  Pose2 p = InterpAlong(route, 0.0);
  p.x += arc * std::cos(p.heading);
  p.y += arc * std::sin(p.heading);
  return p;
}

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool Coin(Rng& rng, double p) { return Uniform(rng, 0.0, 1.0) < p; }

std::uint64_t FamilyTag(const std::string& family) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : family) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

}  // namespace

std::string_view ToString(ScriptKind kind) {
  switch (kind) {
    case ScriptKind::kParked: return "parked";
    case ScriptKind::kCrossing: return "crossing";
    case ScriptKind::kCutIn: return "cut_in";
    case ScriptKind::kLeadBrake: return "lead_brake";
    case ScriptKind::kMerge: return "merge";
  }
  return "parked";
}

namespace {

ScriptKind ParseScriptKind(const std::string& s) {
  for (ScriptKind k : {ScriptKind::kParked, ScriptKind::kCrossing, ScriptKind::kCutIn,
                       ScriptKind::kLeadBrake, ScriptKind::kMerge}) {
    if (ToString(k) == s) return k;
  }
  Fail(ErrorCode::kParse, "unknown agent kind '" + s + "'");
}

}  // namespace

void Scenario::Validate() const {
  if (route.size() < 2 || !(route.length() > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "scenario '" + name + "': route length must be > 0");
  }
  if (!(duration > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "scenario '" + name + "': duration must be > 0");
  }
  if (!(ego_start.wheelbase > 0.0) || ego_start.speed < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "scenario '" + name + "': invalid ego start");
  }
  for (const auto& a : agents) {
    if (!(a.length > 0.0 && a.width > 0.0)) {
      Fail(ErrorCode::kInvalidArgument, "scenario '" + name + "': agent dims must be > 0");
    }
    if (a.kind == ScriptKind::kMerge && !a.path) {
      Fail(ErrorCode::kInvalidArgument, "scenario '" + name + "': merge agent needs a path");
    }
  }
}

// --- AgentWorld --------------------------------------------------------------

AgentWorld::AgentWorld(const Scenario& scenario) : scenario_(&scenario) {
  for (const auto& s : scenario.agents) {
    AgentRuntime r;
    r.arc = s.arc;
    r.lateral = s.lateral;
    r.speed = s.speed;
    r.pose = s.kind == ScriptKind::kCrossing ? s.pose : PoseOf(s, r, 0.0);
    runtime_.push_back(r);
  }
}

Pose2 AgentWorld::PoseOf(const AgentScript& s, const AgentRuntime& r, double lateral_rate) const {
  switch (s.kind) {
    case ScriptKind::kParked:
      return s.pose;
    case ScriptKind::kCrossing:
      return r.pose;
    case ScriptKind::kMerge: {
      const Polyline& path = *s.path;
      return r.arc >= 0.0 ? InterpAlong(path, r.arc) : RoutePose(path, r.arc);
    }
    case ScriptKind::kCutIn:
    case ScriptKind::kLeadBrake: {
      const Pose2 base = RoutePose(scenario_->route, r.arc);
      const Vec2 normal{-std::sin(base.heading), std::cos(base.heading)};
      const Vec2 p = base.position() + normal * r.lateral;
      double heading = base.heading;
      if (r.speed < 0.0) heading += std::numbers::pi;
      heading += std::atan2(lateral_rate, std::max(std::abs(r.speed), 0.5));
      return {p.x, p.y, NormalizeAngle(heading)};
    }
  }
  return r.pose;
}

void AgentWorld::Advance(const AgentScript& s, AgentRuntime& r, double t, double dt,
                         std::optional<double> ego_arc) const {
  double lateral_rate = 0.0;
  switch (s.kind) {
    case ScriptKind::kParked:
      return;
    case ScriptKind::kCrossing:
      if (t >= s.start_time) {
        r.pose.x += s.speed * std::cos(s.pose.heading) * dt;
        r.pose.y += s.speed * std::sin(s.pose.heading) * dt;
        r.pose.heading = s.pose.heading;
      }
      return;
    case ScriptKind::kMerge:
      if (t >= s.start_time) r.arc += s.speed * dt;
      r.pose = PoseOf(s, r, 0.0);
      return;
    case ScriptKind::kCutIn: {
      if (!r.triggered && ego_arc && r.arc - *ego_arc <= s.trigger_distance) r.triggered = true;
      if (r.triggered) {
        const double step = s.lateral_speed * dt;
        if (std::abs(r.lateral) > step) {
          lateral_rate = r.lateral > 0.0 ? -s.lateral_speed : s.lateral_speed;
          r.lateral += lateral_rate * dt;
        } else {
          r.lateral = 0.0;
          // In lane: settle to the post-cut speed at 1.5 m/s^2.
          const double dv = 1.5 * dt;
          r.speed = r.speed > s.cut_speed ? std::max(s.cut_speed, r.speed - dv)
                                          : std::min(s.cut_speed, r.speed + dv);
        }
      }
      r.arc += r.speed * dt;
      r.pose = PoseOf(s, r, lateral_rate);
      return;
    }
    case ScriptKind::kLeadBrake: {
      // Phases: cruise until start_time, brake to min_speed, hold 1.5 s,
      // then recover to the cruise speed at 2 m/s^2. Purely time-driven, so
      // predictions follow the same script.
      r.phase_time += dt;
      if (r.phase == 0 && t >= s.start_time && r.speed > s.min_speed) {
        r.phase = 1;
        r.phase_time = 0.0;
      }
      if (r.phase == 1) {
        r.speed = std::max(s.min_speed, r.speed - s.decel * dt);
        if (r.speed <= s.min_speed) {
          r.phase = 2;
          r.phase_time = 0.0;
        }
      } else if (r.phase == 2) {
        if (r.phase_time >= 1.5) {
          r.phase = 3;
          r.phase_time = 0.0;
        }
      } else if (r.phase == 3) {
        r.speed = std::min(s.speed, r.speed + 2.0 * dt);
        if (r.speed >= s.speed) r.phase = 4;  // done, cruise on
      }
      r.arc += r.speed * dt;
      r.pose = PoseOf(s, r, 0.0);
      return;
    }
  }
}

void AgentWorld::Step(double t, double dt, double ego_arc) {
  for (std::size_t i = 0; i < runtime_.size(); ++i) {
    Advance(scenario_->agents[i], runtime_[i], t, dt, ego_arc);
  }
}

std::vector<OrientedBox> AgentWorld::Boxes() const {
  std::vector<OrientedBox> out;
  out.reserve(runtime_.size());
  for (std::size_t i = 0; i < runtime_.size(); ++i) {
    const auto& s = scenario_->agents[i];
    out.push_back({runtime_[i].pose, s.length, s.width});
  }
  return out;
}

std::vector<AgentTrack> AgentWorld::Tracks(double t, int horizon, double dt) const {
  std::vector<AgentTrack> out;
  out.reserve(runtime_.size());
  for (std::size_t i = 0; i < runtime_.size(); ++i) {
    const auto& s = scenario_->agents[i];
    AgentTrack track;
    track.id = static_cast<int>(i);
    track.category = s.category;
    track.box = {runtime_[i].pose, s.length, s.width};
    track.confidence = 1.0;
    AgentRuntime r = runtime_[i];
    for (int k = 0; k < horizon; ++k) {
      Advance(s, r, t + k * dt, dt, std::nullopt);
      track.future.push_back(r.pose);
    }
    out.push_back(std::move(track));
  }
  return out;
}

// --- Construction ------------------------------------------------------------

Polyline BuildRoute(const Pose2& start, const std::vector<std::pair<double, double>>& pieces,
                    double step) {
  std::vector<Vec2> pts{start.position()};
  Pose2 p = start;
  for (const auto& [length, curvature] : pieces) {
    const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
    const double ds = length / n;
    for (int i = 0; i < n; ++i) {
      const double dh = curvature * ds;
      const double mid = p.heading + 0.5 * dh;
      // Exact chord of the arc.
      const double chord = std::abs(dh) > 1e-12 ? 2.0 * std::sin(0.5 * dh) / curvature : ds;
      p.x += chord * std::cos(mid);
      p.y += chord * std::sin(mid);
      p.heading += dh;
      pts.push_back(p.position());
    }
  }
  return Polyline(std::move(pts));
}

namespace {

// Straight lead-in, a bend of random direction and sharpness, straight exit.
Polyline RandomBendRoute(Rng& rng, bool curved, double total_length, double bend_start) {
  std::vector<std::pair<double, double>> pieces;
  if (!curved) {
    pieces.push_back({total_length, 0.0});
  } else {
    const double radius = Uniform(rng, 22.0, 45.0);
    const double angle = Uniform(rng, 0.5 * std::numbers::pi, 0.8 * std::numbers::pi);
    const double sign = Coin(rng, 0.5) ? 1.0 : -1.0;
    const double bend = radius * angle;
    pieces.push_back({bend_start, 0.0});
    pieces.push_back({bend, sign / radius});
    pieces.push_back({std::max(20.0, total_length - bend_start - bend), 0.0});
  }
  return BuildRoute({0.0, 0.0, 0.0}, pieces);
}

AgentScript Vehicle(ScriptKind kind) {
  AgentScript a;
  a.kind = kind;
  a.category = AgentCategory::kVehicle;
  a.length = 4.5;
  a.width = 2.0;
  return a;
}

}  // namespace

Scenario MakeScenario(const std::string& family, std::uint64_t seed, const SimConfig& cfg) {
  Rng rng = DeriveRng(seed, FamilyTag(family));
  Scenario s;
  s.family = family;
  s.seed = seed;
  s.name = family + "_" + std::to_string(seed);
  s.cruise_speed = Uniform(rng, 7.0, 8.5);
  s.ego_start = {{0.0, 0.0, 0.0}, s.cruise_speed, 2.8};
  s.duration = 40.0;
  const double v0 = s.cruise_speed;
  (void)cfg;

  if (family == "empty") {
    s.route = RandomBendRoute(rng, Coin(rng, 0.5), 100.0, 20.0);
  } else if (family == "stop_line") {
    s.route = RandomBendRoute(rng, false, 100.0, 20.0);
    s.stop_lines.push_back({Uniform(rng, 35.0, 50.0), Uniform(rng, 1.0, 3.0)});
  } else if (family == "cut_in") {
    const double bend_start = Uniform(rng, 10.0, 30.0);
    s.route = RandomBendRoute(rng, Coin(rng, 0.6), 130.0, bend_start);
    AgentScript a = Vehicle(ScriptKind::kCutIn);
    a.lateral = (Coin(rng, 0.5) ? 1.0 : -1.0) * kLaneWidth;
    a.arc = Uniform(rng, 12.0, 28.0);
    a.speed = Uniform(rng, 0.4, 0.75) * v0;
    a.trigger_distance = Uniform(rng, 7.0, 13.0);
    a.lateral_speed = Uniform(rng, 1.2, 2.2);
    a.cut_speed = v0 * Uniform(rng, 0.9, 1.2);
    s.agents.push_back(a);
  } else if (family == "crossing") {
    const double bend_start = Uniform(rng, 5.0, 20.0);
    s.route = RandomBendRoute(rng, Coin(rng, 0.6), 110.0, bend_start);
    AgentScript a;
    a.kind = ScriptKind::kCrossing;
    const bool cyclist = Coin(rng, 0.3);
    a.category = cyclist ? AgentCategory::kCyclist : AgentCategory::kPedestrian;
    a.length = cyclist ? 1.8 : 0.8;
    a.width = cyclist ? 0.8 : 0.8;
    a.speed = cyclist ? Uniform(rng, 3.0, 5.0) : Uniform(rng, 1.0, 1.8);
    const double s_cross = Uniform(rng, 28.0, 50.0);
    const double side = Coin(rng, 0.5) ? 1.0 : -1.0;
    const double offset = Uniform(rng, 4.0, 7.0);
    const Pose2 at = InterpAlong(s.route, s_cross);
    const Vec2 normal{-std::sin(at.heading), std::cos(at.heading)};
    const Vec2 start = at.position() + normal * (side * offset);
    a.pose = {start.x, start.y, NormalizeAngle(at.heading + (side > 0 ? -1.0 : 1.0) *
                                                            0.5 * std::numbers::pi)};
    const double ego_eta = s_cross / v0;
    a.start_time = std::max(0.0, ego_eta - offset / a.speed + Uniform(rng, -1.5, 0.5));
    s.agents.push_back(a);
  } else if (family == "lead_brake") {
    const double bend_start = Uniform(rng, 0.0, 20.0);
    s.route = RandomBendRoute(rng, Coin(rng, 0.6), 140.0, bend_start);
    AgentScript a = Vehicle(ScriptKind::kLeadBrake);
    a.arc = Uniform(rng, 10.0, 18.0);
    a.speed = v0;
    a.start_time = Uniform(rng, 2.0, 6.0);
    a.decel = Uniform(rng, 4.0, 7.0);
    a.min_speed = Uniform(rng, 0.0, 2.0);
    s.agents.push_back(a);
  } else if (family == "merge") {
    const double bend_start = Uniform(rng, 0.0, 15.0);
    s.route = RandomBendRoute(rng, Coin(rng, 0.7), 130.0, bend_start);
    AgentScript a = Vehicle(ScriptKind::kMerge);
    const double s_merge = Uniform(rng, 30.0, 50.0);
    const Pose2 m = InterpAlong(s.route, s_merge);
    const double side = Coin(rng, 0.5) ? 1.0 : -1.0;
    const double angle = Uniform(rng, 0.35, 0.6);
    const double ramp = 60.0;
    const double ramp_heading = m.heading - side * angle;
    const Vec2 ramp_start = m.position() - Vec2{std::cos(ramp_heading), std::sin(ramp_heading)} * ramp;
    std::vector<Vec2> pts{ramp_start};
    for (int i = 1; i <= 60; ++i) {
      pts.push_back(ramp_start + Vec2{std::cos(ramp_heading), std::sin(ramp_heading)} * (i * ramp / 60));
    }
    for (double sa = s_merge + 1.0; sa <= s.route.length() + 40.0; sa += 1.0) {
      pts.push_back(InterpAlong(s.route, sa).position());
    }
    a.path = Polyline(std::move(pts));
    a.speed = Uniform(rng, 0.8, 1.1) * v0;
    const double ego_eta = s_merge / v0 + Uniform(rng, -1.2, 0.8);
    a.arc = ramp - a.speed * std::max(ego_eta, 0.5);
    s.agents.push_back(a);
  } else {
    Fail(ErrorCode::kInvalidArgument, "unknown scenario family '" + family + "'");
  }
  return s;
}

Scenario MakeNominalScenario(std::uint64_t seed) {
  Rng rng = DeriveRng(seed, FamilyTag("nominal"));
  Scenario s;
  s.family = "nominal";
  s.seed = seed;
  s.name = "nominal_" + std::to_string(seed);
  s.cruise_speed = Uniform(rng, 7.0, 9.0);
  const double start_frac = Coin(rng, 0.35) ? 0.0 : Uniform(rng, 0.3, 1.0);
  s.ego_start = {{0.0, 0.0, 0.0}, s.cruise_speed * start_frac, 2.8};
  s.duration = 24.0;
  const double v0 = s.cruise_speed;

  std::vector<std::pair<double, double>> pieces;
  double total = 0.0;
  while (total < 200.0) {
    const double len = Uniform(rng, 10.0, 50.0);
    const double curvature = Coin(rng, 0.45) ? 0.0 : Uniform(rng, -1.0 / 18.0, 1.0 / 18.0);
    pieces.push_back({len, curvature});
    total += len;
  }
  s.route = BuildRoute({0.0, 0.0, 0.0}, pieces);

  if (Coin(rng, 0.6)) {
    AgentScript lead = Vehicle(ScriptKind::kLeadBrake);
    lead.arc = Uniform(rng, 15.0, 40.0);
    lead.speed = v0 * Uniform(rng, 0.7, 1.1);
    lead.start_time = Uniform(rng, 2.0, 15.0);
    lead.decel = Uniform(rng, 0.8, 4.0);
    lead.min_speed = Coin(rng, 0.35) ? 0.0 : lead.speed * Uniform(rng, 0.2, 0.8);
    s.agents.push_back(lead);
  }
  const int adjacent = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < adjacent; ++i) {
    AgentScript a = Vehicle(ScriptKind::kCutIn);
    a.lateral = (Coin(rng, 0.5) ? 1.0 : -1.0) * kLaneWidth;
    a.arc = Uniform(rng, -20.0, 120.0);
    const bool oncoming = Coin(rng, 0.5);
    a.speed = (oncoming ? -1.0 : 1.0) * Uniform(rng, 3.0, 11.0);
    a.trigger_distance = -1e9;  // never cuts in
    a.cut_speed = a.speed;
    s.agents.push_back(a);
  }
  const int parked = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < parked; ++i) {
    AgentScript a = Vehicle(ScriptKind::kParked);
    const double arc = Uniform(rng, 10.0, 150.0);
    const Pose2 at = InterpAlong(s.route, arc);
    const double lateral = (Coin(rng, 0.5) ? 1.0 : -1.0) * Uniform(rng, 3.6, 5.0);
    const Vec2 p = at.position() + Vec2{-std::sin(at.heading), std::cos(at.heading)} * lateral;
    a.pose = {p.x, p.y, at.heading};
    s.agents.push_back(a);
  }
  const int walkers = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < walkers; ++i) {
    AgentScript a;
    a.kind = ScriptKind::kCrossing;
    a.category = AgentCategory::kPedestrian;
    a.length = 0.8;
    a.width = 0.8;
    const double arc = Uniform(rng, 10.0, 120.0);
    const Pose2 at = InterpAlong(s.route, arc);
    const double lateral = (Coin(rng, 0.5) ? 1.0 : -1.0) * Uniform(rng, 6.0, 8.0);
    const Vec2 p = at.position() + Vec2{-std::sin(at.heading), std::cos(at.heading)} * lateral;
    a.pose = {p.x, p.y, NormalizeAngle(at.heading + (Coin(rng, 0.5) ? 0.0 : std::numbers::pi))};
    a.speed = Uniform(rng, 0.8, 1.6);
    a.start_time = 0.0;
    s.agents.push_back(a);
  }
  return s;
}

// --- JSON --------------------------------------------------------------------

std::string SerializeScenarios(const std::vector<Scenario>& scenarios) {
  using json = nlohmann::ordered_json;
  json arr = json::array();
  for (const auto& s : scenarios) {
    json j;
    j["name"] = s.name;
    j["family"] = s.family;
    j["seed"] = s.seed;
    j["route"] = PolylineToJson(s.route);
    j["ego"] = {{"x", s.ego_start.pose.x},         {"y", s.ego_start.pose.y},
                {"heading", s.ego_start.pose.heading}, {"speed", s.ego_start.speed},
                {"wheelbase", s.ego_start.wheelbase}};
    j["cruise_speed"] = s.cruise_speed;
    json agents = json::array();
    for (const auto& a : s.agents) {
      json p;
      p["category"] = ToString(a.category);
      p["length"] = a.length;
      p["width"] = a.width;
      p["x"] = a.pose.x;
      p["y"] = a.pose.y;
      p["heading"] = a.pose.heading;
      p["arc"] = a.arc;
      p["lateral"] = a.lateral;
      p["speed"] = a.speed;
      p["start_time"] = a.start_time;
      p["trigger_distance"] = a.trigger_distance;
      p["lateral_speed"] = a.lateral_speed;
      p["cut_speed"] = a.cut_speed;
      p["decel"] = a.decel;
      p["min_speed"] = a.min_speed;
      if (a.path) p["path"] = PolylineToJson(*a.path);
      agents.push_back({{"kind", ToString(a.kind)}, {"params", std::move(p)}});
    }
    j["agents"] = std::move(agents);
    json stops = json::array();
    for (const auto& sl : s.stop_lines) stops.push_back({sl.arc, sl.hold});
    j["stop_lines"] = std::move(stops);
    j["duration"] = s.duration;
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

std::vector<Scenario> ParseScenarios(const std::string& text) {
  using json = nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kParse, std::string("scenario file: ") + e.what());
  }
  if (root.is_object()) root = json::array({root});
  if (!root.is_array()) Fail(ErrorCode::kParse, "scenario file: expected an object or array");

  std::vector<Scenario> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& j = root[i];
    const FieldContext ctx("scenarios[" + std::to_string(i) + "]");
    RejectUnknownKeys(j, {"name", "family", "seed", "route", "ego", "cruise_speed", "agents",
                          "stop_lines", "duration"},
                      ctx, ErrorCode::kParse);
    Scenario s;
    s.name = GetString(j, "name", ctx);
    if (j.contains("family")) s.family = GetString(j, "family", ctx);
    if (j.contains("seed")) s.seed = static_cast<std::uint64_t>(GetInteger(j, "seed", ctx));
    s.route = PolylineFromJson(GetArray(j, "route", ctx), ctx.Child("route"));
    const json& ego = GetField(j, "ego", ctx);
    const FieldContext ectx = ctx.Child("ego");
    RejectUnknownKeys(ego, {"x", "y", "heading", "speed", "wheelbase"}, ectx, ErrorCode::kParse);
    s.ego_start.pose = {GetNumber(ego, "x", ectx), GetNumber(ego, "y", ectx),
                        GetNumber(ego, "heading", ectx)};
    s.ego_start.speed = GetNumber(ego, "speed", ectx);
    if (ego.contains("wheelbase")) s.ego_start.wheelbase = GetNumber(ego, "wheelbase", ectx);
    s.cruise_speed = j.contains("cruise_speed") ? GetNumber(j, "cruise_speed", ctx)
                                                : std::max(s.ego_start.speed, 1.0);
    const json& agents = GetArray(j, "agents", ctx);
    for (std::size_t k = 0; k < agents.size(); ++k) {
      const FieldContext actx = ctx.Child("agents", k);
      RejectUnknownKeys(agents[k], {"kind", "params"}, actx, ErrorCode::kParse);
      AgentScript a;
      a.kind = ParseScriptKind(GetString(agents[k], "kind", actx));
      const json& p = GetField(agents[k], "params", actx);
      const FieldContext pctx = actx.Child("params");
      RejectUnknownKeys(p, {"category", "length", "width", "x", "y", "heading", "arc", "lateral",
                            "speed", "start_time", "trigger_distance", "lateral_speed",
                            "cut_speed", "decel", "min_speed", "path"},
                        pctx, ErrorCode::kParse);
      auto num = [&](const char* key, double& dst) {
        if (p.contains(key)) dst = GetNumber(p, key, pctx);
      };
      if (p.contains("category")) a.category = ParseCategory(GetString(p, "category", pctx));
      num("length", a.length);
      num("width", a.width);
      num("x", a.pose.x);
      num("y", a.pose.y);
      num("heading", a.pose.heading);
      num("arc", a.arc);
      num("lateral", a.lateral);
      num("speed", a.speed);
      num("start_time", a.start_time);
      num("trigger_distance", a.trigger_distance);
      num("lateral_speed", a.lateral_speed);
      num("cut_speed", a.cut_speed);
      num("decel", a.decel);
      num("min_speed", a.min_speed);
      if (p.contains("path")) a.path = PolylineFromJson(p["path"], pctx.Child("path"));
      s.agents.push_back(std::move(a));
    }
    if (j.contains("stop_lines")) {
      const json& stops = GetArray(j, "stop_lines", ctx);
      for (std::size_t k = 0; k < stops.size(); ++k) {
        const auto v = NumberTuple(stops[k], 2, ctx.Child("stop_lines", k));
        s.stop_lines.push_back({v[0], v[1]});
      }
    }
    s.duration = GetNumber(j, "duration", ctx);
    s.Validate();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cplan
