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

#include "cplan/config.hpp"

#include <cmath>
#include <filesystem>
#include <limits>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"

namespace cplan {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Optional-field readers: absent keys keep the default.
void Opt(const json& j, const char* key, const FieldContext& ctx, double& dst) {
  if (j.contains(key)) dst = GetNumber(j, key, ctx);
}
void Opt(const json& j, const char* key, const FieldContext& ctx, int& dst) {
  if (j.contains(key)) dst = static_cast<int>(GetInteger(j, key, ctx));
}
void Opt(const json& j, const char* key, const FieldContext& ctx, std::uint64_t& dst) {
  if (!j.contains(key)) return;
  const long long v = GetInteger(j, key, ctx);
  if (v < 0) Fail(ErrorCode::kConfig, ctx.Describe(key) + ": must be >= 0");
  dst = static_cast<std::uint64_t>(v);
}
void Opt(const json& j, const char* key, const FieldContext& ctx, bool& dst) {
  if (!j.contains(key)) return;
  if (!j[key].is_boolean()) Fail(ErrorCode::kConfig, ctx.Describe(key) + ": expected a boolean");
  dst = j[key].get<bool>();
}
void Opt(const json& j, const char* key, const FieldContext& ctx, std::string& dst) {
  if (j.contains(key)) dst = GetString(j, key, ctx);
}
void Opt(const json& j, const char* key, const FieldContext& ctx, std::vector<double>& dst) {
  if (j.contains(key)) dst = NumberVector(j[key], ctx.Child(key));
}
void Opt(const json& j, const char* key, const FieldContext& ctx, std::vector<std::string>& dst) {
  if (!j.contains(key)) return;
  const json& arr = GetArray(j, key, ctx);
  dst.clear();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) Fail(ErrorCode::kConfig, ctx.Child(key, i).path() + ": expected a string");
    dst.push_back(arr[i].get<std::string>());
  }
}
void Opt(const json& j, const char* key, const FieldContext& ctx, Interval& dst) {
  if (!j.contains(key)) return;
  const auto v = NumberTuple(j[key], 2, ctx.Child(key));
  dst = {v[0], v[1]};
}

const json* Section(const json& j, const char* key, const FieldContext& ctx) {
  if (!j.contains(key)) return nullptr;
  if (!j[key].is_object()) Fail(ErrorCode::kConfig, ctx.Describe(key) + ": expected an object");
  return &j[key];
}

void ReadPid(const json& j, const FieldContext& ctx, PIDGains& g) {
  RejectUnknownKeys(j, {"kp", "ki", "kd", "integral_limit", "output_limit"}, ctx);
  Opt(j, "kp", ctx, g.kp);
  Opt(j, "ki", ctx, g.ki);
  Opt(j, "kd", ctx, g.kd);
  Opt(j, "integral_limit", ctx, g.integral_limit);
  if (j.contains("output_limit")) {
    const auto v = NumberTuple(j["output_limit"], 2, ctx.Child("output_limit"));
    g.out_min = v[0];
    g.out_max = v[1];
  }
}

ojson PidJson(const PIDGains& g) {
  return {{"kp", g.kp},
          {"ki", g.ki},
          {"kd", g.kd},
          {"integral_limit", g.integral_limit},
          {"output_limit", {g.out_min, g.out_max}}};
}

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

LossWeights Config::loss_weights() const {
  LossWeights w = LossWeights::Defaults(path_points, horizon);
  w.lambda_plan = learn.lambda_plan;
  return w;
}

void Config::Finalize() {
  if (!(dt > 0.0)) Fail(ErrorCode::kConfig, "dt must be > 0");
  if (horizon < 1) Fail(ErrorCode::kConfig, "horizon must be >= 1");
  if (path_points < 2) Fail(ErrorCode::kConfig, "path_points must be >= 2");
  if (!(path_spacing > 0.0)) Fail(ErrorCode::kConfig, "path_spacing must be > 0");
  if (!(vehicle.length > 0.0 && vehicle.width > 0.0)) {
    Fail(ErrorCode::kConfig, "vehicle dims must be > 0");
  }
  augment.ego_dims = vehicle;
  cost.ego_dims = vehicle;
  learn.features.ego_dims = vehicle;
  sim.ego_dims = vehicle;
  sim.horizon = horizon;
  sim.path_points = path_points;
  sim.path_spacing = path_spacing;
  sim.plan_dt = dt;

  augment.Validate();
  cost.Validate();
  sim.Validate();
  if (anchors.path_count < 1) Fail(ErrorCode::kConfig, "anchors.path_count must be >= 1");
  if (anchors.kmeans_iters < 1) Fail(ErrorCode::kConfig, "anchors.kmeans_iters must be >= 1");
  if (anchors.lookaheads.empty()) Fail(ErrorCode::kConfig, "anchors.lookaheads must be non-empty");
  for (double l : anchors.lookaheads) {
    if (!(l >= 0.0) || !std::isfinite(l)) Fail(ErrorCode::kConfig, "anchors.lookaheads must be >= 0");
  }
  if (learn.hidden < 1) Fail(ErrorCode::kConfig, "learn.hidden must be >= 1");
  if (!(learn.train.lr > 0.0)) Fail(ErrorCode::kConfig, "learn.lr must be > 0");
  if (learn.train.epochs < 1 || learn.train.batch_size < 1) {
    Fail(ErrorCode::kConfig, "learn.epochs and learn.batch_size must be >= 1");
  }
  if (!(learn.init_scale > 0.0)) Fail(ErrorCode::kConfig, "learn.init_scale must be > 0");
  if (!(learn.lambda_plan > 0.0)) Fail(ErrorCode::kConfig, "learn.lambda_plan must be > 0");
  if (!(learn.augment_alpha >= 0.0 && learn.augment_alpha <= 1.0)) {
    Fail(ErrorCode::kConfig, "learn.augment_alpha must be in [0,1]");
  }
  const auto& f = learn.features;
  if (!(f.distance_clip > 0.0 && f.penetration_clip >= 0.0 && f.scale > 0.0 &&
        f.agent_radius > 0.0)) {
    Fail(ErrorCode::kConfig, "learn.features values must be positive");
  }
  if (data.nominal_scenarios < 1) Fail(ErrorCode::kConfig, "data.nominal_scenarios must be >= 1");
  if (!(data.record.frame_interval > 0.0 && data.record.future_seconds > 0.0 &&
        data.record.agent_radius > 0.0)) {
    Fail(ErrorCode::kConfig, "data record options must be > 0");
  }
  if (bench.families.empty()) Fail(ErrorCode::kConfig, "bench.families must be non-empty");
  if (bench.episodes_per_family < 1) {
    Fail(ErrorCode::kConfig, "bench.episodes_per_family must be >= 1");
  }
  for (double a : bench.alpha_sweep) {
    if (!(a >= 0.0 && a <= 1.0)) Fail(ErrorCode::kConfig, "bench.alpha_sweep entries must be in [0,1]");
  }
  if (!(bench.augment_alpha >= 0.0 && bench.augment_alpha <= 1.0)) {
    Fail(ErrorCode::kConfig, "bench.augment_alpha must be in [0,1]");
  }
}

Config ParseConfig(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  const FieldContext ctx("config");
  RejectUnknownKeys(root, {"seed", "dt", "horizon", "path_points", "path_spacing", "vehicle",
                           "augment", "anchors", "cost", "learn", "control", "sim", "data",
                           "bench", "io"},
                    ctx);
  Config c;
  try {
    Opt(root, "seed", ctx, c.seed);
    Opt(root, "dt", ctx, c.dt);
    Opt(root, "horizon", ctx, c.horizon);
    Opt(root, "path_points", ctx, c.path_points);
    Opt(root, "path_spacing", ctx, c.path_spacing);

    if (const json* s = Section(root, "vehicle", ctx)) {
      const auto sc = ctx.Child("vehicle");
      RejectUnknownKeys(*s, {"length", "width"}, sc);
      Opt(*s, "length", sc, c.vehicle.length);
      Opt(*s, "width", sc, c.vehicle.width);
    }
    if (const json* s = Section(root, "augment", ctx)) {
      const auto sc = ctx.Child("augment");
      RejectUnknownKeys(*s, {"alpha", "delta", "d_safe", "near_range", "far_range",
                             "arrival_time_range", "threat_prob", "threat_window",
                             "nonthreat_gap", "max_agent_speed", "agent_capacity",
                             "max_attempts"},
                        sc);
      auto& a = c.augment;
      Opt(*s, "alpha", sc, a.alpha);
      Opt(*s, "delta", sc, a.delta);
      Opt(*s, "d_safe", sc, a.d_safe);
      Opt(*s, "near_range", sc, a.near_range);
      Opt(*s, "far_range", sc, a.far_range);
      Opt(*s, "arrival_time_range", sc, a.arrival_time_range);
      Opt(*s, "threat_prob", sc, a.threat_prob);
      Opt(*s, "threat_window", sc, a.threat_window);
      Opt(*s, "nonthreat_gap", sc, a.nonthreat_gap);
      Opt(*s, "max_agent_speed", sc, a.max_agent_speed);
      Opt(*s, "agent_capacity", sc, a.agent_capacity);
      Opt(*s, "max_attempts", sc, a.max_attempts);
    }
    if (const json* s = Section(root, "anchors", ctx)) {
      const auto sc = ctx.Child("anchors");
      RejectUnknownKeys(*s, {"path_count", "kmeans_iters", "lookaheads"}, sc);
      Opt(*s, "path_count", sc, c.anchors.path_count);
      Opt(*s, "kmeans_iters", sc, c.anchors.kmeans_iters);
      Opt(*s, "lookaheads", sc, c.anchors.lookaheads);
    }
    if (const json* s = Section(root, "cost", ctx)) {
      const auto sc = ctx.Child("cost");
      RejectUnknownKeys(*s, {"w_progress", "w_collision", "w_smooth", "collision_check_dt",
                             "max_scale", "scale_step", "speed_limit"},
                        sc);
      auto& k = c.cost;
      Opt(*s, "w_progress", sc, k.w_progress);
      Opt(*s, "w_collision", sc, k.w_collision);
      Opt(*s, "w_smooth", sc, k.w_smooth);
      Opt(*s, "collision_check_dt", sc, k.collision_check_dt);
      Opt(*s, "max_scale", sc, k.max_scale);
      Opt(*s, "scale_step", sc, k.scale_step);
      if (s->contains("speed_limit") && !(*s)["speed_limit"].is_null()) {
        k.speed_limit = GetNumber(*s, "speed_limit", sc);
      }
    }
    if (const json* s = Section(root, "learn", ctx)) {
      const auto sc = ctx.Child("learn");
      RejectUnknownKeys(*s, {"hidden", "init_scale", "lr", "epochs", "batch_size", "lambda_plan",
                             "augment_alpha", "path_aware", "features"},
                        sc);
      auto& l = c.learn;
      Opt(*s, "hidden", sc, l.hidden);
      Opt(*s, "init_scale", sc, l.init_scale);
      Opt(*s, "lr", sc, l.train.lr);
      Opt(*s, "epochs", sc, l.train.epochs);
      Opt(*s, "batch_size", sc, l.train.batch_size);
      Opt(*s, "lambda_plan", sc, l.lambda_plan);
      Opt(*s, "augment_alpha", sc, l.augment_alpha);
      Opt(*s, "path_aware", sc, l.path_aware);
      if (const json* f = Section(*s, "features", sc)) {
        const auto fc = sc.Child("features");
        RejectUnknownKeys(*f, {"distance_clip", "penetration_clip", "scale", "agent_radius"}, fc);
        Opt(*f, "distance_clip", fc, l.features.distance_clip);
        Opt(*f, "penetration_clip", fc, l.features.penetration_clip);
        Opt(*f, "scale", fc, l.features.scale);
        Opt(*f, "agent_radius", fc, l.features.agent_radius);
      }
    }
    if (const json* s = Section(root, "control", ctx)) {
      const auto sc = ctx.Child("control");
      RejectUnknownKeys(*s, {"lateral", "speed", "speed_preview_steps"}, sc);
      if (const json* lat = Section(*s, "lateral", sc)) {
        const auto lc = sc.Child("lateral");
        RejectUnknownKeys(*lat, {"kp", "ki", "kd", "integral_limit", "output_limit",
                                 "look_ahead_min", "look_ahead_gain", "max_steer"},
                          lc);
        json gains = json::object();
        for (const char* k : {"kp", "ki", "kd", "integral_limit", "output_limit"}) {
          if (lat->contains(k)) gains[k] = (*lat)[k];
        }
        ReadPid(gains, lc, c.sim.lateral.gains);
        Opt(*lat, "look_ahead_min", lc, c.sim.lateral.look_ahead_min);
        Opt(*lat, "look_ahead_gain", lc, c.sim.lateral.look_ahead_gain);
        Opt(*lat, "max_steer", lc, c.sim.lateral.max_steer);
      }
      if (const json* sp = Section(*s, "speed", sc)) ReadPid(*sp, sc.Child("speed"), c.sim.speed);
      Opt(*s, "speed_preview_steps", sc, c.sim.speed_preview_steps);
    }
    if (const json* s = Section(root, "sim", ctx)) {
      const auto sc = ctx.Child("sim");
      RejectUnknownKeys(*s, {"dt_sim", "replan_dt", "goal_tolerance", "record_steps"}, sc);
      Opt(*s, "dt_sim", sc, c.sim.dt_sim);
      Opt(*s, "replan_dt", sc, c.sim.replan_dt);
      Opt(*s, "goal_tolerance", sc, c.sim.goal_tolerance);
      Opt(*s, "record_steps", sc, c.sim.record_steps);
    }
    if (const json* s = Section(root, "data", ctx)) {
      const auto sc = ctx.Child("data");
      RejectUnknownKeys(*s, {"nominal_scenarios", "first_seed", "frame_interval",
                             "future_seconds", "agent_radius"},
                        sc);
      Opt(*s, "nominal_scenarios", sc, c.data.nominal_scenarios);
      Opt(*s, "first_seed", sc, c.data.first_seed);
      Opt(*s, "frame_interval", sc, c.data.record.frame_interval);
      Opt(*s, "future_seconds", sc, c.data.record.future_seconds);
      Opt(*s, "agent_radius", sc, c.data.record.agent_radius);
    }
    if (const json* s = Section(root, "bench", ctx)) {
      const auto sc = ctx.Child("bench");
      RejectUnknownKeys(*s, {"families", "episodes_per_family", "first_seed", "augment_alpha",
                             "alpha_sweep", "plot_scenarios"},
                        sc);
      Opt(*s, "families", sc, c.bench.families);
      Opt(*s, "episodes_per_family", sc, c.bench.episodes_per_family);
      Opt(*s, "first_seed", sc, c.bench.first_seed);
      Opt(*s, "augment_alpha", sc, c.bench.augment_alpha);
      Opt(*s, "alpha_sweep", sc, c.bench.alpha_sweep);
      Opt(*s, "plot_scenarios", sc, c.bench.plot_scenarios);
    }
    if (const json* s = Section(root, "io", ctx)) {
      const auto sc = ctx.Child("io");
      RejectUnknownKeys(*s, {"frames", "anchors", "params", "scenarios"}, sc);
      Opt(*s, "frames", sc, c.io.frames);
      Opt(*s, "anchors", sc, c.io.anchors);
      Opt(*s, "params", sc, c.io.params);
      Opt(*s, "scenarios", sc, c.io.scenarios);
    }
  } catch (const Error& e) {
    // Type errors in the config surface as config errors.
    if (e.code() == ErrorCode::kParse) Fail(ErrorCode::kConfig, e.what());
    throw;
  }
  c.io.frames = Resolve(c.io.frames, base_dir);
  c.io.anchors = Resolve(c.io.anchors, base_dir);
  c.io.params = Resolve(c.io.params, base_dir);
  c.io.scenarios = Resolve(c.io.scenarios, base_dir);
  c.Finalize();
  return c;
}

Config LoadConfig(const std::string& path) {
  const std::string text = ReadTextFile(path);
  return ParseConfig(text, std::filesystem::path(path).parent_path().string());
}

std::string SerializeConfig(const Config& c) {
  ojson j;
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["path_points"] = c.path_points;
  j["path_spacing"] = c.path_spacing;
  j["vehicle"] = {{"length", c.vehicle.length}, {"width", c.vehicle.width}};
  const auto& a = c.augment;
  j["augment"] = {{"alpha", a.alpha},
                  {"delta", a.delta},
                  {"d_safe", a.d_safe},
                  {"near_range", {a.near_range.lo, a.near_range.hi}},
                  {"far_range", {a.far_range.lo, a.far_range.hi}},
                  {"arrival_time_range", {a.arrival_time_range.lo, a.arrival_time_range.hi}},
                  {"threat_prob", a.threat_prob},
                  {"threat_window", a.threat_window},
                  {"nonthreat_gap", a.nonthreat_gap},
                  {"max_agent_speed", a.max_agent_speed},
                  {"agent_capacity", a.agent_capacity},
                  {"max_attempts", a.max_attempts}};
  j["anchors"] = {{"path_count", c.anchors.path_count},
                  {"kmeans_iters", c.anchors.kmeans_iters},
                  {"lookaheads", c.anchors.lookaheads}};
  const auto& k = c.cost;
  j["cost"] = {{"w_progress", k.w_progress},
               {"w_collision", k.w_collision},
               {"w_smooth", k.w_smooth},
               {"collision_check_dt", k.collision_check_dt},
               {"max_scale", k.max_scale},
               {"scale_step", k.scale_step}};
  j["cost"]["speed_limit"] = std::isfinite(k.speed_limit) ? ojson(k.speed_limit) : ojson(nullptr);
  const auto& l = c.learn;
  j["learn"] = {{"hidden", l.hidden},
                {"init_scale", l.init_scale},
                {"lr", l.train.lr},
                {"epochs", l.train.epochs},
                {"batch_size", l.train.batch_size},
                {"lambda_plan", l.lambda_plan},
                {"augment_alpha", l.augment_alpha},
                {"path_aware", l.path_aware},
                {"features", {{"distance_clip", l.features.distance_clip},
                              {"penetration_clip", l.features.penetration_clip},
                              {"scale", l.features.scale},
                              {"agent_radius", l.features.agent_radius}}}};
  ojson lat = PidJson(c.sim.lateral.gains);
  lat["look_ahead_min"] = c.sim.lateral.look_ahead_min;
  lat["look_ahead_gain"] = c.sim.lateral.look_ahead_gain;
  lat["max_steer"] = c.sim.lateral.max_steer;
  j["control"] = {{"lateral", lat},
                  {"speed", PidJson(c.sim.speed)},
                  {"speed_preview_steps", c.sim.speed_preview_steps}};
  j["sim"] = {{"dt_sim", c.sim.dt_sim},
              {"replan_dt", c.sim.replan_dt},
              {"goal_tolerance", c.sim.goal_tolerance},
              {"record_steps", c.sim.record_steps}};
  j["data"] = {{"nominal_scenarios", c.data.nominal_scenarios},
               {"first_seed", c.data.first_seed},
               {"frame_interval", c.data.record.frame_interval},
               {"future_seconds", c.data.record.future_seconds},
               {"agent_radius", c.data.record.agent_radius}};
  j["bench"] = {{"families", c.bench.families},
                {"episodes_per_family", c.bench.episodes_per_family},
                {"first_seed", c.bench.first_seed},
                {"augment_alpha", c.bench.augment_alpha},
                {"alpha_sweep", c.bench.alpha_sweep},
                {"plot_scenarios", c.bench.plot_scenarios}};
  j["io"] = {{"frames", c.io.frames},
             {"anchors", c.io.anchors},
             {"params", c.io.params},
             {"scenarios", c.io.scenarios}};
  return j.dump(2) + "\n";
}

}  // namespace cplan
