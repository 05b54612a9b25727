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

#include <fstream>
#include <sstream>
#include <string>

#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"
#include "cplan/scene.hpp"

namespace cplan {

namespace {

using json = nlohmann::ordered_json;


json FrameToJson(const Frame& f) {
  json ego;
  ego["x"] = f.ego.pose.x;
  ego["y"] = f.ego.pose.y;
  ego["heading"] = f.ego.pose.heading;
  ego["speed"] = f.ego.speed;
  json fut = json::array();
  for (const auto& s : f.ego.future) fut.push_back({s.t, s.x, s.y});
  ego["future"] = std::move(fut);

  json agents = json::array();
  for (const auto& a : f.agents) {
    json ja;
    ja["id"] = a.id;
    ja["category"] = ToString(a.category);
    ja["x"] = a.box.center.x;
    ja["y"] = a.box.center.y;
    ja["heading"] = a.box.center.heading;
    ja["length"] = a.box.length;
    ja["width"] = a.box.width;
    ja["confidence"] = a.confidence;
    json af = json::array();
    for (const auto& p : a.future) af.push_back({p.x, p.y, p.heading});
    ja["future"] = std::move(af);
    agents.push_back(std::move(ja));
  }

  json map = json::array();
  for (const auto& m : f.map_lines) {
    map.push_back({{"role", ToString(m.role)}, {"points", PolylineToJson(m.line)}});
  }

  json out;
  out["timestamp"] = f.timestamp;
  out["ego"] = std::move(ego);
  out["agents"] = std::move(agents);
  out["map"] = std::move(map);
  return out;
}

Frame FrameFromJson(const json& j, const FieldContext& ctx) {
  Frame f;
  f.timestamp = GetNumber(j, "timestamp", ctx);
  const json& ego = GetField(j, "ego", ctx);
  const FieldContext ego_ctx = ctx.Child("ego");
  f.ego.pose = {GetNumber(ego, "x", ego_ctx), GetNumber(ego, "y", ego_ctx),
                GetNumber(ego, "heading", ego_ctx)};
  f.ego.speed = GetNumber(ego, "speed", ego_ctx);
  const json& fut = GetArray(ego, "future", ego_ctx);
  for (std::size_t i = 0; i < fut.size(); ++i) {
    const auto v = NumberTuple(fut[i], 3, ego_ctx.Child("future", i));
    f.ego.future.push_back({v[0], v[1], v[2]});
  }

  const json& agents = GetArray(j, "agents", ctx);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const json& ja = agents[i];
    const FieldContext actx = ctx.Child("agents", i);
    AgentTrack a;
    a.id = static_cast<int>(GetInteger(ja, "id", actx));
    try {
      a.category = ParseCategory(GetString(ja, "category", actx));
    } catch (const Error& e) {
      Fail(ErrorCode::kParse, actx.Describe("category") + ": " + e.what());
    }
    a.box.center = {GetNumber(ja, "x", actx), GetNumber(ja, "y", actx),
                    GetNumber(ja, "heading", actx)};
    a.box.length = GetNumber(ja, "length", actx);
    a.box.width = GetNumber(ja, "width", actx);
    a.confidence = GetNumber(ja, "confidence", actx);
    const json& af = GetArray(ja, "future", actx);
    for (std::size_t k = 0; k < af.size(); ++k) {
      const auto v = NumberTuple(af[k], 3, actx.Child("future", k));
      a.future.push_back({v[0], v[1], v[2]});
    }
    f.agents.push_back(std::move(a));
  }

  const json& map = GetArray(j, "map", ctx);
  for (std::size_t i = 0; i < map.size(); ++i) {
    const FieldContext mctx = ctx.Child("map", i);
    MapLine m;
    try {
      m.role = ParseMapRole(GetString(map[i], "role", mctx));
    } catch (const Error& e) {
      Fail(ErrorCode::kParse, mctx.Describe("role") + ": " + e.what());
    }
    m.line = PolylineFromJson(GetArray(map[i], "points", mctx), mctx.Child("points"));
    f.map_lines.push_back(std::move(m));
  }
  return f;
}

}  // namespace

std::string SerializeFrame(const Frame& frame) { return FrameToJson(frame).dump(); }

std::string SerializeFrames(const FrameLog& log) {
  std::string out;
  json header;
  header["schema"] = kFrameSchema;
  header["dt"] = log.dt;
  out += header.dump();
  out += '\n';
  for (const auto& f : log.frames) {
    out += FrameToJson(f).dump();
    out += '\n';
  }
  return out;
}

FrameLog ParseFrames(std::string_view text) {
  FrameLog log;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    const FieldContext ctx("line " + std::to_string(line_no));
    if (!have_header) {
      const std::string schema = GetString(j, "schema", ctx);
      if (schema != kFrameSchema) {
        Fail(ErrorCode::kVersion, "unsupported frame schema '" + schema + "', expected '" +
                                      std::string(kFrameSchema) + "'");
      }
      log.dt = GetNumber(j, "dt", ctx);
      have_header = true;
      continue;
    }
    log.frames.push_back(FrameFromJson(j, ctx));
  }
  if (!have_header) Fail(ErrorCode::kParse, "frame log is missing its header line");
  return log;
}

FrameLog LoadFrames(const std::string& path) {
  return ParseFrames(ReadTextFile(path));
}

void SaveFrames(const FrameLog& log, const std::string& path) {
  WriteTextFile(path, SerializeFrames(log));
}

}  // namespace cplan
