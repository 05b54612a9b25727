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

#ifndef CPLAN_JSON_UTIL_HPP_
#define CPLAN_JSON_UTIL_HPP_

// Helpers for reading JSON documents with field-path error messages.

#include <array>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cplan/errors.hpp"
#include "cplan/geometry.hpp"
#include "json.hpp"

namespace cplan {

class FieldContext {
 public:
  explicit FieldContext(std::string path) : path_(std::move(path)) {}

  FieldContext Child(const std::string& key) const { return FieldContext(Describe(key)); }
  FieldContext Child(const std::string& key, std::size_t index) const {
    return FieldContext(Describe(key) + "[" + std::to_string(index) + "]");
  }
  std::string Describe(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

template <typename Json>
const Json& GetField(const Json& j, const std::string& key, const FieldContext& ctx) {
  if (!j.is_object()) Fail(ErrorCode::kParse, ctx.path() + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) Fail(ErrorCode::kParse, ctx.Describe(key) + ": missing field");
  return *it;
}

template <typename Json>
double AsNumber(const Json& v, const std::string& where) {
  if (!v.is_number()) Fail(ErrorCode::kParse, where + ": expected a number");
  return v.template get<double>();
}

template <typename Json>
double GetNumber(const Json& j, const std::string& key, const FieldContext& ctx) {
  return AsNumber(GetField(j, key, ctx), ctx.Describe(key));
}

template <typename Json>
long long GetInteger(const Json& j, const std::string& key, const FieldContext& ctx) {
  const Json& v = GetField(j, key, ctx);
  if (!v.is_number_integer()) Fail(ErrorCode::kParse, ctx.Describe(key) + ": expected an integer");
  return v.template get<long long>();
}

template <typename Json>
std::string GetString(const Json& j, const std::string& key, const FieldContext& ctx) {
  const Json& v = GetField(j, key, ctx);
  if (!v.is_string()) Fail(ErrorCode::kParse, ctx.Describe(key) + ": expected a string");
  return v.template get<std::string>();
}

template <typename Json>
const Json& GetArray(const Json& j, const std::string& key, const FieldContext& ctx) {
  const Json& v = GetField(j, key, ctx);
  if (!v.is_array()) Fail(ErrorCode::kParse, ctx.Describe(key) + ": expected an array");
  return v;
}

template <typename Json>
std::vector<double> NumberTuple(const Json& v, std::size_t n, const FieldContext& ctx) {
  if (!v.is_array() || v.size() != n) {
    Fail(ErrorCode::kParse, ctx.path() + ": expected an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = AsNumber(v[i], ctx.path());
  return out;
}

template <typename Json>
std::vector<double> NumberVector(const Json& v, const FieldContext& ctx) {
  if (!v.is_array()) Fail(ErrorCode::kParse, ctx.path() + ": expected an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(AsNumber(e, ctx.path()));
  return out;
}

template <typename Json>
Polyline PolylineFromJson(const Json& arr, const FieldContext& ctx) {
  if (!arr.is_array()) Fail(ErrorCode::kParse, ctx.path() + ": expected an array of points");
  std::vector<Vec2> pts;
  pts.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto v = NumberTuple(arr[i], 2, FieldContext(ctx.path() + "[" + std::to_string(i) + "]"));
    pts.push_back({v[0], v[1]});
  }
  try {
    return Polyline(std::move(pts));
  } catch (const Error& e) {
    Fail(ErrorCode::kParse, ctx.path() + ": " + e.what());
  }
}

inline nlohmann::ordered_json PolylineToJson(const Polyline& line) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : line.points()) arr.push_back({p.x, p.y});
  return arr;
}

// Rejects keys outside `allowed`. Config documents report kConfig; data
// files pass kParse.
template <typename Json>
void RejectUnknownKeys(const Json& j, std::initializer_list<const char*> allowed,
                       const FieldContext& ctx, ErrorCode code = ErrorCode::kConfig) {
  if (!j.is_object()) Fail(code, ctx.path() + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) Fail(code, ctx.Describe(it.key()) + ": unknown key");
  }
}

inline std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace cplan

#endif  // CPLAN_JSON_UTIL_HPP_
