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


#include "cplan/cplan.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cplan/config.hpp"
#include "cplan/errors.hpp"
#include "cplan/json_util.hpp"
#include "cplan/pipeline.hpp"

struct cplan_config {
  cplan::Config cfg;
};

struct cplan_frames {
  cplan::FrameLog log;
};

namespace {

namespace fs = std::filesystem;
using cplan::ErrorCode;
using cplan::Fail;

thread_local std::string g_last_error;

cplan_status Record(cplan_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
cplan_status Guard(Fn&& fn) {
  try {
    fn();
    return CPLAN_OK;
  } catch (const cplan::Error& e) {
    return Record(static_cast<cplan_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return Record(CPLAN_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(CPLAN_E_INTERNAL, e.what());
  } catch (...) {
    return Record(CPLAN_E_INTERNAL, "unknown error");
  }
}

void Require(const void* p, const char* what) {
  if (!p) Fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  s.copy(out, s.size());
  out[s.size()] = '\0';
  return out;
}

fs::path MakeOutDir(const char* out_dir) {
  Require(out_dir, "out_dir");
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

void MakeDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
}

void Write(const fs::path& path, const std::string& text) {
  cplan::WriteTextFile(path.string(), text);
}

std::string Read(const fs::path& path) { return cplan::ReadTextFile(path.string()); }

cplan::FrameLog FramesFromConfig(const cplan::Config& cfg, const char* override_path) {
  const std::string path = override_path ? override_path : cfg.io.frames;
  if (!path.empty()) return cplan::LoadFrames(path);
  return cplan::RecordNominalFrames(cfg, cplan_thread_limit());
}

std::pair<cplan::PathAnchorSet, cplan::DisplacementAnchors> AnchorsFromConfig(
    const cplan::Config& cfg, const cplan::FrameLog& log) {
  if (!cfg.io.anchors.empty()) return cplan::ParseAnchors(Read(cfg.io.anchors));
  auto build = cplan::BuildAnchors(log, cfg);
  return {std::move(build.paths), std::move(build.disps)};
}

void Fill(cplan_suite_summary* out, const cplan::SuiteMetrics& s) {
  out->episodes = s.episodes;
  out->success_rate = s.success_rate;
  out->collision_rate = s.collision_rate;
  out->mean_completion = s.mean_completion;
  out->mean_speed = s.mean_speed;
  out->mean_comfort = s.mean_comfort;
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

bool Blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string FileSafe(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ' ' || c == '+') c = '_';
  }
  return out;
}

// ---- Output validation ----------------------------------------------------

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Csv ReadCsv(const fs::path& path, const std::vector<std::string>& expected_header) {
  Csv csv;
  const auto lines = SplitLines(Read(path));
  if (lines.empty() || lines[0].empty()) Fail(ErrorCode::kParse, path.string() + ": empty CSV");
  csv.header = SplitCsvLine(lines[0]);
  if (csv.header != expected_header) {
    Fail(ErrorCode::kParse, path.string() + ": unexpected header '" + lines[0] + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    auto cells = SplitCsvLine(lines[i]);
    if (cells.size() != csv.header.size()) {
      Fail(ErrorCode::kParse, path.string() + ": line " + std::to_string(i + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(csv.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) {
        Fail(ErrorCode::kParse, path.string() + ": empty cell on line " + std::to_string(i + 1));
      }
    }
    csv.rows.push_back(std::move(cells));
  }
  return csv;
}

double CsvNumber(const std::string& cell, const fs::path& path) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size()) Fail(ErrorCode::kParse, path.string() + ": '" + cell + "' is not a number");
  return v;
}

void CheckNumericColumns(const Csv& csv, std::size_t first, const fs::path& path) {
  for (const auto& row : csv.rows) {
    for (std::size_t c = first; c < row.size(); ++c) CsvNumber(row[c], path);
  }
}

void CheckNdjson(const fs::path& path, const std::vector<std::string>& keys) {
  const auto lines = SplitLines(Read(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Blank(lines[i])) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      Fail(ErrorCode::kParse, path.string() + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
    for (const auto& k : keys) {
      if (!j.contains(k)) {
        Fail(ErrorCode::kParse,
             path.string() + ": line " + std::to_string(i + 1) + " lacks '" + k + "'");
      }
    }
  }
}

const std::vector<std::string> kMetricsHeader = {"scenario", "seed",      "success", "collided",
                                                 "completion", "avg_speed", "comfort"};
const std::vector<std::string> kPlotHeader = {"time", "speed", "min_agent_distance"};

void CheckPlots(const fs::path& dir) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "missing directory " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    CheckNumericColumns(ReadCsv(entry.path(), kPlotHeader), 0, entry.path());
  }
}

void CheckAnchorsFile(const fs::path& path) { cplan::ParseAnchors(Read(path)); }

void CheckAugment(const cplan::Config& cfg, const fs::path& dir) {
  const auto log = cplan::LoadFrames((dir / "frames.ndjson").string());
  const auto path = dir / "augment_reports.ndjson";
  const auto lines = SplitLines(Read(path));
  std::size_t n = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Blank(lines[i])) continue;
    const cplan::FieldContext ctx(path.string() + ": line " + std::to_string(i + 1));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      Fail(ErrorCode::kParse, ctx.path() + ": " + e.what());
    }
    const auto frame_index = static_cast<std::size_t>(cplan::GetNumber(j, "frame", ctx));
    if (frame_index != n || frame_index >= log.frames.size()) {
      Fail(ErrorCode::kParse, ctx.path() + ": report does not match frame order");
    }
    ++n;
    if (!j.at("inserted").get<bool>()) continue;
    const double beta = cplan::GetNumber(j, "beta", ctx);
    if (!(beta >= 0.0 && beta <= 1.0)) Fail(ErrorCode::kParse, ctx.path() + ": beta out of [0, 1]");
    if (!j.contains("labels") || j["inserted_agent_id"].is_null()) {
      Fail(ErrorCode::kParse, ctx.path() + ": inserted report lacks labels or agent id");
    }
    const int agent_id = j["inserted_agent_id"].get<int>();
    const auto& frame = log.frames[frame_index];
    const cplan::AgentTrack* agent = nullptr;
    for (const auto& a : frame.agents) {
      if (a.id == agent_id) agent = &a;
    }
    if (!agent) Fail(ErrorCode::kParse, ctx.path() + ": inserted agent missing from its frame");
    cplan::PlanLabels labels;
    labels.drive_path = cplan::PolylineFromJson(j["labels"]["drive_path"], ctx.Child("labels"));
    labels.displacements.values = j["labels"]["displacements"].get<std::vector<double>>();
    labels.displacements.dt = log.dt;
    const double d = cplan::MinRolloutDistance(labels, *agent, cfg.augment.ego_dims);
    if (d < cfg.augment.d_safe - 1e-9) {
      Fail(ErrorCode::kParse, ctx.path() + ": relabelled rollout comes within " +
                                  std::to_string(d) + " m of the inserted agent");
    }
  }
  if (n != log.frames.size()) {
    Fail(ErrorCode::kParse, path.string() + ": " + std::to_string(n) + " reports for " +
                                std::to_string(log.frames.size()) + " frames");
  }
}

void CheckTrain(const fs::path& dir) {
  cplan::ParseParams(Read(dir / "params.json"));
  CheckAnchorsFile(dir / "anchors.json");
  const auto csv = ReadCsv(dir / "loss.csv", {"epoch", "loss"});
  if (csv.rows.empty()) Fail(ErrorCode::kParse, "loss.csv has no rows");
  CheckNumericColumns(csv, 0, dir / "loss.csv");
}

void CheckSimulate(const fs::path& dir) {
  const auto csv = ReadCsv(dir / "metrics.csv", kMetricsHeader);
  CheckNumericColumns(csv, 1, dir / "metrics.csv");
  const fs::path episodes = dir / "episodes";
  if (!fs::is_directory(episodes)) Fail(ErrorCode::kIo, "missing directory " + episodes.string());
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(episodes)) {
    CheckNdjson(entry.path(), {"t", "ego", "agents", "plan", "cmd"});
    ++files;
  }
  if (files != csv.rows.size()) {
    Fail(ErrorCode::kParse, "episode log count does not match metrics rows");
  }
  CheckPlots(dir / "plots");
}

void CheckBench(const fs::path& dir) {
  const std::vector<std::string> variants = {"parallel-baseline", "cascaded", "cascaded+augment"};
  const auto cmp = ReadCsv(dir / "comparison.csv",
                           {"variant", "alpha", "path_aware", "episodes", "success_rate",
                            "collision_rate", "mean_completion", "mean_speed", "mean_comfort"});
  if (cmp.rows.size() != variants.size()) Fail(ErrorCode::kParse, "comparison.csv needs 3 rows");
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (cmp.rows[i][0] != variants[i]) Fail(ErrorCode::kParse, "comparison.csv variant order");
  }
  CheckNumericColumns(cmp, 1, dir / "comparison.csv");

  const auto metrics =
      ReadCsv(dir / "metrics.csv", {"variant", "scenario", "seed", "success", "collided",
                                    "completion", "avg_speed", "comfort"});
  CheckNumericColumns(metrics, 2, dir / "metrics.csv");
  std::map<std::string, std::vector<std::string>> per_seed;
  for (const auto& row : metrics.rows) per_seed[row[2]].push_back(row[0]);
  for (const auto& [seed, names] : per_seed) {
    if (names != variants) {
      Fail(ErrorCode::kParse, "metrics.csv: seed " + seed + " lacks exactly one row per variant");
    }
  }
  const auto sweep = ReadCsv(dir / "alpha_sweep.csv", {"alpha", "episodes", "success_rate",
                                                      "collision_rate", "mean_completion"});
  CheckNumericColumns(sweep, 0, dir / "alpha_sweep.csv");
  CheckAnchorsFile(dir / "anchors.json");
  for (const auto& v : variants) {
    cplan::ParseParams(Read(dir / "params" / (FileSafe(v) + ".json")));
    CheckPlots(dir / "plots" / FileSafe(v));
  }
}

}  // namespace

extern "C" {

const char* cplan_status_name(cplan_status status) {
  if (status == CPLAN_OK) return "ok";
  if (status == CPLAN_E_INTERNAL) return "internal";
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= static_cast<int>(ErrorCode::kConfig)) {
    return cplan::ErrorCodeName(static_cast<ErrorCode>(code));
  }
  return "unknown";
}

const char* cplan_last_error(void) { return g_last_error.c_str(); }

const char* cplan_version(void) { return "1.0.0"; }

void cplan_string_free(char* s) { std::free(s); }

int cplan_thread_limit(void) {
  if (const char* env = std::getenv("PLAN_CLI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

cplan_status cplan_config_default(cplan_config** out) {
  return Guard([&] {
    Require(out, "out");
    auto cfg = std::make_unique<cplan_config>();
    cfg->cfg.Finalize();
    *out = cfg.release();
  });
}

cplan_status cplan_config_load(const char* path, cplan_config** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto cfg = std::make_unique<cplan_config>();
    cfg->cfg = cplan::LoadConfig(path);
    *out = cfg.release();
  });
}

cplan_status cplan_config_parse(const char* json_text, const char* base_dir, cplan_config** out) {
  return Guard([&] {
    Require(json_text, "json_text");
    Require(out, "out");
    auto cfg = std::make_unique<cplan_config>();
    cfg->cfg = cplan::ParseConfig(json_text, base_dir ? base_dir : "");
    *out = cfg.release();
  });
}

void cplan_config_free(cplan_config* cfg) { delete cfg; }

cplan_status cplan_config_set_seed(cplan_config* cfg, uint64_t seed) {
  return Guard([&] {
    Require(cfg, "cfg");
    cfg->cfg.seed = seed;
  });
}

cplan_status cplan_config_seed(const cplan_config* cfg, uint64_t* out) {
  return Guard([&] {
    Require(cfg, "cfg");
    Require(out, "out");
    *out = cfg->cfg.seed;
  });
}

cplan_status cplan_config_to_json(const cplan_config* cfg, char** out) {
  return Guard([&] {
    Require(cfg, "cfg");
    Require(out, "out");
    *out = CopyString(cplan::SerializeConfig(cfg->cfg));
  });
}

cplan_status cplan_frames_load(const char* path, cplan_frames** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "out");
    auto frames = std::make_unique<cplan_frames>();
    frames->log = cplan::LoadFrames(path);
    *out = frames.release();
  });
}

void cplan_frames_free(cplan_frames* frames) { delete frames; }

cplan_status cplan_frames_count(const cplan_frames* frames, size_t* out) {
  return Guard([&] {
    Require(frames, "frames");
    Require(out, "out");
    *out = frames->log.frames.size();
  });
}

cplan_status cplan_frames_save(const cplan_frames* frames, const char* path) {
  return Guard([&] {
    Require(frames, "frames");
    Require(path, "path");
    cplan::SaveFrames(frames->log, path);
  });
}

cplan_status cplan_cmd_anchors(const cplan_config* cfg, const char* frames_path, int k,
                               const char* out_dir, cplan_anchors_summary* summary) {
  return Guard([&] {
    Require(cfg, "cfg");
    cplan::Config c = cfg->cfg;
    const std::string path = frames_path ? frames_path : c.io.frames;
    if (path.empty()) Fail(ErrorCode::kConfig, "no frame log given (io.frames)");
    if (k > 0) {
      c.anchors.path_count = k;
      c.Finalize();
    }
    const auto log = cplan::LoadFrames(path);
    if (log.frames.empty()) Fail(ErrorCode::kInvalidArgument, "frame log '" + path + "' is empty");
    const auto dir = MakeOutDir(out_dir);
    const auto build = cplan::BuildAnchors(log, c);
    Write(dir / "anchors.json", cplan::SerializeAnchors(build.paths, build.disps));
    if (summary) {
      summary->frames = log.frames.size();
      summary->labeled = build.labeled;
      summary->skipped = build.skipped;
      summary->clusters = static_cast<int>(build.paths.anchors.size());
      summary->inertia = build.inertia_history.empty() ? 0.0 : build.inertia_history.back();
    }
  });
}

cplan_status cplan_cmd_augment(const cplan_config* cfg, const char* frames_path,
                               const char* out_dir, cplan_augment_summary* summary) {
  return Guard([&] {
    Require(cfg, "cfg");
    const auto& c = cfg->cfg;
    const std::string path = frames_path ? frames_path : c.io.frames;
    if (path.empty()) Fail(ErrorCode::kConfig, "no frame log given (io.frames)");
    const std::string text = Read(path);
    const auto log = cplan::ParseFrames(text);
    if (log.frames.empty()) Fail(ErrorCode::kInvalidArgument, "frame log '" + path + "' is empty");
    const auto dir = MakeOutDir(out_dir);
    const auto batch = cplan::AugmentFrames(log, c.augment, c.label_options(), c.seed);

    // Frames that received no agent are copied verbatim so that a run with
    // nothing inserted reproduces its input byte for byte.
    auto lines = SplitLines(text);
    bool header_seen = false;
    std::size_t frame = 0;
    for (auto& line : lines) {
      if (Blank(line)) continue;
      if (!header_seen) {
        header_seen = true;
        continue;
      }
      const auto& item = batch.items.at(frame++);
      if (item.report.inserted) line = cplan::SerializeFrame(item.frame);
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += '\n';
      out += lines[i];
    }
    Write(dir / "frames.ndjson", out);
    Write(dir / "augment_reports.ndjson", cplan::SerializeAugmentReports(batch));
    if (summary) {
      summary->frames = log.frames.size();
      summary->eligible = batch.eligible;
      summary->inserted = batch.inserted;
      summary->threatening = batch.threatening;
      summary->inserted_fraction =
          batch.eligible ? static_cast<double>(batch.inserted) / batch.eligible : 0.0;
      summary->mean_threat_beta = batch.mean_threat_beta;
    }
  });
}

cplan_status cplan_cmd_train(const cplan_config* cfg, const char* out_dir,
                             cplan_train_summary* summary) {
  return Guard([&] {
    Require(cfg, "cfg");
    const auto& c = cfg->cfg;
    const auto dir = MakeOutDir(out_dir);
    const auto log = FramesFromConfig(c, nullptr);
    if (log.frames.empty()) Fail(ErrorCode::kInvalidArgument, "no training frames");
    const auto [paths, disps] = AnchorsFromConfig(c, log);
    const auto model =
        cplan::TrainModel(log, paths, disps, c, c.learn.augment_alpha, c.learn.path_aware);
    Write(dir / "params.json", cplan::SerializeParams(model.params));
    Write(dir / "anchors.json", cplan::SerializeAnchors(paths, disps));
    std::string loss = "epoch,loss\n";
    for (std::size_t e = 0; e < model.loss_history.size(); ++e) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", e + 1, model.loss_history[e]);
      loss += buf;
    }
    Write(dir / "loss.csv", loss);
    if (summary) {
      summary->frames = log.frames.size();
      summary->samples = model.samples;
      summary->augmented = model.augmented;
      summary->epochs = static_cast<int>(model.loss_history.size());
      summary->initial_loss = model.loss_history.empty() ? 0.0 : model.loss_history.front();
      summary->final_loss = model.loss_history.empty() ? 0.0 : model.loss_history.back();
    }
  });
}

cplan_status cplan_cmd_simulate(const cplan_config* cfg, const char* out_dir,
                                cplan_suite_summary* summary) {
  return Guard([&] {
    Require(cfg, "cfg");
    const auto& c = cfg->cfg;
    const auto dir = MakeOutDir(out_dir);
    const auto scenarios = c.io.scenarios.empty() ? cplan::MakeBenchSuite(c)
                                                  : cplan::ParseScenarios(Read(c.io.scenarios));
    if (scenarios.empty()) Fail(ErrorCode::kInvalidArgument, "no scenarios to simulate");
    std::pair<cplan::PathAnchorSet, cplan::DisplacementAnchors> anchors;
    if (!c.io.anchors.empty()) {
      anchors = cplan::ParseAnchors(Read(c.io.anchors));
    } else {
      anchors = AnchorsFromConfig(c, FramesFromConfig(c, nullptr));
    }
    std::optional<cplan::RegressorParams> params;
    if (!c.io.params.empty()) params = cplan::ParseParams(Read(c.io.params));
    const auto stack = cplan::MakeStack(c, std::move(anchors.first), std::move(anchors.second),
                                        std::move(params), c.learn.path_aware);
    const auto result = cplan::RunSuite(scenarios, stack, c.sim, cplan_thread_limit());

    Write(dir / "metrics.csv", cplan::MetricsCsv(scenarios, result));
    MakeDir(dir / "episodes");
    MakeDir(dir / "plots");
    std::set<std::string> used;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      std::string name = FileSafe(scenarios[i].name);
      if (!used.insert(name).second) name += "_" + std::to_string(i);
      used.insert(name);
      Write(dir / "episodes" / (name + ".ndjson"), cplan::SerializeEpisodeLog(result.logs[i]));
      Write(dir / "plots" / (name + ".csv"), cplan::PlotCsv(result.logs[i]));
    }
    if (summary) Fill(summary, result.summary);
  });
}

cplan_status cplan_cmd_bench(const cplan_config* cfg, const char* out_dir,
                             cplan_bench_summary* summary) {
  return Guard([&] {
    Require(cfg, "cfg");
    const auto& c = cfg->cfg;
    const auto dir = MakeOutDir(out_dir);
    std::optional<cplan::FrameLog> log;
    if (!c.io.frames.empty()) log = cplan::LoadFrames(c.io.frames);
    const auto result = cplan::RunBench(c, log ? &*log : nullptr, cplan_thread_limit());

    Write(dir / "comparison.csv", cplan::BenchComparisonCsv(result));
    Write(dir / "metrics.csv", cplan::BenchMetricsCsv(result));
    Write(dir / "alpha_sweep.csv", cplan::AlphaSweepCsv(result));
    Write(dir / "anchors.json", cplan::SerializeAnchors(result.anchors.paths, result.anchors.disps));
    MakeDir(dir / "params");

    // Plot data for the configured scenarios, or the first of each family.
    std::vector<std::size_t> plot_idx;
    std::set<std::string> families;
    for (std::size_t i = 0; i < result.scenarios.size(); ++i) {
      const auto& s = result.scenarios[i];
      const auto& wanted = c.bench.plot_scenarios;
      const bool pick = wanted.empty()
                            ? families.insert(s.family).second
                            : std::find(wanted.begin(), wanted.end(), s.name) != wanted.end();
      if (pick) plot_idx.push_back(i);
    }
    for (const auto& v : result.variants) {
      const std::string name = FileSafe(v.name);
      Write(dir / "params" / (name + ".json"), cplan::SerializeParams(v.model.params));
      MakeDir(dir / "plots" / name);
      for (std::size_t i : plot_idx) {
        Write(dir / "plots" / name / (FileSafe(result.scenarios[i].name) + ".csv"),
              cplan::PlotCsv(v.suite.logs[i]));
      }
    }
    if (summary) {
      summary->train_frames = result.train_frames;
      summary->episodes = result.scenarios.size();
      for (std::size_t i = 0; i < 3; ++i) Fill(&summary->variants[i], result.variants[i].suite.summary);
    }
  });
}

cplan_status cplan_cmd_record(const cplan_config* cfg, const char* out_dir,
                              size_t* frames_written) {
  return Guard([&] {
    Require(cfg, "cfg");
    const auto dir = MakeOutDir(out_dir);
    const auto log = cplan::RecordNominalFrames(cfg->cfg, cplan_thread_limit());
    cplan::SaveFrames(log, (dir / "frames.ndjson").string());
    if (frames_written) *frames_written = log.frames.size();
  });
}

cplan_status cplan_check_outputs(const cplan_config* cfg, const char* command,
                                 const char* out_dir) {
  return Guard([&] {
    Require(command, "command");
    Require(out_dir, "out_dir");
    const fs::path dir(out_dir);
    const std::string cmd(command);
    cplan::Config defaults;
    defaults.Finalize();
    const cplan::Config& c = cfg ? cfg->cfg : defaults;
    if (cmd == "anchors") {
      CheckAnchorsFile(dir / "anchors.json");
    } else if (cmd == "augment") {
      CheckAugment(c, dir);
    } else if (cmd == "train") {
      CheckTrain(dir);
    } else if (cmd == "simulate") {
      CheckSimulate(dir);
    } else if (cmd == "bench") {
      CheckBench(dir);
    } else if (cmd == "record") {
      cplan::LoadFrames((dir / "frames.ndjson").string());
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown command '" + cmd + "'");
    }
  });
}

}  // extern "C"
