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


// Exercises the shared library through its C interface only.

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "cplan/cplan.h"

namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::size_t CountLines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

// Small but complete pipeline settings so every command runs in seconds.
constexpr const char* kSmall = R"({
  "seed": 5,
  "data": {"nominal_scenarios": 3},
  "learn": {"epochs": 2, "hidden": 8},
  "bench": {"episodes_per_family": 1, "alpha_sweep": [0.0, 0.1]}
})";

class CApi : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("cplan_capi_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    ASSERT_EQ(cplan_config_parse(kSmall, nullptr, &small_), CPLAN_OK) << cplan_last_error();
    size_t n = 0;
    ASSERT_EQ(cplan_cmd_record(small_, (root_ / "rec").c_str(), &n), CPLAN_OK)
        << cplan_last_error();
    ASSERT_GT(n, 0u);
    frames_ = root_ / "rec" / "frames.ndjson";
  }
  static void TearDownTestSuite() {
    cplan_config_free(small_);
    fs::remove_all(root_);
  }

  static fs::path root_;
  static fs::path frames_;
  static cplan_config* small_;
};

fs::path CApi::root_;
fs::path CApi::frames_;
cplan_config* CApi::small_ = nullptr;

TEST(CApiBasics, VersionAndStatusNames) {
  EXPECT_STREQ(cplan_version(), "1.0.0");
  EXPECT_STREQ(cplan_status_name(CPLAN_OK), "ok");
  EXPECT_STRNE(cplan_status_name(CPLAN_E_CONFIG), cplan_status_name(CPLAN_E_PARSE));
}

TEST(CApiBasics, NullArgumentsAreRejected) {
  EXPECT_EQ(cplan_config_default(nullptr), CPLAN_E_INVALID_ARGUMENT);
  EXPECT_GT(std::string(cplan_last_error()).size(), 0u);
  EXPECT_EQ(cplan_frames_count(nullptr, nullptr), CPLAN_E_INVALID_ARGUMENT);
  EXPECT_EQ(cplan_cmd_anchors(nullptr, nullptr, 0, "x", nullptr), CPLAN_E_INVALID_ARGUMENT);
  EXPECT_EQ(cplan_check_outputs(nullptr, "nonsense", "/tmp"), CPLAN_E_INVALID_ARGUMENT);
  cplan_config_free(nullptr);
  cplan_frames_free(nullptr);
  cplan_string_free(nullptr);
}

TEST(CApiBasics, ConfigRoundTrip) {
  cplan_config* cfg = nullptr;
  ASSERT_EQ(cplan_config_default(&cfg), CPLAN_OK);
  ASSERT_EQ(cplan_config_set_seed(cfg, 1234), CPLAN_OK);
  uint64_t seed = 0;
  ASSERT_EQ(cplan_config_seed(cfg, &seed), CPLAN_OK);
  EXPECT_EQ(seed, 1234u);
  char* text = nullptr;
  ASSERT_EQ(cplan_config_to_json(cfg, &text), CPLAN_OK);
  cplan_config* back = nullptr;
  ASSERT_EQ(cplan_config_parse(text, nullptr, &back), CPLAN_OK);
  char* again = nullptr;
  ASSERT_EQ(cplan_config_to_json(back, &again), CPLAN_OK);
  EXPECT_STREQ(text, again);
  cplan_string_free(text);
  cplan_string_free(again);
  cplan_config_free(cfg);
  cplan_config_free(back);
}

TEST(CApiBasics, ConfigErrors) {
  cplan_config* cfg = nullptr;
  EXPECT_EQ(cplan_config_parse(R"({"bogus": 1})", nullptr, &cfg), CPLAN_E_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(cplan_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(cplan_config_load("/nonexistent/config.json", &cfg), CPLAN_E_IO);
  cplan_frames* frames = nullptr;
  EXPECT_EQ(cplan_frames_load("/nonexistent/frames.ndjson", &frames), CPLAN_E_IO);
}

TEST(CApiBasics, ThreadLimitFromEnvironment) {
  ::setenv("PLAN_CLI_THREADS", "3", 1);
  EXPECT_EQ(cplan_thread_limit(), 3);
  ::setenv("PLAN_CLI_THREADS", "zero", 1);
  EXPECT_GE(cplan_thread_limit(), 1);
  ::unsetenv("PLAN_CLI_THREADS");
  EXPECT_GE(cplan_thread_limit(), 1);
}

TEST_F(CApi, FramesLoadSaveIsByteStable) {
  cplan_frames* frames = nullptr;
  ASSERT_EQ(cplan_frames_load(frames_.c_str(), &frames), CPLAN_OK) << cplan_last_error();
  size_t n = 0;
  ASSERT_EQ(cplan_frames_count(frames, &n), CPLAN_OK);
  EXPECT_EQ(n + 1, CountLines(ReadFile(frames_)));  // header line
  const fs::path copy = root_ / "copy.ndjson";
  ASSERT_EQ(cplan_frames_save(frames, copy.c_str()), CPLAN_OK);
  EXPECT_EQ(ReadFile(copy), ReadFile(frames_));
  cplan_frames_free(frames);
}

TEST_F(CApi, MalformedFramesReportParseError) {
  const fs::path bad = root_ / "bad.ndjson";
  WriteFile(bad, "{\"schema\": \"cplan-frames/1\", \"dt\": 0.2}\n{\"timestamp\": 0\n");
  cplan_frames* frames = nullptr;
  EXPECT_EQ(cplan_frames_load(bad.c_str(), &frames), CPLAN_E_PARSE);
  EXPECT_NE(std::string(cplan_last_error()).find("line 2"), std::string::npos)
      << cplan_last_error();
  WriteFile(bad, "{\"schema\": \"cplan-frames/9\", \"dt\": 0.2}\n");
  EXPECT_EQ(cplan_frames_load(bad.c_str(), &frames), CPLAN_E_VERSION);
}

TEST_F(CApi, AnchorsCommand) {
  const fs::path out = root_ / "anchors";
  cplan_anchors_summary s{};
  ASSERT_EQ(cplan_cmd_anchors(small_, frames_.c_str(), 4, out.c_str(), &s), CPLAN_OK)
      << cplan_last_error();
  EXPECT_EQ(s.clusters, 4);
  EXPECT_EQ(s.labeled + s.skipped, s.frames);
  EXPECT_GT(s.inertia, 0.0);
  EXPECT_EQ(cplan_check_outputs(small_, "anchors", out.c_str()), CPLAN_OK) << cplan_last_error();
  EXPECT_EQ(cplan_cmd_anchors(small_, frames_.c_str(), 100000, out.c_str(), &s), CPLAN_E_CLUSTER);
}

TEST_F(CApi, AugmentZeroAlphaIsByteIdentical) {
  cplan_config* cfg = nullptr;
  ASSERT_EQ(cplan_config_parse(R"({"augment": {"alpha": 0.0}})", nullptr, &cfg), CPLAN_OK);
  const fs::path out = root_ / "aug0";
  cplan_augment_summary s{};
  ASSERT_EQ(cplan_cmd_augment(cfg, frames_.c_str(), out.c_str(), &s), CPLAN_OK)
      << cplan_last_error();
  EXPECT_EQ(s.inserted, 0u);
  EXPECT_EQ(ReadFile(out / "frames.ndjson"), ReadFile(frames_));
  EXPECT_EQ(cplan_check_outputs(cfg, "augment", out.c_str()), CPLAN_OK) << cplan_last_error();
  cplan_config_free(cfg);
}

TEST_F(CApi, AugmentOutputsPassSafetyCheck) {
  cplan_config* cfg = nullptr;
  ASSERT_EQ(cplan_config_parse(R"({"augment": {"alpha": 1.0}})", nullptr, &cfg), CPLAN_OK);
  const fs::path out = root_ / "aug1";
  cplan_augment_summary s{};
  ASSERT_EQ(cplan_cmd_augment(cfg, frames_.c_str(), out.c_str(), &s), CPLAN_OK)
      << cplan_last_error();
  EXPECT_GT(s.inserted, 0u);
  EXPECT_LE(s.inserted, s.eligible);
  EXPECT_NEAR(s.inserted_fraction, static_cast<double>(s.inserted) / s.eligible, 1e-12);
  EXPECT_GT(s.mean_threat_beta, 0.0);
  EXPECT_LT(s.mean_threat_beta, 1.0);
  EXPECT_EQ(CountLines(ReadFile(out / "augment_reports.ndjson")), s.frames);
  EXPECT_EQ(cplan_check_outputs(cfg, "augment", out.c_str()), CPLAN_OK) << cplan_last_error();

  // Same seed, same bytes.
  const fs::path again = root_ / "aug1b";
  ASSERT_EQ(cplan_cmd_augment(cfg, frames_.c_str(), again.c_str(), &s), CPLAN_OK);
  EXPECT_EQ(ReadFile(again / "frames.ndjson"), ReadFile(out / "frames.ndjson"));
  EXPECT_EQ(ReadFile(again / "augment_reports.ndjson"), ReadFile(out / "augment_reports.ndjson"));

  // A truncated report file no longer validates.
  std::string reports = ReadFile(out / "augment_reports.ndjson");
  WriteFile(out / "augment_reports.ndjson", reports.substr(0, reports.size() / 2));
  EXPECT_NE(cplan_check_outputs(cfg, "augment", out.c_str()), CPLAN_OK);
  cplan_config_free(cfg);
}

TEST_F(CApi, TrainCommand) {
  const fs::path out = root_ / "train";
  cplan_train_summary s{};
  ASSERT_EQ(cplan_cmd_train(small_, out.c_str(), &s), CPLAN_OK) << cplan_last_error();
  EXPECT_EQ(s.epochs, 2);
  EXPECT_GT(s.samples, 0u);
  EXPECT_TRUE(std::isfinite(s.final_loss));
  EXPECT_EQ(CountLines(ReadFile(out / "loss.csv")), 3u);
  EXPECT_EQ(cplan_check_outputs(small_, "train", out.c_str()), CPLAN_OK) << cplan_last_error();
}

TEST_F(CApi, SimulateCommand) {
  const fs::path out = root_ / "sim";
  cplan_suite_summary s{};
  ASSERT_EQ(cplan_cmd_simulate(small_, out.c_str(), &s), CPLAN_OK) << cplan_last_error();
  EXPECT_EQ(s.episodes, 4u);
  EXPECT_EQ(CountLines(ReadFile(out / "metrics.csv")), 5u);
  EXPECT_EQ(cplan_check_outputs(small_, "simulate", out.c_str()), CPLAN_OK)
      << cplan_last_error();
}

TEST_F(CApi, BenchCommandIsDeterministic) {
  const fs::path a = root_ / "bench_a";
  const fs::path b = root_ / "bench_b";
  cplan_bench_summary sa{}, sb{};
  ASSERT_EQ(cplan_cmd_bench(small_, a.c_str(), &sa), CPLAN_OK) << cplan_last_error();
  ASSERT_EQ(cplan_cmd_bench(small_, b.c_str(), &sb), CPLAN_OK) << cplan_last_error();
  EXPECT_EQ(sa.episodes, 4u);
  for (const char* f : {"comparison.csv", "metrics.csv", "alpha_sweep.csv"}) {
    EXPECT_EQ(ReadFile(a / f), ReadFile(b / f)) << f;
  }
  EXPECT_EQ(CountLines(ReadFile(a / "comparison.csv")), 4u);
  EXPECT_EQ(CountLines(ReadFile(a / "metrics.csv")), 13u);
  EXPECT_EQ(CountLines(ReadFile(a / "alpha_sweep.csv")), 3u);
  EXPECT_TRUE(fs::exists(a / "params" / "cascaded_augment.json"));
  EXPECT_EQ(cplan_check_outputs(small_, "bench", a.c_str()), CPLAN_OK) << cplan_last_error();

  // Dropping a metrics row breaks the per-seed invariant.
  std::string m = ReadFile(a / "metrics.csv");
  m.erase(m.rfind('\n', m.size() - 2) + 1);
  WriteFile(a / "metrics.csv", m);
  EXPECT_NE(cplan_check_outputs(small_, "bench", a.c_str()), CPLAN_OK);
}

}  // namespace
