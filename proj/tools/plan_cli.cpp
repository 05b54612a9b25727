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


// plan-cli: command-line front end over the cplan C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cplan/cplan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool check = false;
  std::string frames;  // anchors / augment
  int k = 0;           // anchors
};

// Usage and input problems exit 2, everything else 1.
int ExitFor(cplan_status status) {
  switch (status) {
    case CPLAN_OK:
      return kExitOk;
    case CPLAN_E_INVALID_ARGUMENT:
    case CPLAN_E_PARSE:
    case CPLAN_E_VERSION:
    case CPLAN_E_IO:
    case CPLAN_E_CONFIG:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

int Report(cplan_status status, const char* what) {
  if (status != CPLAN_OK) {
    std::fprintf(stderr, "plan-cli: %s failed (%s): %s\n", what, cplan_status_name(status),
                 cplan_last_error());
  }
  return ExitFor(status);
}

class ConfigHandle {
 public:
  ~ConfigHandle() { cplan_config_free(cfg_); }
  cplan_status Open(const Options& opts) {
    cplan_status s = opts.config.empty() ? cplan_config_default(&cfg_)
                                         : cplan_config_load(opts.config.c_str(), &cfg_);
    if (s == CPLAN_OK && opts.seed) s = cplan_config_set_seed(cfg_, *opts.seed);
    return s;
  }
  const cplan_config* get() const { return cfg_; }

 private:
  cplan_config* cfg_ = nullptr;
};

const char* FramesArg(const Options& opts) {
  return opts.frames.empty() ? nullptr : opts.frames.c_str();
}

void PrintSuite(const char* name, const cplan_suite_summary& s) {
  std::printf("%s: episodes=%zu success_rate=%.4f collision_rate=%.4f completion=%.4f "
              "speed=%.3f comfort=%.3f\n",
              name, s.episodes, s.success_rate, s.collision_rate, s.mean_completion,
              s.mean_speed, s.mean_comfort);
}

int Run(const std::string& command, const Options& opts) {
  ConfigHandle cfg;
  if (int rc = Report(cfg.Open(opts), "loading config"); rc != kExitOk) return rc;
  const char* out = opts.out.c_str();
  cplan_status s = CPLAN_OK;

  if (command == "anchors") {
    cplan_anchors_summary sum{};
    s = cplan_cmd_anchors(cfg.get(), FramesArg(opts), opts.k, out, &sum);
    if (s == CPLAN_OK) {
      std::printf("anchors: frames=%zu labeled=%zu skipped=%zu clusters=%d inertia=%.6f\n",
                  sum.frames, sum.labeled, sum.skipped, sum.clusters, sum.inertia);
    }
  } else if (command == "augment") {
    cplan_augment_summary sum{};
    s = cplan_cmd_augment(cfg.get(), FramesArg(opts), out, &sum);
    if (s == CPLAN_OK) {
      std::printf("augment: frames=%zu eligible=%zu inserted=%zu fraction_inserted=%.4f "
                  "threatening=%zu mean_threat_beta=%.4f\n",
                  sum.frames, sum.eligible, sum.inserted, sum.inserted_fraction,
                  sum.threatening, sum.mean_threat_beta);
    }
  } else if (command == "train") {
    cplan_train_summary sum{};
    s = cplan_cmd_train(cfg.get(), out, &sum);
    if (s == CPLAN_OK) {
      std::printf("train: frames=%zu samples=%zu augmented=%zu epochs=%d loss %.6f -> %.6f\n",
                  sum.frames, sum.samples, sum.augmented, sum.epochs, sum.initial_loss,
                  sum.final_loss);
    }
  } else if (command == "simulate") {
    cplan_suite_summary sum{};
    s = cplan_cmd_simulate(cfg.get(), out, &sum);
    if (s == CPLAN_OK) PrintSuite("simulate", sum);
  } else if (command == "bench") {
    cplan_bench_summary sum{};
    s = cplan_cmd_bench(cfg.get(), out, &sum);
    if (s == CPLAN_OK) {
      std::printf("bench: train_frames=%zu episodes=%zu\n", sum.train_frames, sum.episodes);
      const char* names[] = {"parallel-baseline", "cascaded", "cascaded+augment"};
      for (int i = 0; i < 3; ++i) PrintSuite(names[i], sum.variants[i]);
    }
  } else if (command == "record") {
    std::size_t n = 0;
    s = cplan_cmd_record(cfg.get(), out, &n);
    if (s == CPLAN_OK) std::printf("record: frames=%zu\n", n);
  }
  if (int rc = Report(s, command.c_str()); rc != kExitOk) return rc;

  if (opts.check) {
    if (int rc = Report(cplan_check_outputs(cfg.get(), command.c_str(), out), "output check");
        rc != kExitOk) {
      return kExitRuntime;
    }
    std::printf("check: %s outputs valid\n", command.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascaded drive-path / displacement planner toolkit", "plan-cli"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cplan_version());

  Options opts;
  auto common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Override the config seed");
    sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
    sub->add_flag("--check", opts.check, "Re-read and validate the written outputs");
  };

  auto* anchors = app.add_subcommand("anchors", "Cluster drive-path anchors from a frame log");
  common(anchors);
  anchors->add_option("--frames", opts.frames, "Frame log (overrides io.frames)");
  anchors->add_option("-k,--clusters", opts.k, "Number of path anchors (overrides config)")
      ->check(CLI::PositiveNumber);

  auto* augment = app.add_subcommand("augment", "Insert virtual agents and relabel frames");
  common(augment);
  augment->add_option("--frames", opts.frames, "Frame log (overrides io.frames)");

  common(app.add_subcommand("train", "Fit the displacement regressor"));
  common(app.add_subcommand("simulate", "Run a scenario suite in closed loop"));
  common(app.add_subcommand("bench", "Compare planner variants on the benchmark suite"));
  common(app.add_subcommand("record", "Record expert frames from the nominal scenes"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return Run(app.get_subcommands().front()->get_name(), opts);
}
