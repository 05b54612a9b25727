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

#ifndef CPLAN_AUGMENT_HPP_
#define CPLAN_AUGMENT_HPP_

#include <optional>
#include <random>
#include <utility>

#include "cplan/geometry.hpp"
#include "cplan/scene.hpp"

namespace cplan {

using Rng = std::mt19937_64;

// Independent stream for item `index` of a batch seeded with `seed`.
Rng DeriveRng(std::uint64_t seed, std::uint64_t index);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BoxDims {
  double length = 4.5;
  double width = 2.0;
};

struct AugmentConfig {
  double alpha = 0.1;               // insertion probability
  double delta = 1.0;               // min 3 s ego displacement to augment, m
  double d_safe = 1.0;              // m
  Interval near_range{6.0, 14.0};   // threatening start distance from waypoint
  Interval far_range{30.0, 45.0};   // non-threatening start distance
  Interval arrival_time_range{0.4, 6.0};
  double threat_prob = 0.5;
  double threat_window = 0.4;       // +-s around the ego arrival at the waypoint
  double nonthreat_gap = 1.0;       // s after the ego clears the waypoint
  double max_agent_speed = 15.0;    // m/s
  int agent_capacity = 16;
  int max_attempts = 32;
  BoxDims ego_dims;

  void Validate() const;
};

enum class AgentRole { kNone, kThreatening, kNonThreatening };
std::string_view ToString(AgentRole role);

struct AugmentReport {
  bool inserted = false;
  AgentRole role = AgentRole::kNone;
  double beta = 1.0;
  std::optional<int> replaced_agent_id;
  std::optional<int> inserted_agent_id;
};

bool ShouldInsert(Rng& rng, double ego_displacement_3s, const AugmentConfig& cfg);

// Straight-line constant-speed agent from a sampled start to a waypoint on the
// ego drive path. Threatening agents arrive while the ego is near the
// waypoint; non-threatening ones arrive after it has cleared. Throws
// kAugmentInfeasible when no valid agent is found within max_attempts.
AgentTrack SampleVirtualAgent(Rng& rng, AgentRole role, const PlanLabels& labels,
                              const AugmentConfig& cfg);

// Appends `agent` with a fresh id. At capacity, the lowest-confidence agent
// (smallest id on ties) is removed first; its id is returned.
std::optional<int> InsertAgent(Frame& frame, AgentTrack& agent, int capacity);

// Ego box at step t when rolled along the labels' drive path.
OrientedBox EgoBoxAt(const PlanLabels& labels, const std::vector<double>& cumulative,
                     std::size_t t, const BoxDims& dims);

// Cumulative arc at the last step of the contiguous prefix of steps whose
// ego/agent box distance is >= d_safe; the full sum when every step is safe.
double SafeTotalDisplacement(const PlanLabels& labels, const AgentTrack& agent,
                             const BoxDims& ego_dims, double d_safe);

// Uniformly scales values[1..T] by beta = d_safe_total / D_orig. Throws
// kRelabelDegenerate when D_orig == 0.
std::pair<PlanLabels, double> RelabelDisplacements(const PlanLabels& labels,
                                                   double d_safe_total);

// Smallest ego/agent box distance over steps 0..T of the labelled rollout.
double MinRolloutDistance(const PlanLabels& labels, const AgentTrack& agent,
                          const BoxDims& ego_dims);

struct AugmentResult {
  Frame frame;
  PlanLabels labels;
  AugmentReport report;
};

AugmentResult AugmentFrame(const Frame& frame, const PlanLabels& labels, Rng& rng,
                           const AugmentConfig& cfg);

}  // namespace cplan

#endif  // CPLAN_AUGMENT_HPP_
