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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cplan/augment.hpp"
#include "cplan/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace {

using namespace cplan;
using testutil::FrameWith;
using testutil::MovingAgent;
using testutil::StaticAgent;
using testutil::StraightEgo;

PlanLabels StraightLabels(double speed) { return DeriveLabels(StraightEgo(speed)); }

double MinOracle(const PlanLabels& labels, const AgentTrack& agent, const BoxDims& dims) {
  const auto d = oracle::RolloutDistances(labels, agent, dims.length, dims.width);
  return *std::min_element(d.begin(), d.end());
}

// Safe prefix by direct scan over steps 1..T.
double SafeTotalOracle(const PlanLabels& labels, const AgentTrack& agent, const BoxDims& dims,
                       double d_safe) {
  const auto d = oracle::RolloutDistances(labels, agent, dims.length, dims.width);
  const auto cum = labels.displacements.Cumulative();
  for (std::size_t t = 1; t < d.size(); ++t) {
    if (d[t] < d_safe) return cum[t - 1];
  }
  return cum.back();
}

TEST(ShouldInsert, SlowEgoIsNeverAugmented) {
  Rng rng(1);
  AugmentConfig cfg;
  cfg.alpha = 1.0;
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(ShouldInsert(rng, 0.4, cfg));
}

TEST(ShouldInsert, ZeroAlphaNeverInserts) {
  Rng rng(2);
  AugmentConfig cfg;
  cfg.alpha = 0.0;
  for (int i = 0; i < 1000; ++i) EXPECT_FALSE(ShouldInsert(rng, 10.0, cfg));
}

TEST(ShouldInsert, RateMatchesAlpha) {
  Rng rng(3);
  AugmentConfig cfg;
  cfg.alpha = 0.1;
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += ShouldInsert(rng, 10.0, cfg) ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.1, 0.005);
}

TEST(SampleVirtualAgent, ThreateningArrivesNearEgoArrival) {
  const PlanLabels labels = StraightLabels(5.0);
  AugmentConfig cfg;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = DeriveRng(11, i);
    const AgentTrack a = SampleVirtualAgent(rng, AgentRole::kThreatening, labels, cfg);
    const Vec2 c = a.box.center.position();
    const Vec2 v = (a.future[0].position() - c) * (1.0 / labels.displacements.dt);
    ASSERT_GT(std::abs(v.y), 0.0);
    const double t_arr = -c.y / v.y;  // crossing of the straight ego path y = 0
    const double x_w = c.x + v.x * t_arr;
    const double t_w = x_w / 5.0;     // constant 1 m per 0.2 s
    EXPECT_LE(std::abs(t_arr - t_w), cfg.threat_window + 1e-9);
    const double radius = v.Norm() * t_arr;
    EXPECT_GE(radius, cfg.near_range.lo - 1e-9);
    EXPECT_LE(radius, cfg.near_range.hi + 1e-9);
    EXPECT_LT(MinOracle(labels, a, cfg.ego_dims), cfg.d_safe);
  }
}

TEST(SampleVirtualAgent, NonThreateningStaysClear) {
  const PlanLabels labels = StraightLabels(6.0);
  AugmentConfig cfg;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = DeriveRng(12, i);
    const AgentTrack a = SampleVirtualAgent(rng, AgentRole::kNonThreatening, labels, cfg);
    const auto d = oracle::RolloutDistances(labels, a, cfg.ego_dims.length, cfg.ego_dims.width);
    for (double x : d) EXPECT_GE(x, cfg.d_safe - 1e-6);
  }
}

TEST(SampleVirtualAgent, ConstantSpeedStraightLine) {
  const PlanLabels labels = StraightLabels(8.0);
  AugmentConfig cfg;
  Rng rng(5);
  for (AgentRole role : {AgentRole::kThreatening, AgentRole::kNonThreatening}) {
    const AgentTrack a = SampleVirtualAgent(rng, role, labels, cfg);
    ASSERT_EQ(a.future.size(), labels.displacements.horizon());
    const double step = Distance(a.box.center.position(), a.future[0].position());
    EXPECT_LE(step / labels.displacements.dt, cfg.max_agent_speed + 1e-9);
    for (std::size_t t = 1; t < a.future.size(); ++t) {
      EXPECT_NEAR(Distance(a.future[t - 1].position(), a.future[t].position()), step, 1e-9);
      EXPECT_DOUBLE_EQ(a.future[t].heading, a.box.center.heading);
    }
  }
}

TEST(SampleVirtualAgent, RejectsShortRollout) {
  PlanLabels labels = StraightLabels(5.0);
  std::fill(labels.displacements.values.begin(), labels.displacements.values.end(), 0.0);
  Rng rng(1);
  try {
    SampleVirtualAgent(rng, AgentRole::kThreatening, labels, AugmentConfig{});
    FAIL() << "expected kAugmentInfeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAugmentInfeasible);
  }
}

TEST(InsertAgent, ReplacesLowestConfidenceAtCapacity) {
  Frame f = FrameWith(StraightEgo(5.0),
                      {StaticAgent(1, {10, 5, 0}, 4.5, 2, 15, 0.9),
                       StaticAgent(2, {20, 5, 0}, 4.5, 2, 15, 0.3),
                       StaticAgent(3, {30, 5, 0}, 4.5, 2, 15, 0.7)});
  AgentTrack v = StaticAgent(0, {40, 5, 0});
  const auto removed = InsertAgent(f, v, 3);
  ASSERT_TRUE(removed.has_value());
  EXPECT_EQ(*removed, 2);
  ASSERT_EQ(f.agents.size(), 3u);
  std::vector<int> ids;
  for (const auto& a : f.agents) ids.push_back(a.id);
  EXPECT_EQ(std::count(ids.begin(), ids.end(), 2), 0);
  EXPECT_EQ(std::count(ids.begin(), ids.end(), v.id), 1);
  EXPECT_NE(v.id, 1);
  EXPECT_NE(v.id, 3);
}

TEST(InsertAgent, EmptyFrame) {
  Frame f = FrameWith(StraightEgo(5.0));
  AgentTrack v = StaticAgent(0, {40, 5, 0});
  EXPECT_FALSE(InsertAgent(f, v, 16).has_value());
  ASSERT_EQ(f.agents.size(), 1u);
  EXPECT_EQ(f.agents[0].id, v.id);
}

TEST(InsertAgent, ConfidenceTieRemovesSmallestId) {
  Frame f = FrameWith(StraightEgo(5.0), {StaticAgent(7, {10, 5, 0}, 4.5, 2, 15, 0.5),
                                          StaticAgent(4, {20, 5, 0}, 4.5, 2, 15, 0.5)});
  AgentTrack v = StaticAgent(0, {40, 5, 0});
  EXPECT_EQ(InsertAgent(f, v, 2), std::optional<int>(4));
}

TEST(SafeTotalDisplacement, NoNearbyAgentGivesFullSum) {
  const PlanLabels labels = StraightLabels(5.0);
  const AgentTrack far = StaticAgent(1, {0, 100, 0});
  EXPECT_DOUBLE_EQ(SafeTotalDisplacement(labels, far, BoxDims{}, 1.0),
                   labels.displacements.FutureSum());
}

TEST(SafeTotalDisplacement, ParkedAgentAheadMatchesScan) {
  // Ego 4 m long at 5 m/s, agent parked on the path with its rear 4 m ahead.
  const PlanLabels labels = StraightLabels(5.0);
  const BoxDims dims{4.0, 2.0};
  const AgentTrack parked = StaticAgent(1, {2.0 + 4.0 + 2.25, 0, 0});
  const double got = SafeTotalDisplacement(labels, parked, dims, 1.0);
  EXPECT_NEAR(got, SafeTotalOracle(labels, parked, dims, 1.0), 1e-12);
  EXPECT_NEAR(got, 3.0, 1e-9);  // gap 4 - 3 m of travel = 1 m is the last safe step
}

TEST(SafeTotalDisplacement, SingleConflictStep) {
  const PlanLabels labels = StraightLabels(5.0);
  const auto cum = labels.displacements.Cumulative();
  AgentTrack a = StaticAgent(1, {0, 200, 0});
  a.future[6] = {cum[7], 0.0, 0.0};  // on top of the ego at t = 7 only
  EXPECT_NEAR(SafeTotalDisplacement(labels, a, BoxDims{}, 1.0), cum[6], 1e-12);
}

TEST(SafeTotalDisplacement, UnsafeAtFirstStepGivesZero) {
  const PlanLabels labels = StraightLabels(5.0);
  AgentTrack a = StaticAgent(1, {0, 200, 0});
  a.future[0] = {1.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(SafeTotalDisplacement(labels, a, BoxDims{}, 1.0), 0.0);
}

TEST(RelabelDisplacements, HalvesPlan) {
  PlanLabels labels = StraightLabels(5.0);
  const double first = labels.displacements.values[0];
  ASSERT_NEAR(labels.displacements.FutureSum(), 15.0, 1e-9);
  const auto [out, beta] = RelabelDisplacements(labels, 0.5 * labels.displacements.FutureSum());
  EXPECT_NEAR(beta, 0.5, 1e-12);
  EXPECT_NEAR(out.displacements.FutureSum(), 7.5, 1e-9);
  EXPECT_DOUBLE_EQ(out.displacements.values[0], first);
  for (std::size_t t = 1; t < out.displacements.values.size(); ++t) {
    EXPECT_NEAR(out.displacements.values[t], 0.5, 1e-9);
  }
  EXPECT_EQ(out.drive_path, labels.drive_path);
}

TEST(RelabelDisplacements, FullSumIsIdentity) {
  const PlanLabels labels = DeriveLabels(testutil::ArcEgo(7.0, 40.0));
  const auto [out, beta] = RelabelDisplacements(labels, labels.displacements.FutureSum());
  EXPECT_DOUBLE_EQ(beta, 1.0);
  EXPECT_EQ(out.displacements.values, labels.displacements.values);
}

TEST(RelabelDisplacements, ZeroPlanIsDegenerate) {
  PlanLabels labels = StraightLabels(5.0);
  std::fill(labels.displacements.values.begin() + 1, labels.displacements.values.end(), 0.0);
  try {
    RelabelDisplacements(labels, 0.0);
    FAIL() << "expected kRelabelDegenerate";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRelabelDegenerate);
  }
}

TEST(AugmentFrame, ZeroAlphaIsIdentity) {
  std::mt19937_64 gen(4);
  AugmentConfig cfg;
  cfg.alpha = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Frame f = FrameWith(testutil::RandomEgo(gen));
    const PlanLabels labels = DeriveLabels(f.ego);
    Rng rng = DeriveRng(9, i);
    const AugmentResult r = AugmentFrame(f, labels, rng, cfg);
    EXPECT_FALSE(r.report.inserted);
    EXPECT_EQ(SerializeFrame(r.frame), SerializeFrame(f));
    EXPECT_EQ(r.labels.displacements.values, labels.displacements.values);
  }
}

TEST(AugmentFrame, DeterministicForSeed) {
  std::mt19937_64 gen(5);
  AugmentConfig cfg;
  cfg.alpha = 1.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Frame f = FrameWith(testutil::RandomEgo(gen));
    const PlanLabels labels = DeriveLabels(f.ego);
    Rng a = DeriveRng(21, i);
    Rng b = DeriveRng(21, i);
    const AugmentResult ra = AugmentFrame(f, labels, a, cfg);
    const AugmentResult rb = AugmentFrame(f, labels, b, cfg);
    EXPECT_EQ(SerializeFrame(ra.frame), SerializeFrame(rb.frame));
    EXPECT_EQ(ra.labels.displacements.values, rb.labels.displacements.values);
    EXPECT_EQ(ra.report.beta, rb.report.beta);
  }
}

// Invariants over a random batch, checked with the independent rollout oracle.
TEST(AugmentFrame, BatchInvariants) {
  std::mt19937_64 gen(6);
  AugmentConfig cfg;
  cfg.alpha = 1.0;
  int inserted = 0;
  int threatening = 0;
  for (std::uint64_t i = 0; i < 1500; ++i) {
    const Frame f = FrameWith(testutil::RandomEgo(gen),
                              {StaticAgent(3, {-30, 30, 0}), StaticAgent(8, {-40, -30, 0})});
    const PlanLabels labels = DeriveLabels(f.ego);
    Rng rng = DeriveRng(33, i);
    const AugmentResult r = AugmentFrame(f, labels, rng, cfg);
    EXPECT_EQ(r.labels.drive_path, labels.drive_path);
    if (!r.report.inserted) {
      EXPECT_EQ(SerializeFrame(r.frame), SerializeFrame(f));
      continue;
    }
    ++inserted;
    ASSERT_EQ(r.frame.agents.size(), 3u);
    const AgentTrack& v = r.frame.agents.back();
    EXPECT_EQ(v.id, *r.report.inserted_agent_id);
    EXPECT_EQ(v.id, 9);
    EXPECT_GE(MinOracle(r.labels, v, cfg.ego_dims), cfg.d_safe - 1e-6);
    const auto& a = labels.displacements.values;
    const auto& b = r.labels.displacements.values;
    EXPECT_EQ(b[0], a[0]);
    EXPECT_GE(r.report.beta, 0.0);
    EXPECT_LE(r.report.beta, 1.0);
    for (std::size_t t = 1; t < a.size(); ++t) {
      EXPECT_NEAR(b[t], r.report.beta * a[t], 1e-12 * std::max(1.0, a[t]));
    }
    if (r.report.role == AgentRole::kThreatening) {
      ++threatening;
      EXPECT_LT(r.report.beta, 1.0);
      // Fixed point: the relabelled rollout is entirely safe.
      EXPECT_NEAR(SafeTotalDisplacement(r.labels, v, cfg.ego_dims, cfg.d_safe),
                  r.labels.displacements.FutureSum(), 1e-9);
    } else {
      EXPECT_EQ(r.report.beta, 1.0);
    }
  }
  EXPECT_GT(inserted, 1000);
  EXPECT_GT(threatening, 300);
}

TEST(AugmentFrame, LargerSafetyMarginNeverIncreasesPlan) {
  const PlanLabels labels = StraightLabels(6.0);
  Rng rng(77);
  const AgentTrack a = SampleVirtualAgent(rng, AgentRole::kThreatening, labels, AugmentConfig{});
  double prev = std::numeric_limits<double>::infinity();
  for (double d_safe : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
    const double s = SafeTotalDisplacement(labels, a, BoxDims{}, d_safe);
    EXPECT_LE(s, prev + 1e-12);
    prev = s;
  }
}

}  // namespace
