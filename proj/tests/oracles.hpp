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


// Independent reference implementations used by the unit tests and the
// acceptance binary. They deliberately avoid the library's geometry code
// paths (no separating-axis test, no cached arc tables).

#ifndef CPLAN_TESTS_ORACLES_HPP_
#define CPLAN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cplan/geometry.hpp"
#include "cplan/planner.hpp"
#include "cplan/scene.hpp"

namespace oracle {

using cplan::AgentTrack;
using cplan::DisplacementSequence;
using cplan::OrientedBox;
using cplan::Polyline;
using cplan::Pose2;
using cplan::Vec2;

// Rectangle vertices from first principles (counter-clockwise).
inline std::vector<Vec2> Vertices(const OrientedBox& b) {
  const double c = std::cos(b.center.heading);
  const double s = std::sin(b.center.heading);
  const double hl = b.length / 2.0;
  const double hw = b.width / 2.0;
  std::vector<Vec2> out;
  for (const auto& [lx, ly] : {std::pair{hl, hw}, std::pair{-hl, hw}, std::pair{-hl, -hw},
                               std::pair{hl, -hw}}) {
    out.push_back({b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly});
  }
  return out;
}

// Containment via the box's local frame, closed boundary.
inline bool Contains(const OrientedBox& b, const Vec2& p, double eps = 0.0) {
  const double dx = p.x - b.center.x;
  const double dy = p.y - b.center.y;
  const double c = std::cos(b.center.heading);
  const double s = std::sin(b.center.heading);
  const double lx = c * dx + s * dy;
  const double ly = -s * dx + c * dy;
  return std::abs(lx) <= b.length / 2.0 + eps && std::abs(ly) <= b.width / 2.0 + eps;
}

// Interior grid of n x n points (boundary included).
inline std::vector<Vec2> GridPoints(const OrientedBox& b, int n) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  const double c = std::cos(b.center.heading);
  const double s = std::sin(b.center.heading);
  for (int i = 0; i < n; ++i) {
    const double lx = -b.length / 2.0 + b.length * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double ly = -b.width / 2.0 + b.width * j / (n - 1);
      out.push_back({b.center.x + c * lx - s * ly, b.center.y + s * lx + c * ly});
    }
  }
  return out;
}

// Grid-sampling overlap oracle: any sample of one box inside the other.
inline bool GridOverlap(const OrientedBox& a, const OrientedBox& b, int n = 50) {
  for (const auto& p : GridPoints(a, n)) {
    if (Contains(b, p)) return true;
  }
  for (const auto& p : GridPoints(b, n)) {
    if (Contains(a, p)) return true;
  }
  return false;
}

inline OrientedBox Grown(OrientedBox b, double d) {
  b.length += 2.0 * d;
  b.width += 2.0 * d;
  return b;
}

inline double SegmentPointDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Densely samples each boundary and measures to the other box's edges.
inline double SampledBoundaryDistance(const OrientedBox& a, const OrientedBox& b,
                                      double spacing = 0.004) {
  if (GridOverlap(a, b, 60)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto sweep = [&](const OrientedBox& from, const OrientedBox& to) {
    const auto vf = Vertices(from);
    const auto vt = Vertices(to);
    for (int e = 0; e < 4; ++e) {
      const Vec2 p0 = vf[e];
      const Vec2 p1 = vf[(e + 1) % 4];
      const int n = std::max(2, static_cast<int>(std::ceil(cplan::Distance(p0, p1) / spacing)));
      for (int i = 0; i <= n; ++i) {
        const Vec2 p = p0 + (p1 - p0) * (static_cast<double>(i) / n);
        for (int f = 0; f < 4; ++f) {
          best = std::min(best, SegmentPointDistance(p, vt[f], vt[(f + 1) % 4]));
        }
      }
    }
  };
  sweep(a, b);
  sweep(b, a);
  return best;
}

inline bool SegmentsIntersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  };
  // c lies within the bounding box of segment ab (used for collinear cases).
  auto within = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && within(q1, q2, p1)) || (d2 == 0 && within(q1, q2, p2)) ||
         (d3 == 0 && within(p1, p2, q1)) || (d4 == 0 && within(p1, p2, q2));
}

// Exact polygon distance: 0 when edges cross or one contains the other,
// else the smallest vertex-to-edge distance.
inline double ExactBoxDistance(const OrientedBox& a, const OrientedBox& b) {
  const auto va = Vertices(a);
  const auto vb = Vertices(b);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (SegmentsIntersect(va[i], va[(i + 1) % 4], vb[j], vb[(j + 1) % 4])) return 0.0;
    }
  }
  if (Contains(b, va[0], 1e-12) || Contains(a, vb[0], 1e-12)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, SegmentPointDistance(va[i], vb[j], vb[(j + 1) % 4]));
      best = std::min(best, SegmentPointDistance(vb[i], va[j], va[(j + 1) % 4]));
    }
  }
  return best;
}

// Arc length of the closest point on a polyline, by brute force over the
// raw vertex list (no cached arc table).
inline double ProjectArc(const std::vector<Vec2>& pts, const Vec2& p) {
  double best_d = std::numeric_limits<double>::infinity();
  double best_arc = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    double t = 0.0;
    if (len > 0.0) {
      t = std::clamp(((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len), 0.0,
                     1.0);
    }
    const double d = std::hypot(p.x - (a.x + t * (b.x - a.x)), p.y - (a.y + t * (b.y - a.y)));
    if (d < best_d) {
      best_d = d;
      best_arc = acc + t * len;
    }
    acc += len;
  }
  return best_arc;
}

// Point at arc s by walking segments (extrapolates past the end).
inline Vec2 WalkArc(const std::vector<Vec2>& pts, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = cplan::Distance(pts[i], pts[i + 1]);
    if (len > 0.0 && (s <= acc + len || i + 2 == pts.size())) {
      const double t = (s - acc) / len;
      return pts[i] + (pts[i + 1] - pts[i]) * t;
    }
    acc += len;
  }
  return pts.back();
}

inline double PolylineLength(const std::vector<Vec2>& pts) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += cplan::Distance(pts[i], pts[i + 1]);
  return acc;
}

// Pose at arc s by walking segments; heading of the containing segment.
inline Pose2 WalkPose(const std::vector<Vec2>& pts, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double len = cplan::Distance(pts[i], pts[i + 1]);
    if (len > 0.0 && (s <= acc + len || i + 2 == pts.size())) {
      const double t = (s - acc) / len;
      const Vec2 p = pts[i] + (pts[i + 1] - pts[i]) * t;
      return {p.x, p.y, std::atan2(pts[i + 1].y - pts[i].y, pts[i + 1].x - pts[i].x)};
    }
    acc += len;
  }
  return {pts.back().x, pts.back().y, 0.0};
}

// Per-step ego/agent distances of a labelled rollout, steps 0..T, using the
// running sum of values[1..t] and the polygon distance oracle.
inline std::vector<double> RolloutDistances(const cplan::PlanLabels& labels,
                                            const cplan::AgentTrack& agent, double length,
                                            double width) {
  std::vector<double> out;
  double arc = 0.0;
  const auto& v = labels.displacements.values;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (t > 0) arc += v[t];
    const OrientedBox ego{WalkPose(labels.drive_path.points(), arc), length, width};
    const OrientedBox other =
        t == 0 ? agent.box : OrientedBox{agent.future[t - 1], agent.box.length, agent.box.width};
    out.push_back(ExactBoxDistance(ego, other));
  }
  return out;
}

// ---- Planner ------------------------------------------------------------------

// Steps 1..T where the ego box walked along `path` touches any agent box.
inline int OverlapSteps(const Polyline& path, const DisplacementSequence& d,
                        const std::vector<AgentTrack>& agents, double length, double width) {
  int n = 0;
  double arc = 0.0;
  for (std::size_t t = 1; t < d.values.size(); ++t) {
    arc += d.values[t];
    const OrientedBox ego{WalkPose(path.points(), arc), length, width};
    for (const auto& a : agents) {
      if (ExactBoxDistance(ego, a.BoxAt(t)) == 0.0) {
        ++n;
        break;
      }
    }
  }
  return n;
}

// -progress + collision + smoothness, summed directly.
inline double RefinementCost(const DisplacementSequence& d, int overlaps,
                             const cplan::CostConfig& cfg) {
  double sum = 0.0;
  double smooth = 0.0;
  for (std::size_t t = 1; t < d.values.size(); ++t) {
    sum += d.values[t];
    smooth += (d.values[t] - d.values[t - 1]) * (d.values[t] - d.values[t - 1]);
  }
  return -cfg.w_progress * sum + cfg.w_collision * overlaps + cfg.w_smooth * smooth;
}

// Exhaustive scan of scale = i * step, i = 0..n; returns the first minimiser.
inline int GridArgmin(const Polyline& path, const DisplacementSequence& base,
                      const std::vector<AgentTrack>& agents, const cplan::CostConfig& cfg,
                      int n, double step, double* best_cost = nullptr) {
  int best = 0;
  double best_c = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    DisplacementSequence d = base;
    for (double& v : d.values) v *= i * step;
    const double c = oracle::RefinementCost(
        d, OverlapSteps(path, d, agents, cfg.ego_dims.length, cfg.ego_dims.width), cfg);
    if (c < best_c) {
      best_c = c;
      best = i;
    }
  }
  if (best_cost) *best_cost = best_c;
  return best;
}

// ---- Random generators ------------------------------------------------------

// x-monotone path (never self-intersecting) with random heading changes.
inline std::vector<Vec2> RandomMonotonePath(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> step(0.3, 4.0);
  std::uniform_real_distribution<double> turn(-1.2, 1.2);
  std::vector<Vec2> pts{{0.0, 0.0}};
  for (int i = 1; i < n; ++i) {
    const double h = turn(rng);
    const double d = step(rng);
    pts.push_back({pts.back().x + d * std::cos(h), pts.back().y + d * std::sin(h)});
  }
  return pts;
}

inline OrientedBox RandomBox(std::mt19937_64& rng, double span) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> size(0.5, 5.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return {{pos(rng), pos(rng), ang(rng)}, size(rng), size(rng)};
}

}  // namespace oracle

#endif  // CPLAN_TESTS_ORACLES_HPP_
