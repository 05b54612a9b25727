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

#include "cplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "cplan/errors.hpp"

namespace cplan {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kInvalidArcLength: return "InvalidArcLength";
    case ErrorCode::kInsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::kReverseMotion: return "ReverseMotion";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kVersion: return "VersionError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kAugmentInfeasible: return "AugmentInfeasible";
    case ErrorCode::kRelabelDegenerate: return "RelabelDegenerate";
    case ErrorCode::kCluster: return "ClusterError";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kShape: return "ShapeError";
    case ErrorCode::kTrainingDiverged: return "TrainingDiverged";
    case ErrorCode::kPathExhausted: return "PathExhausted";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

double NormalizeAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

Vec2 ToLocal(const Pose2& origin, const Vec2& world) {
  return Rotate(world - origin.position(), -origin.heading);
}

Vec2 ToWorld(const Pose2& origin, const Vec2& local) {
  return Rotate(local, origin.heading) + origin.position();
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "polyline needs at least 2 points, got " +
                                          std::to_string(points_.size()));
  }
  cum_arc_.resize(points_.size());
  cum_arc_[0] = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      Fail(ErrorCode::kInvalidArgument,
           "non-finite polyline vertex " + std::to_string(i));
    }
    if (i > 0) cum_arc_[i] = cum_arc_[i - 1] + Distance(points_[i - 1], points_[i]);
  }
}

Polyline ResamplePath(std::span<const Vec2> trajectory, double spacing) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    Fail(ErrorCode::kInvalidArgument, "resample spacing must be > 0");
  }
  if (trajectory.size() < 2) {
    Fail(ErrorCode::kDegenerateGeometry, "resample needs at least 2 points");
  }
  const Polyline source(std::vector<Vec2>(trajectory.begin(), trajectory.end()));
  const double total = source.length();
  if (total <= 0.0) {
    Fail(ErrorCode::kDegenerateGeometry, "all trajectory points coincide");
  }

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(total / spacing) + 2);
  const auto& pts = source.points();
  const auto& arc = source.cum_arc();
  std::size_t seg = 0;
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (s > total + 1e-12) break;
    while (seg + 1 < pts.size() - 1 && arc[seg + 1] <= s) ++seg;
    const double seg_len = arc[seg + 1] - arc[seg];
    const double u = seg_len > 0.0 ? std::clamp((s - arc[seg]) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * u);
  }
  const double last_s = static_cast<double>(out.size() - 1) * spacing;
  if (total - last_s > 1e-9) out.push_back(pts.back());
  return Polyline(std::move(out));
}

Polyline ResamplePath(std::span<const Pose2> trajectory, double spacing) {
  std::vector<Vec2> pts;
  pts.reserve(trajectory.size());
  for (const auto& p : trajectory) pts.push_back(p.position());
  return ResamplePath(pts, spacing);
}

Pose2 InterpAlong(const Polyline& path, double s) {
  if (!(s >= 0.0)) {
    Fail(ErrorCode::kInvalidArcLength, "arc length must be >= 0, got " + std::to_string(s));
  }
  const auto& pts = path.points();
  const auto& arc = path.cum_arc();
  if (pts.size() < 2) Fail(ErrorCode::kInvalidArgument, "empty path");

  // Segment i spans [arc[i], arc[i+1]]; pick the last segment whose start <= s.
  auto it = std::upper_bound(arc.begin(), arc.end(), s);
  std::size_t seg = it == arc.begin() ? 0 : static_cast<std::size_t>(it - arc.begin()) - 1;
  seg = std::min(seg, pts.size() - 2);
  // Skip zero-length segments so the heading is well defined.
  std::size_t dir_seg = seg;
  while (dir_seg + 1 < pts.size() - 1 && arc[dir_seg + 1] - arc[dir_seg] <= 0.0) ++dir_seg;
  while (dir_seg > 0 && arc[dir_seg + 1] - arc[dir_seg] <= 0.0) --dir_seg;
  const double seg_len = arc[dir_seg + 1] - arc[dir_seg];
  if (seg_len <= 0.0) return {pts[0].x, pts[0].y, 0.0};

  const Vec2 dir = (pts[dir_seg + 1] - pts[dir_seg]) * (1.0 / seg_len);
  const double heading = std::atan2(dir.y, dir.x);
  const Vec2 p = pts[dir_seg] + dir * (s - arc[dir_seg]);
  return {p.x, p.y, heading};
}

Projection ProjectOnto(const Polyline& path, const Vec2& point) {
  const auto& pts = path.points();
  const auto& arc = path.cum_arc();
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 d = pts[i + 1] - pts[i];
    const double len2 = d.Dot(d);
    const double u = len2 > 0.0 ? std::clamp((point - pts[i]).Dot(d) / len2, 0.0, 1.0) : 0.0;
    const Vec2 c = pts[i] + d * u;
    const double dist = Distance(point, c);
    if (dist < best.distance) {
      best.distance = dist;
      best.arc = arc[i] + u * (arc[i + 1] - arc[i]);
      const double cross = len2 > 0.0 ? d.Cross(point - pts[i]) : 0.0;
      best.lateral = cross >= 0.0 ? dist : -dist;
    }
  }
  return best;
}

CornerSet CornersOf(const OrientedBox& box) {
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const Vec2 c = box.center.position();
  const double h = box.center.heading;
  return {c + Rotate({hl, hw}, h), c + Rotate({hl, -hw}, h),
          c + Rotate({-hl, -hw}, h), c + Rotate({-hl, hw}, h)};
}

namespace {

void ProjectCorners(const CornerSet& corners, const Vec2& axis, double& lo, double& hi) {
  lo = hi = corners[0].Dot(axis);
  for (int i = 1; i < 4; ++i) {
    const double v = corners[i].Dot(axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

bool SeparatedAlong(const CornerSet& a, const CornerSet& b, const Vec2& axis) {
  double alo, ahi, blo, bhi;
  ProjectCorners(a, axis, alo, ahi);
  ProjectCorners(b, axis, blo, bhi);
  return ahi < blo || bhi < alo;
}

double SegmentSegmentDistance(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
  return std::min({PointSegmentDistance(a0, b0, b1), PointSegmentDistance(a1, b0, b1),
                   PointSegmentDistance(b0, a0, a1), PointSegmentDistance(b1, a0, a1)});
}

}  // namespace

bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b) {
  const CornerSet ca = CornersOf(a);
  const CornerSet cb = CornersOf(b);
  const double ha = a.center.heading;
  const double hb = b.center.heading;
  const Vec2 axes[4] = {{std::cos(ha), std::sin(ha)}, {-std::sin(ha), std::cos(ha)},
                        {std::cos(hb), std::sin(hb)}, {-std::sin(hb), std::cos(hb)}};
  for (const auto& axis : axes) {
    if (SeparatedAlong(ca, cb, axis)) return false;
  }
  return true;
}

double MinBoxDistance(const OrientedBox& a, const OrientedBox& b) {
  if (BoxesOverlap(a, b)) return 0.0;
  const CornerSet ca = CornersOf(a);
  const CornerSet cb = CornersOf(b);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, SegmentSegmentDistance(ca[i], ca[(i + 1) % 4], cb[j],
                                                   cb[(j + 1) % 4]));
    }
  }
  return best;
}

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.Dot(d);
  const double u = len2 > 0.0 ? std::clamp((p - a).Dot(d) / len2, 0.0, 1.0) : 0.0;
  return Distance(p, a + d * u);
}

double PointBoxSignedDistance(const Vec2& p, const OrientedBox& box) {
  const Vec2 local = ToLocal(box.center, p);
  const double qx = std::abs(local.x) - 0.5 * box.length;
  const double qy = std::abs(local.y) - 0.5 * box.width;
  const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
  const double inside = std::min(std::max(qx, qy), 0.0);
  return outside + inside;
}

std::vector<double> FourierEncode(std::span<const double> x, int n_freq) {
  if (n_freq < 1) Fail(ErrorCode::kInvalidArgument, "n_freq must be >= 1");
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(n_freq) * x.size());
  for (double xi : x) {
    for (int k = 0; k < n_freq; ++k) {
      const double arg = std::ldexp(1.0, k) * std::numbers::pi * xi;
      out.push_back(std::sin(arg));
      out.push_back(std::cos(arg));
    }
  }
  return out;
}

}  // namespace cplan
