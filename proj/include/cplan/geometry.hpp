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

#ifndef CPLAN_GEOMETRY_HPP_
#define CPLAN_GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace cplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2&) const = default;

  double Dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double Cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double Norm() const { return std::hypot(x, y); }
};

inline double Distance(const Vec2& a, const Vec2& b) { return (a - b).Norm(); }

// Wraps an angle into (-pi, pi].
double NormalizeAngle(double angle);

inline Vec2 Rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2&) const = default;
};

// Expresses `world` in the frame of `origin` and back.
Vec2 ToLocal(const Pose2& origin, const Vec2& world);
Vec2 ToWorld(const Pose2& origin, const Vec2& local);

// An ordered 2D polyline with a cached cumulative arc-length table.
// Consecutive duplicate vertices are allowed (zero-length segments).
class Polyline {
 public:
  Polyline() = default;
  // Throws kInvalidArgument when fewer than two points or a non-finite
  // coordinate is given.
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& cum_arc() const { return cum_arc_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  double length() const { return cum_arc_.empty() ? 0.0 : cum_arc_.back(); }

  bool operator==(const Polyline& o) const { return points_ == o.points_; }

 private:
  std::vector<Vec2> points_;
  std::vector<double> cum_arc_;
};

// Resamples at uniform arc spacing starting at the first vertex; the last
// input vertex is appended when it does not coincide with the final sample.
Polyline ResamplePath(std::span<const Vec2> trajectory, double spacing);
Polyline ResamplePath(std::span<const Pose2> trajectory, double spacing);

// Point at arc length `s` along `path`, heading = direction of the segment
// containing s. Beyond the end the final non-degenerate segment is extended.
Pose2 InterpAlong(const Polyline& path, double s);

struct Projection {
  double arc = 0.0;       // arc length of the closest point
  double lateral = 0.0;   // signed, left of travel direction positive
  double distance = 0.0;  // unsigned distance to the closest point
};

// Closest point on the polyline (segments are closed, no extrapolation).
Projection ProjectOnto(const Polyline& path, const Vec2& point);

struct OrientedBox {
  Pose2 center;
  double length = 0.0;
  double width = 0.0;

  bool Valid() const {
    return std::isfinite(length) && std::isfinite(width) && length > 0.0 &&
           width > 0.0 && std::isfinite(center.x) && std::isfinite(center.y) &&
           std::isfinite(center.heading);
  }
};

// Front-left, front-right, rear-right, rear-left.
using CornerSet = std::array<Vec2, 4>;

CornerSet CornersOf(const OrientedBox& box);

// Separating-axis test; touching boundaries count as overlap.
bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b);

// Distance between the closest points of the two rectangles, 0 on overlap.
double MinBoxDistance(const OrientedBox& a, const OrientedBox& b);

// Signed distance from a point to the rectangle boundary, negative inside.
double PointBoxSignedDistance(const Vec2& p, const OrientedBox& box);

double PointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b);

// Layout: for each input x_i, for k = 0..n_freq-1,
// [sin(2^k pi x_i), cos(2^k pi x_i)].
std::vector<double> FourierEncode(std::span<const double> x, int n_freq);

}  // namespace cplan

#endif  // CPLAN_GEOMETRY_HPP_
