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

#include <algorithm>
#include <cmath>
#include <limits>

#include "cplan/learn.hpp"

namespace cplan {

std::size_t FeatureDim(int horizon) { return 2 * static_cast<std::size_t>(horizon + 1) + 3; }

namespace {

// Mean absolute heading change per metre along the polyline.
double MeanCurvature(const Polyline& path) {
  const auto& pts = path.points();
  double turn = 0.0;
  double prev_heading = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 d = pts[i + 1] - pts[i];
    if (d.Norm() <= 1e-9) continue;
    const double h = std::atan2(d.y, d.x);
    if (have_prev) turn += std::abs(NormalizeAngle(h - prev_heading));
    prev_heading = h;
    have_prev = true;
  }
  return path.length() > 0.0 ? turn / path.length() : 0.0;
}

}  // namespace

std::vector<double> BuildFeatures(const Polyline& path, const DisplacementSequence& anchor,
                                  double lookahead, const Frame& frame,
                                  const FeatureConfig& cfg) {
  const auto cum = anchor.Cumulative();
  const Vec2 ego = frame.ego.pose.position();
  std::vector<const AgentTrack*> nearby;
  for (const auto& a : frame.agents) {
    if (Distance(a.box.center.position(), ego) <= cfg.agent_radius) nearby.push_back(&a);
  }

  std::vector<double> f;
  f.reserve(FeatureDim(static_cast<int>(anchor.horizon())));
  for (std::size_t t = 0; t < cum.size(); ++t) {
    const Pose2 ref = InterpAlong(path, cum[t]);
    const OrientedBox ego_box{ref, cfg.ego_dims.length, cfg.ego_dims.width};
    double best = cfg.distance_clip;
    double bearing = 0.0;
    for (const AgentTrack* a : nearby) {
      const OrientedBox box = a->BoxAt(t);
      // Cheap reject before the exact box distance.
      const double centre_gap = Distance(box.center.position(), ref.position()) -
                                0.5 * std::hypot(box.length, box.width) -
                                0.5 * std::hypot(ego_box.length, ego_box.width);
      if (centre_gap >= best) continue;
      double d = MinBoxDistance(ego_box, box);
      if (d == 0.0) d = std::min(0.0, PointBoxSignedDistance(ref.position(), box));
      if (d < best) {
        best = d;
        const Vec2 rel = box.center.position() - ref.position();
        bearing = NormalizeAngle(std::atan2(rel.y, rel.x) - ref.heading) / std::numbers::pi;
      }
    }
    best = std::clamp(best, -cfg.penetration_clip, cfg.distance_clip);
    f.push_back(best / cfg.scale);
    f.push_back(bearing);
  }
  f.push_back(frame.ego.speed / cfg.scale);
  f.push_back(MeanCurvature(path) * cfg.scale);
  f.push_back(lookahead / cfg.scale);
  return f;
}

}  // namespace cplan
