// Copyright 2026 The pagt Authors
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

#include "pagt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pagt/errors.hpp"

namespace pagt {
namespace {

constexpr double kVertexEpsilon = 1e-9;
// Footprints that only touch along an edge or a corner produce slivers of
// pure rounding noise; anything below this is reported as zero.
constexpr double kAreaEpsilon = 1e-12;

double Cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double PolygonArea(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice_area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    twice_area += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(twice_area);
}

Vec2 LineIntersection(const Vec2& p, const Vec2& q, const Vec2& a,
                      const Vec2& b) {
  const double d1 = Cross(a, b, p);
  const double d2 = Cross(a, b, q);
  const double t = d1 / (d1 - d2);
  return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
}

void PushUnique(std::vector<Vec2>& out, const Vec2& v) {
  if (!out.empty()) {
    const Vec2& last = out.back();
    if (std::abs(last.x - v.x) <= kVertexEpsilon &&
        std::abs(last.y - v.y) <= kVertexEpsilon) {
      return;
    }
  }
  out.push_back(v);
}

}  // namespace

double Box3D::Distance() const { return std::hypot(cx, cy); }

double NormalizeAngle(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double a = std::fmod(angle + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  a -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (a >= kPi) a -= 2.0 * kPi;
  return a;
}

bool IsFinite(const LidarPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
         std::isfinite(p.intensity);
}

void ValidateCloud(const PointCloud& cloud) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!IsFinite(cloud[i])) {
      throw Error(ErrorKind::kMalformedCloud,
                  "non-finite value in point " + std::to_string(i));
    }
  }
}

void ValidateBox(const Box3D& box) {
  const bool finite = std::isfinite(box.cx) && std::isfinite(box.cy) &&
                      std::isfinite(box.cz) && std::isfinite(box.l) &&
                      std::isfinite(box.w) && std::isfinite(box.h) &&
                      std::isfinite(box.yaw);
  if (!finite || box.l <= 0.0 || box.w <= 0.0 || box.h <= 0.0) {
    throw Error(ErrorKind::kDegenerateBox,
                "box dimensions must be finite and positive (l=" +
                    std::to_string(box.l) + " w=" + std::to_string(box.w) +
                    " h=" + std::to_string(box.h) + ")");
  }
}

SphericalPoint ToSpherical(const LidarPoint& p) {
  SphericalPoint s;
  s.d = std::hypot(p.x, p.y);
  s.r = std::hypot(s.d, p.z);
  s.theta = s.d > 0.0 ? NormalizeAngle(std::atan2(p.y, p.x)) : 0.0;
  // atan2(z, d) equals asin(z / r) but stays well conditioned near the poles.
  s.phi = s.r > 0.0 ? std::atan2(p.z, s.d) : 0.0;
  return s;
}

LidarPoint FromSpherical(const SphericalPoint& s, double intensity) {
  const double horizontal = s.r * std::cos(s.phi);
  return {horizontal * std::cos(s.theta), horizontal * std::sin(s.theta),
          s.r * std::sin(s.phi), intensity};
}

BoxFrameOffset ToBoxFrame(const Box3D& box, double x, double y, double z) {
  const double dx = x - box.cx;
  const double dy = y - box.cy;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return {c * dx + s * dy, -s * dx + c * dy, z - box.cz};
}

bool PointInFootprint(const Box3D& box, const LidarPoint& p) {
  const BoxFrameOffset o = ToBoxFrame(box, p.x, p.y, p.z);
  return std::abs(o.u) <= 0.5 * box.l && std::abs(o.v) <= 0.5 * box.w;
}

bool PointInBox(const Box3D& box, const LidarPoint& p) {
  const BoxFrameOffset o = ToBoxFrame(box, p.x, p.y, p.z);
  return std::abs(o.u) <= 0.5 * box.l && std::abs(o.v) <= 0.5 * box.w &&
         std::abs(o.w) <= 0.5 * box.h;
}

std::vector<std::size_t> PointsInBox(const PointCloud& cloud,
                                     const Box3D& box) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (PointInBox(box, cloud[i])) indices.push_back(i);
  }
  return indices;
}

std::array<Vec2, 4> BevCorners(const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  constexpr std::array<std::array<double, 2>, 4> kSigns = {
      {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  std::array<Vec2, 4> corners;
  for (std::size_t i = 0; i < 4; ++i) {
    const double u = kSigns[i][0] * hl;
    const double v = kSigns[i][1] * hw;
    corners[i] = {box.cx + c * u - s * v, box.cy + s * u + c * v};
  }
  return corners;
}

std::array<LidarPoint, 8> Corners(const Box3D& box) {
  const std::array<Vec2, 4> bev = BevCorners(box);
  std::array<LidarPoint, 8> corners;
  for (std::size_t i = 0; i < 4; ++i) {
    corners[i] = {bev[i].x, bev[i].y, box.Bottom(), 0.0};
    corners[i + 4] = {bev[i].x, bev[i].y, box.Top(), 0.0};
  }
  return corners;
}

double ConvexIntersectionArea(std::span<const Vec2> subject,
                              std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  // Sutherland-Hodgman: clip the subject by each half-plane of the clip
  // polygon in turn.
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    std::vector<Vec2> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& p = input[i];
      const Vec2& q = input[(i + 1) % input.size()];
      const double cp = Cross(a, b, p);
      const double cq = Cross(a, b, q);
      const bool p_in = cp >= -kVertexEpsilon;
      const bool q_in = cq >= -kVertexEpsilon;
      if (p_in) PushUnique(output, p);
      if (p_in != q_in) PushUnique(output, LineIntersection(p, q, a, b));
    }
    if (output.size() > 1) {
      const Vec2& first = output.front();
      const Vec2& last = output.back();
      if (std::abs(first.x - last.x) <= kVertexEpsilon &&
          std::abs(first.y - last.y) <= kVertexEpsilon) {
        output.pop_back();
      }
    }
  }
  return PolygonArea(output);
}

double BevOverlapArea(const Box3D& a, const Box3D& b) {
  const std::array<Vec2, 4> ca = BevCorners(a);
  const std::array<Vec2, 4> cb = BevCorners(b);
  // Averaging both clipping orders makes the result exactly symmetric.
  const double area = 0.5 * (ConvexIntersectionArea(ca, cb) +
                             ConvexIntersectionArea(cb, ca));
  return area <= kAreaEpsilon ? 0.0 : area;
}

double Iou3d(const Box3D& a, const Box3D& b) {
  const double overlap_z =
      std::min(a.Top(), b.Top()) - std::max(a.Bottom(), b.Bottom());
  if (overlap_z <= 0.0) return 0.0;
  const double bev = BevOverlapArea(a, b);
  if (bev <= 0.0) return 0.0;
  const double intersection = bev * overlap_z;
  const double union_volume = a.Volume() + b.Volume() - intersection;
  if (union_volume <= 0.0) return 0.0;
  return std::clamp(intersection / union_volume, 0.0, 1.0);
}

}  // namespace pagt
