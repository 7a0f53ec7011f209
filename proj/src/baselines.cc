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

#include "pagt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pagt/errors.hpp"

namespace pagt {
namespace {

void CheckProbability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "probability must lie in [0, 1]");
  }
}

bool InBoxAndFrustum(const Box3D& box, const Frustum& frustum,
                     const LidarPoint& p) {
  return PointInBox(box, p) && frustum.Contains(ToSpherical(p));
}

}  // namespace

bool Frustum::Contains(const SphericalPoint& s) const {
  if (s.phi < phi_lo || s.phi > phi_hi) return false;
  double offset = std::fmod(s.theta - theta_lo, 2.0 * kPi);
  if (offset < 0.0) offset += 2.0 * kPi;
  return offset <= theta_hi - theta_lo;
}

Frustum FrustumOfBox(const Box3D& box) {
  if (box.Distance() == 0.0) {
    throw Error(ErrorKind::kDegenerateLocation,
                "frustum undefined for a box on the sensor axis");
  }
  const double center_theta = std::atan2(box.cy, box.cx);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Frustum frustum{0.0, 0.0, lo, hi};
  for (const LidarPoint& corner : Corners(box)) {
    const SphericalPoint s = ToSpherical(corner);
    // Measure azimuth relative to the center so the interval never wraps.
    const double delta = NormalizeAngle(s.theta - center_theta);
    lo = std::min(lo, delta);
    hi = std::max(hi, delta);
    frustum.phi_lo = std::min(frustum.phi_lo, s.phi);
    frustum.phi_hi = std::max(frustum.phi_hi, s.phi);
  }
  frustum.theta_lo = center_theta + lo;
  frustum.theta_hi = center_theta + hi;
  return frustum;
}

PointCloud FrustumDropout(const PointCloud& cloud, const Box3D& box, double p,
                          Rng& rng) {
  CheckProbability(p);
  const Frustum frustum = FrustumOfBox(box);
  std::bernoulli_distribution drop(p);
  PointCloud out;
  out.reserve(cloud.size());
  for (const LidarPoint& point : cloud) {
    if (InBoxAndFrustum(box, frustum, point) && drop(rng)) continue;
    out.push_back(point);
  }
  return out;
}

PointCloud FrustumNoise(const PointCloud& cloud, const Box3D& box,
                        double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "sigma must be non-negative");
  }
  PointCloud out = cloud;
  if (sigma == 0.0) return out;
  const Frustum frustum = FrustumOfBox(box);
  std::normal_distribution<double> noise(0.0, sigma);
  for (LidarPoint& point : out) {
    if (!InBoxAndFrustum(box, frustum, point)) continue;
    point.x += noise(rng);
    point.y += noise(rng);
    point.z += noise(rng);
  }
  return out;
}

PointCloud RandomDrop(const PointCloud& cloud, const Box3D& box, double p,
                      Rng& rng) {
  CheckProbability(p);
  std::bernoulli_distribution drop(p);
  PointCloud out;
  out.reserve(cloud.size());
  for (const LidarPoint& point : cloud) {
    if (PointInBox(box, point) && drop(rng)) continue;
    out.push_back(point);
  }
  return out;
}

std::pair<PointCloud, std::vector<LabeledBox>> GlobalTransform(
    const PointCloud& cloud, const std::vector<LabeledBox>& boxes,
    const GlobalTransformSpec& spec) {
  if (!(spec.scale > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "scale must be positive");
  }
  const double c = std::cos(spec.rotation);
  const double s = std::sin(spec.rotation);
  const double flip = spec.flip_y ? -1.0 : 1.0;
  auto apply = [&](double& x, double& y, double& z) {
    y *= flip;
    const double rx = c * x - s * y;
    const double ry = s * x + c * y;
    x = spec.scale * rx + spec.tx;
    y = spec.scale * ry + spec.ty;
    z = spec.scale * z + spec.tz;
  };

  PointCloud out_cloud = cloud;
  for (LidarPoint& p : out_cloud) apply(p.x, p.y, p.z);

  std::vector<LabeledBox> out_boxes = boxes;
  for (LabeledBox& labeled : out_boxes) {
    Box3D& b = labeled.box;
    apply(b.cx, b.cy, b.cz);
    b.yaw = NormalizeAngle(flip * b.yaw + spec.rotation);
    b.l *= spec.scale;
    b.w *= spec.scale;
    b.h *= spec.scale;
  }
  return {std::move(out_cloud), std::move(out_boxes)};
}

GlobalTransformSpec SampleGlobalTransform(const GlobalAugmentConfig& config,
                                          Rng& rng) {
  GlobalTransformSpec spec;
  spec.flip_y = std::bernoulli_distribution(config.flip_probability)(rng);
  spec.rotation = std::uniform_real_distribution<double>(
      config.rotation_min, config.rotation_max)(rng);
  spec.scale = std::uniform_real_distribution<double>(config.scale_min,
                                                      config.scale_max)(rng);
  if (config.translation_std > 0.0) {
    std::normal_distribution<double> jitter(0.0, config.translation_std);
    spec.tx = jitter(rng);
    spec.ty = jitter(rng);
    spec.tz = jitter(rng);
  }
  return spec;
}

}  // namespace pagt
