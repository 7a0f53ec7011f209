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

#include "pagt/scan_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pagt/errors.hpp"

namespace pagt {
namespace {

// Guards the lattice bounds against 180 / 0.17 style quotients landing a hair
// off an integer.
constexpr double kLatticeSlack = 1e-9;

int CeilIndex(double value) {
  return static_cast<int>(std::ceil(value - kLatticeSlack));
}
int FloorIndex(double value) {
  return static_cast<int>(std::floor(value + kLatticeSlack));
}

double SquaredDistance(const LidarPoint& a, const LidarPoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

void SensorSpec::Validate() const {
  if (!(vertical_resolution_deg > 0.0) || !(horizontal_resolution_deg > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "resolutions must be positive");
  }
  if (!(fov_up_deg > fov_down_deg)) {
    throw Error(ErrorKind::kInvalidArgument, "vertical field of view is empty");
  }
  if (!(max_range > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "max_range must be positive");
  }
  if (LastRow() < FirstRow()) {
    throw Error(ErrorKind::kInvalidArgument,
                "field of view holds no lattice row");
  }
}

int SensorSpec::FirstRow() const {
  return CeilIndex(fov_down_deg / vertical_resolution_deg);
}
int SensorSpec::LastRow() const {
  return FloorIndex(fov_up_deg / vertical_resolution_deg);
}
int SensorSpec::FirstColumn() const {
  return CeilIndex(-180.0 / horizontal_resolution_deg);
}
int SensorSpec::LastColumn() const {
  // Azimuth is half-open at +180 degrees.
  return CeilIndex(180.0 / horizontal_resolution_deg) - 1;
}

std::optional<double> RayBoxIntersection(const Box3D& box, double dx,
                                         double dy, double dz) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  // Ray origin and direction in the box frame.
  const double origin[3] = {c * -box.cx + s * -box.cy,
                            -s * -box.cx + c * -box.cy, -box.cz};
  const double dir[3] = {c * dx + s * dy, -s * dx + c * dy, dz};
  const double half[3] = {0.5 * box.l, 0.5 * box.w, 0.5 * box.h};

  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] == 0.0) {
      if (std::abs(origin[axis]) > half[axis]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / dir[axis];
    const double t1 = (-half[axis] - origin[axis]) * inv;
    const double t2 = (half[axis] - origin[axis]) * inv;
    t_near = std::max(t_near, std::min(t1, t2));
    t_far = std::min(t_far, std::max(t1, t2));
  }
  if (t_far < t_near || t_near <= 0.0) return std::nullopt;
  return t_near;
}

PointCloud SimulateScan(const TargetScene& scene, const SensorSpec& spec) {
  spec.Validate();
  const double vres = spec.vertical_resolution_deg * kDegToRad;
  const double hres = spec.horizontal_resolution_deg * kDegToRad;
  PointCloud cloud;
  for (int row = spec.FirstRow(); row <= spec.LastRow(); ++row) {
    const double phi = row * vres;
    const double cos_phi = std::cos(phi);
    const double dz = std::sin(phi);
    for (int col = spec.FirstColumn(); col <= spec.LastColumn(); ++col) {
      const double theta = col * hres;
      const double dx = cos_phi * std::cos(theta);
      const double dy = cos_phi * std::sin(theta);
      std::optional<double> hit = RayBoxIntersection(scene.target, dx, dy, dz);
      if (scene.ground_z && dz < 0.0 && *scene.ground_z < 0.0) {
        const double t_ground = *scene.ground_z / dz;
        if (!hit || t_ground < *hit) hit = t_ground;
      }
      if (!hit || *hit > spec.max_range) continue;
      cloud.push_back({*hit * dx, *hit * dy, *hit * dz, 1.0});
    }
  }
  return cloud;
}

AngularGrid LatticeGrid(const SensorSpec& spec) {
  spec.Validate();
  const double vres = spec.vertical_resolution_deg * kDegToRad;
  const double hres = spec.horizontal_resolution_deg * kDegToRad;
  AngularGrid grid;
  grid.azimuth_divisions = spec.LastColumn() - spec.FirstColumn() + 1;
  grid.theta_min = (spec.FirstColumn() - 0.5) * hres;
  grid.theta_max = grid.theta_min + grid.azimuth_divisions * hres;
  grid.polar_divisions = spec.LastRow() - spec.FirstRow() + 1;
  grid.phi_min = (spec.FirstRow() - 0.5) * vres;
  grid.phi_max = grid.phi_min + grid.polar_divisions * vres;
  grid.Validate();
  return grid;
}

CloudComparison CompareClouds(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kEmptyCloud, "cannot compare an empty cloud");
  }
  double sum = 0.0;
  double max_distance = 0.0;
  auto accumulate = [&](const PointCloud& from, const PointCloud& to) {
    for (const LidarPoint& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const LidarPoint& q : to) best = std::min(best, SquaredDistance(p, q));
      const double distance = std::sqrt(best);
      sum += distance;
      max_distance = std::max(max_distance, distance);
    }
  };
  accumulate(a, b);
  accumulate(b, a);
  CloudComparison result;
  result.count_ratio = static_cast<double>(a.size()) / static_cast<double>(b.size());
  result.mean_nn_distance = sum / static_cast<double>(a.size() + b.size());
  result.max_nn_distance = max_distance;
  return result;
}

OracleChainResult RunOracleChain(const Box3D& plate_at_near,
                                 const SensorSpec& spec, int factor) {
  OracleChainResult result;
  const AngularGrid grid = LatticeGrid(spec);
  result.near_scan = SimulateScan({plate_at_near, std::nullopt}, spec);
  Box3D far_plate = plate_at_near;
  far_plate.cx *= factor;
  far_plate.cy *= factor;
  result.far_scan = SimulateScan({far_plate, std::nullopt}, spec);
  if (plate_at_near.Distance() > 0.0) {
    const PointCloud kept = DownsamplePattern(result.near_scan, grid, factor);
    result.chained = RelocateObject(plate_at_near, kept, factor).second;
  }
  result.azimuth_arc_at_far =
      far_plate.Distance() * spec.horizontal_resolution_deg * kDegToRad;
  if (!result.chained.empty() && !result.far_scan.empty()) {
    result.comparison = CompareClouds(result.chained, result.far_scan);
  }
  return result;
}

}  // namespace pagt
