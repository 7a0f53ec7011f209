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

#include "pagt/pattern_aware.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pagt/errors.hpp"

namespace pagt {
namespace {

int SliceAlong(double angle, double lo, double hi, int count,
               const char* axis) {
  if (!(angle >= lo && angle < hi)) {
    throw Error(ErrorKind::kOutOfGrid, std::string(axis) + " angle " +
                                           std::to_string(angle) +
                                           " outside [" + std::to_string(lo) +
                                           ", " + std::to_string(hi) + ")");
  }
  const double width = (hi - lo) / count;
  const int index = static_cast<int>(std::floor((angle - lo) / width));
  // Rounding can push an angle just below `hi` onto index == count.
  return std::min(index, count - 1);
}

bool InGrid(const SphericalPoint& s, const AngularGrid& grid) {
  return s.theta >= grid.theta_min && s.theta < grid.theta_max &&
         s.phi >= grid.phi_min && s.phi < grid.phi_max;
}

}  // namespace

void AngularGrid::Validate() const {
  if (!(theta_max > theta_min) || !(phi_max > phi_min)) {
    throw Error(ErrorKind::kInvalidArgument, "grid extents are empty");
  }
  if (azimuth_divisions < 2 || polar_divisions < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "grid needs at least two slices per axis");
  }
  if (!(AzimuthWidth() > 0.0) || !(PolarWidth() > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "slice widths must be positive");
  }
}

void PatternAwareConfig::Validate() const {
  grid.Validate();
  if (!(apply_probability >= 0.0 && apply_probability <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "apply_probability must lie in [0, 1]");
  }
  if (!(relocation_factor > 1.0) ||
      relocation_factor != std::floor(relocation_factor)) {
    throw Error(ErrorKind::kInvalidArgument,
                "relocation_factor must be an integer >= 2");
  }
  if (!(relocated_min < relocated_max)) {
    throw Error(ErrorKind::kInvalidArgument, "relocated range is empty");
  }
  for (const auto& [name, count] : min_points) {
    if (count < 1) {
      throw Error(ErrorKind::kInvalidArgument,
                  "min_points for " + name + " must be at least 1");
    }
  }
}

std::size_t PatternAwareConfig::MinPointsFor(
    const std::string& class_name) const {
  const auto it = min_points.find(class_name);
  return it == min_points.end() ? 1 : it->second;
}

SliceIndex SliceOf(const SphericalPoint& s, const AngularGrid& grid) {
  return {SliceAlong(s.theta, grid.theta_min, grid.theta_max,
                     grid.azimuth_divisions, "azimuth"),
          SliceAlong(s.phi, grid.phi_min, grid.phi_max, grid.polar_divisions,
                     "polar")};
}

PointCloud DownsamplePattern(const PointCloud& points, const AngularGrid& grid,
                             int stride) {
  if (stride < 1) {
    throw Error(ErrorKind::kInvalidArgument, "stride must be positive");
  }
  PointCloud kept;
  for (const LidarPoint& p : points) {
    const SliceIndex slice = SliceOf(ToSpherical(p), grid);
    if (slice.azimuth % stride == 0 && slice.polar % stride == 0) {
      kept.push_back(p);
    }
  }
  return kept;
}

std::pair<Box3D, PointCloud> RelocateObject(const Box3D& box,
                                            const PointCloud& points,
                                            double factor) {
  if (box.Distance() == 0.0) {
    throw Error(ErrorKind::kDegenerateLocation,
                "cannot relocate a box centered on the sensor axis");
  }
  const double dx = (factor - 1.0) * box.cx;
  const double dy = (factor - 1.0) * box.cy;
  Box3D moved = box;
  moved.cx = factor * box.cx;
  moved.cy = factor * box.cy;
  PointCloud shifted = points;
  for (LidarPoint& p : shifted) {
    p.x += dx;
    p.y += dy;
  }
  return {moved, std::move(shifted)};
}

PatternAwareResult PatternAwareSample(const GtObject& object,
                                      const PatternAwareConfig& config,
                                      Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(unit(rng) < config.apply_probability)) {
    return {SampleOutcome::kUnchanged, object};
  }
  const PatternAwareResult rejected{SampleOutcome::kRejected, object};
  if (object.box.Distance() == 0.0) return rejected;
  for (const LidarPoint& p : object.points) {
    if (!InGrid(ToSpherical(p), config.grid)) return rejected;
  }

  const PointCloud kept =
      DownsamplePattern(object.points, config.grid, config.Stride());
  if (kept.size() < config.MinPointsFor(object.class_name)) return rejected;

  auto [box, points] = RelocateObject(object.box, kept, config.relocation_factor);
  const double distance = box.Distance();
  if (distance < config.relocated_min || distance > config.relocated_max) {
    return rejected;
  }
  GtObject moved = object;
  moved.box = box;
  moved.points = std::move(points);
  return {SampleOutcome::kRelocated, std::move(moved)};
}

AugmentedFrame AugmentFrame(const PointCloud& cloud,
                            const std::vector<LabeledBox>& boxes,
                            const GtDatabase& db,
                            const PatternAwareConfig& config,
                            const SamplingPlan& plan, Rng& rng) {
  AugmentedFrame frame;
  std::vector<GtObject> candidates;
  std::vector<bool> relocated;
  for (const auto& [class_name, count] : plan) {
    if (count == 0 || db.Objects(class_name).empty()) continue;
    for (GtObject& drawn : SampleObjects(db, class_name, count, rng)) {
      PatternAwareResult result = PatternAwareSample(drawn, config, rng);
      if (result.outcome == SampleOutcome::kRejected) {
        ++frame.stats.pattern_rejected;
      }
      relocated.push_back(result.outcome == SampleOutcome::kRelocated);
      candidates.push_back(std::move(result.object));
    }
  }
  frame.stats.sampled = candidates.size();

  InsertResult inserted = InsertObjects(cloud, boxes, candidates);
  frame.cloud = std::move(inserted.cloud);
  frame.boxes = std::move(inserted.boxes);
  frame.original_box_count = boxes.size();
  frame.stats.accepted = inserted.accepted;
  frame.stats.collision_rejected = candidates.size() - inserted.accepted;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (inserted.accepted_mask[i] && relocated[i]) ++frame.stats.relocated;
  }
  return frame;
}

}  // namespace pagt
