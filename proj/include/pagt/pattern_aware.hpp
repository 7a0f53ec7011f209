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

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pagt/geometry.hpp"
#include "pagt/gt_database.hpp"
#include "pagt/random.hpp"

namespace pagt {

inline constexpr double kDegToRad = kPi / 180.0;

// Uniform partition of the (azimuth, elevation) plane into W x H slices.
struct AngularGrid {
  double theta_min = -kPi;
  double theta_max = kPi;
  int azimuth_divisions = 512;  // W
  double phi_min = -24.8 * kDegToRad;
  double phi_max = 2.0 * kDegToRad;
  int polar_divisions = 64;  // H

  double AzimuthWidth() const {
    return (theta_max - theta_min) / azimuth_divisions;
  }
  double PolarWidth() const { return (phi_max - phi_min) / polar_divisions; }

  // Throws InvalidArgument when the extents or counts are unusable.
  void Validate() const;
};

struct SliceIndex {
  int azimuth = 0;
  int polar = 0;

  bool operator==(const SliceIndex&) const = default;
};

struct PatternAwareConfig {
  AngularGrid grid;
  double apply_probability = 0.4;
  // Every k-th slice is kept in both angular dimensions, so the factor has to
  // be an integer >= 2.
  double relocation_factor = 2.0;
  std::map<std::string, std::size_t> min_points = {
      {"Car", 5}, {"Pedestrian", 200}, {"Cyclist", 200}};
  double relocated_min = 20.0;
  double relocated_max = 70.0;

  void Validate() const;
  // Minimum surviving points for a class; classes without an entry need 1.
  std::size_t MinPointsFor(const std::string& class_name) const;
  int Stride() const { return static_cast<int>(relocation_factor); }
};

// Throws OutOfGrid when the angles fall outside the grid extents.
SliceIndex SliceOf(const SphericalPoint& s, const AngularGrid& grid);

// Keeps the points whose azimuth and polar slice indices are both multiples
// of `stride` (even slices for the default stride of 2). Order is preserved.
PointCloud DownsamplePattern(const PointCloud& points, const AngularGrid& grid,
                             int stride = 2);

// Moves the box along its horizontal sensor ray so its distance scales by
// `factor`. The box bottom and heading stay fixed and every point moves with
// the box center.
std::pair<Box3D, PointCloud> RelocateObject(const Box3D& box,
                                            const PointCloud& points,
                                            double factor);

enum class SampleOutcome { kUnchanged, kRelocated, kRejected };

struct PatternAwareResult {
  SampleOutcome outcome = SampleOutcome::kUnchanged;
  // The relocated object for kRelocated, otherwise the input object.
  GtObject object;
};

PatternAwareResult PatternAwareSample(const GtObject& object,
                                      const PatternAwareConfig& config,
                                      Rng& rng);

struct AugmentStats {
  std::size_t sampled = 0;
  std::size_t accepted = 0;
  // Accepted objects that were downsampled and moved.
  std::size_t relocated = 0;
  // Pattern-aware attempts that fell back to the original object.
  std::size_t pattern_rejected = 0;
  std::size_t collision_rejected = 0;
};

struct AugmentedFrame {
  PointCloud cloud;
  std::vector<LabeledBox> boxes;
  // Number of boxes at the front of `boxes` that came from the frame itself.
  std::size_t original_box_count = 0;
  AugmentStats stats;
};

// Per-class number of database objects to draw for each frame.
using SamplingPlan = std::vector<std::pair<std::string, std::size_t>>;

inline SamplingPlan DefaultSamplingPlan() {
  return {{"Car", 15}, {"Pedestrian", 10}, {"Cyclist", 10}};
}

// Ground-truth sampling with the pattern-aware step applied to each drawn
// object. Classes absent from the database are skipped.
AugmentedFrame AugmentFrame(const PointCloud& cloud,
                            const std::vector<LabeledBox>& boxes,
                            const GtDatabase& db,
                            const PatternAwareConfig& config,
                            const SamplingPlan& plan, Rng& rng);

}  // namespace pagt
