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

#include <optional>

#include "pagt/geometry.hpp"
#include "pagt/pattern_aware.hpp"

namespace pagt {

// Idealised spinning LiDAR. Rays leave the origin at every integer multiple
// of the resolutions that falls inside the field of view.
struct SensorSpec {
  double vertical_resolution_deg = 0.4;
  double horizontal_resolution_deg = 0.17;
  double fov_down_deg = -24.8;
  double fov_up_deg = 2.0;
  double max_range = 120.0;

  void Validate() const;

  // First and last lattice indices (inclusive) along each axis.
  int FirstRow() const;
  int LastRow() const;
  int FirstColumn() const;
  int LastColumn() const;
};

struct TargetScene {
  Box3D target;
  // Height of an infinite horizontal ground plane, if any.
  std::optional<double> ground_z;
};

// One return per ray that hits the target (or ground) within max_range, in
// row-major order: elevation ascending, then azimuth ascending.
PointCloud SimulateScan(const TargetScene& scene, const SensorSpec& spec);

// Ray parameter of the first intersection with the box, if any.
std::optional<double> RayBoxIntersection(const Box3D& box, double dx,
                                         double dy, double dz);

// Grid whose slices are centered on the sensor's ray lattice, so the slice
// index of a simulated point is its lattice index minus the first index.
AngularGrid LatticeGrid(const SensorSpec& spec);

struct CloudComparison {
  double count_ratio = 0.0;       // |a| / |b|
  double mean_nn_distance = 0.0;  // over both directions
  double max_nn_distance = 0.0;
};

// Throws EmptyCloud when either cloud is empty.
CloudComparison CompareClouds(const PointCloud& a, const PointCloud& b);

struct OracleChainResult {
  PointCloud near_scan;
  PointCloud chained;  // near scan downsampled and relocated
  PointCloud far_scan;
  std::optional<CloudComparison> comparison;  // absent when a scan is empty
  double azimuth_arc_at_far = 0.0;
};

// Simulates a plate at `distance`, downsamples with LatticeGrid(spec) and
// relocates by `factor`, then compares against a direct scan at
// factor * distance.
OracleChainResult RunOracleChain(const Box3D& plate_at_near,
                                 const SensorSpec& spec, int factor);

}  // namespace pagt
