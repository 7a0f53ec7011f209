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

#include <utility>
#include <vector>

#include "pagt/geometry.hpp"
#include "pagt/gt_database.hpp"
#include "pagt/random.hpp"

namespace pagt {

// Angular extent of a box as seen from the sensor origin. The azimuth
// interval is unwrapped, so theta_hi may exceed pi when the box straddles the
// rear seam.
struct Frustum {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double phi_lo = 0.0;
  double phi_hi = 0.0;

  bool Contains(const SphericalPoint& s) const;
};

// Throws DegenerateLocation when the box center sits on the sensor axis.
Frustum FrustumOfBox(const Box3D& box);

// Each point inside both the box and its frustum is dropped with probability
// `p`. Other points pass through untouched and in order.
PointCloud FrustumDropout(const PointCloud& cloud, const Box3D& box, double p,
                          Rng& rng);

// Adds N(0, sigma) offsets to x, y and z of every point inside both the box
// and its frustum.
PointCloud FrustumNoise(const PointCloud& cloud, const Box3D& box,
                        double sigma, Rng& rng);

// Each point inside the box is dropped with probability `p`.
PointCloud RandomDrop(const PointCloud& cloud, const Box3D& box, double p,
                      Rng& rng);

struct GlobalTransformSpec {
  bool flip_y = false;
  double rotation = 0.0;  // radians about +z
  double scale = 1.0;
  double tx = 0.0;
  double ty = 0.0;
  double tz = 0.0;
};

// Applies flip, rotation, scaling and finally translation to the cloud and
// the boxes together.
std::pair<PointCloud, std::vector<LabeledBox>> GlobalTransform(
    const PointCloud& cloud, const std::vector<LabeledBox>& boxes,
    const GlobalTransformSpec& spec);

struct GlobalAugmentConfig {
  double flip_probability = 0.5;
  double rotation_min = -kPi / 4.0;
  double rotation_max = kPi / 4.0;
  double scale_min = 0.95;
  double scale_max = 1.05;
  // Translation jitter is off unless a positive std is set.
  double translation_std = 0.0;
};

GlobalTransformSpec SampleGlobalTransform(const GlobalAugmentConfig& config,
                                          Rng& rng);

}  // namespace pagt
