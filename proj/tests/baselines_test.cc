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

#include <cmath>
#include <cstring>
#include <random>

#include <doctest.h>

#include "fixtures.hpp"
#include "pagt/baselines.hpp"
#include "pagt/errors.hpp"

using namespace pagt;
using pagt::testing::MakeBox;
using pagt::testing::PointsInside;

namespace {

struct Interval {
  double lo, hi;
};

// Corner enumeration. Azimuths are taken relative to the center direction so
// the seam never splits the interval.
std::pair<Interval, Interval> CornerFrustum(const Box3D& box) {
  const double center = std::atan2(box.cy, box.cx);
  Interval theta{1e9, -1e9}, phi{1e9, -1e9};
  for (const LidarPoint& c : Corners(box)) {
    double t = std::atan2(c.y, c.x) - center;
    while (t >= kPi) t -= 2 * kPi;
    while (t < -kPi) t += 2 * kPi;
    theta.lo = std::min(theta.lo, t + center);
    theta.hi = std::max(theta.hi, t + center);
    const double p = std::atan2(c.z, std::hypot(c.x, c.y));
    phi.lo = std::min(phi.lo, p);
    phi.hi = std::max(phi.hi, p);
  }
  return {theta, phi};
}

// Two-sided 99% normal bound on a binomial fraction.
double Binomial99(double p, std::size_t n) {
  return 2.5758 * std::sqrt(p * (1 - p) / static_cast<double>(n));
}

// A cloud with `inside` points in the box and a shell of points outside.
PointCloud MixedCloud(const Box3D& box, std::size_t inside, Rng& rng) {
  PointCloud cloud = PointsInside(box, inside, rng);
  std::uniform_real_distribution<double> coord(-40.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    const LidarPoint p{coord(rng), coord(rng), coord(rng) / 20.0, 0.3};
    if (!PointInBox(box, p)) cloud.push_back(p);
  }
  return cloud;
}

}  // namespace

TEST_CASE("frustum_of_box matches corner enumeration") {
  const Box3D cube = MakeBox(10, 0, 0, 1, 1, 1);
  const Frustum f = FrustumOfBox(cube);
  CHECK(f.theta_lo == doctest::Approx(-std::atan(0.5 / 9.5)));
  CHECK(f.theta_hi == doctest::Approx(std::atan(0.5 / 9.5)));
  CHECK(f.theta_lo == doctest::Approx(-f.theta_hi));
  CHECK(f.phi_lo == doctest::Approx(-f.phi_hi));

  Rng rng(1);
  std::uniform_real_distribution<double> coord(-30.0, 30.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    Box3D box = MakeBox(coord(rng), coord(rng), coord(rng) / 20, 3.9, 1.6, 1.5, angle(rng));
    if (box.Distance() < 4.0) continue;
    const auto [theta, phi] = CornerFrustum(box);
    const Frustum got = FrustumOfBox(box);
    REQUIRE(got.theta_lo <= got.theta_hi);
    REQUIRE(got.phi_lo <= got.phi_hi);
    REQUIRE(got.theta_lo == doctest::Approx(theta.lo));
    REQUIRE(got.theta_hi == doctest::Approx(theta.hi));
    REQUIRE(got.phi_lo == doctest::Approx(phi.lo));
    REQUIRE(got.phi_hi == doctest::Approx(phi.hi));
  }
}

TEST_CASE("frustum of a box behind the sensor straddles the seam") {
  const Box3D box = MakeBox(-10, 0, 0, 1, 1, 1);
  const Frustum f = FrustumOfBox(box);
  CHECK(f.theta_hi - f.theta_lo == doctest::Approx(2 * std::atan(0.5 / 9.5)));
  CHECK(f.Contains(ToSpherical({-10, 0.01, 0, 0})));
  CHECK(f.Contains(ToSpherical({-10, -0.01, 0, 0})));
  CHECK_FALSE(f.Contains(ToSpherical({10, 0, 0, 0})));
}

TEST_CASE("frustum shrinks as the box moves out along its ray") {
  const Box3D near = MakeBox(8, 3, -0.5, 3.9, 1.6, 1.5, 0.4);
  Box3D far = near;
  far.cx *= 2;
  far.cy *= 2;
  far.cz *= 2;
  const Frustum a = FrustumOfBox(near);
  const Frustum b = FrustumOfBox(far);
  CHECK(b.theta_lo >= a.theta_lo);
  CHECK(b.theta_hi <= a.theta_hi);
  CHECK(b.phi_lo >= a.phi_lo);
  CHECK(b.phi_hi <= a.phi_hi);
  CHECK_THROWS_AS(FrustumOfBox(MakeBox(0, 0, 5, 1, 1, 1)), Error);
}

TEST_CASE("frustum_dropout edge probabilities") {
  Rng rng(2);
  const Box3D box = MakeBox(12, -2, -0.9, 3.9, 1.6, 1.5, 0.3);
  const PointCloud cloud = MixedCloud(box, 500, rng);
  CHECK(FrustumDropout(cloud, box, 0.0, rng) == cloud);
  const PointCloud emptied = FrustumDropout(cloud, box, 1.0, rng);
  CHECK(emptied.size() == cloud.size() - 500);
  for (const LidarPoint& p : emptied) CHECK_FALSE(PointInBox(box, p));
}

TEST_CASE("frustum_dropout survival fraction is binomial") {
  Rng rng(3);
  const Box3D box = MakeBox(12, -2, -0.9, 3.9, 1.6, 1.5, 0.3);
  const std::size_t n = 10000;
  const PointCloud cloud = MixedCloud(box, n, rng);
  const PointCloud out = FrustumDropout(cloud, box, 0.5, rng);
  std::size_t survivors = 0;
  for (const LidarPoint& p : out) survivors += PointInBox(box, p) ? 1 : 0;
  const double fraction = static_cast<double>(survivors) / n;
  CHECK(std::abs(fraction - 0.5) <= Binomial99(0.5, n));
  // Points outside the box come through untouched and in order.
  PointCloud outside_in, outside_out;
  for (const LidarPoint& p : cloud) if (!PointInBox(box, p)) outside_in.push_back(p);
  for (const LidarPoint& p : out) if (!PointInBox(box, p)) outside_out.push_back(p);
  CHECK(outside_in == outside_out);
}

TEST_CASE("frustum_noise") {
  Rng rng(4);
  const Box3D box = MakeBox(15, 4, -0.9, 3.9, 1.6, 1.5, -0.6);
  const std::size_t n = 10000;
  const PointCloud cloud = MixedCloud(box, n, rng);
  CHECK(FrustumNoise(cloud, box, 0.0, rng) == cloud);

  const PointCloud noisy = FrustumNoise(cloud, box, 0.02, rng);
  REQUIRE(noisy.size() == cloud.size());
  double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const double d[3] = {noisy[i].x - cloud[i].x, noisy[i].y - cloud[i].y,
                         noisy[i].z - cloud[i].z};
    for (int k = 0; k < 3; ++k) {
      sum[k] += d[k];
      sq[k] += d[k] * d[k];
    }
    CHECK(noisy[i].intensity == cloud[i].intensity);
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    const double sd = std::sqrt(sq[k] / n - mean * mean);
    CHECK(sd == doctest::Approx(0.02).epsilon(0.10));
  }
  for (std::size_t i = n; i < cloud.size(); ++i) {
    CHECK(std::memcmp(&noisy[i], &cloud[i], sizeof(LidarPoint)) == 0);
  }
}

TEST_CASE("random_drop") {
  Rng rng(5);
  const Box3D box = MakeBox(20, 0, -0.9, 3.9, 1.6, 1.5, 1.2);
  const std::size_t n = 10000;
  const PointCloud cloud = MixedCloud(box, n, rng);
  CHECK(RandomDrop(cloud, box, 0.0, rng) == cloud);
  CHECK(RandomDrop(cloud, box, 1.0, rng).size() == cloud.size() - n);

  const PointCloud out = RandomDrop(cloud, box, 0.3, rng);
  std::size_t survivors = 0;
  for (const LidarPoint& p : out) survivors += PointInBox(box, p) ? 1 : 0;
  CHECK(std::abs(static_cast<double>(survivors) / n - 0.7) <= Binomial99(0.7, n));

  Rng a(6), b(6);
  CHECK(RandomDrop(cloud, box, 0.3, a) == RandomDrop(cloud, box, 0.3, b));
}

TEST_CASE("global_transform examples") {
  const PointCloud cloud = {{1, 0, 0, 0.5}, {3, -2, 1, 0.1}};
  const std::vector<LabeledBox> boxes = {{"Car", MakeBox(5, 1, -0.9, 3.9, 1.6, 1.5, 0.3)}};

  const auto [same, same_boxes] = GlobalTransform(cloud, boxes, {});
  CHECK(same == cloud);
  CHECK(same_boxes[0].box == boxes[0].box);

  GlobalTransformSpec flip;
  flip.flip_y = true;
  const auto [once, once_boxes] = GlobalTransform(cloud, boxes, flip);
  CHECK(once[1].y == 2.0);
  CHECK(once_boxes[0].box.yaw == doctest::Approx(-0.3));
  const auto [twice, twice_boxes] = GlobalTransform(once, once_boxes, flip);
  CHECK(twice == cloud);
  CHECK(twice_boxes[0].box.yaw == doctest::Approx(0.3));

  GlobalTransformSpec rotate;
  rotate.rotation = kPi / 2;
  const auto [rotated, rotated_boxes] = GlobalTransform(cloud, boxes, rotate);
  CHECK(std::abs(rotated[0].x) < 1e-15);
  CHECK(rotated[0].y == doctest::Approx(1.0));
  CHECK(rotated_boxes[0].box.yaw == doctest::Approx(0.3 + kPi / 2));

  GlobalTransformSpec scale;
  scale.scale = 1.1;
  const auto [scaled, scaled_boxes] = GlobalTransform(cloud, boxes, scale);
  CHECK(scaled[1].z == doctest::Approx(1.1));
  CHECK(scaled_boxes[0].box.l == doctest::Approx(3.9 * 1.1));
}

TEST_CASE("global_transform preserves in-box membership") {
  Rng rng(7);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> scale(0.9, 1.1);
  std::bernoulli_distribution coin(0.5);
  const Box3D box = MakeBox(12, -3, -0.9, 3.9, 1.6, 1.5, 0.8);
  const PointCloud cloud = MixedCloud(box, 1000, rng);
  for (int trial = 0; trial < 20; ++trial) {
    GlobalTransformSpec spec;
    spec.flip_y = coin(rng);
    spec.rotation = angle(rng);
    spec.scale = scale(rng);
    spec.tx = 0.3;
    const auto [moved, moved_boxes] = GlobalTransform(cloud, {{"Car", box}}, spec);
    for (std::size_t i = 0; i < 1000; ++i) {
      REQUIRE(PointInBox(moved_boxes[0].box, moved[i]));
    }
    REQUIRE(moved_boxes[0].box.yaw >= -kPi);
    REQUIRE(moved_boxes[0].box.yaw < kPi);
  }
}

TEST_CASE("sample_global_transform stays within its ranges") {
  Rng rng(8);
  GlobalAugmentConfig config;
  int flips = 0;
  for (int i = 0; i < 2000; ++i) {
    const GlobalTransformSpec spec = SampleGlobalTransform(config, rng);
    REQUIRE(spec.rotation >= config.rotation_min);
    REQUIRE(spec.rotation <= config.rotation_max);
    REQUIRE(spec.scale >= config.scale_min);
    REQUIRE(spec.scale <= config.scale_max);
    REQUIRE(spec.tx == 0.0);
    flips += spec.flip_y;
  }
  CHECK(std::abs(flips / 2000.0 - 0.5) <= Binomial99(0.5, 2000));
}
