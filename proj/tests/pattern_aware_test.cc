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
#include <random>
#include <set>

#include <doctest.h>

#include "fixtures.hpp"
#include "pagt/errors.hpp"
#include "pagt/kitti.hpp"
#include "pagt/pattern_aware.hpp"

using namespace pagt;
using pagt::testing::MakeBox;
using pagt::testing::PointsInside;

namespace {

// Point at the center of slice (ia, ip), at horizontal distance d.
LidarPoint SliceCenterPoint(const AngularGrid& grid, int ia, int ip, double d) {
  const double theta = grid.theta_min + (ia + 0.5) * grid.AzimuthWidth();
  const double phi = grid.phi_min + (ip + 0.5) * grid.PolarWidth();
  return {d * std::cos(theta), d * std::sin(theta), d * std::tan(phi), 0.5};
}

int SliceOfAzimuth(const AngularGrid& grid, double theta) {
  return static_cast<int>(std::floor((theta - grid.theta_min) / grid.AzimuthWidth()));
}
int SliceOfPolar(const AngularGrid& grid, double phi) {
  return static_cast<int>(std::floor((phi - grid.phi_min) / grid.PolarWidth()));
}

PatternAwareConfig AlwaysApply() {
  PatternAwareConfig config;
  config.apply_probability = 1.0;
  return config;
}

}  // namespace

TEST_CASE("slice_index examples") {
  const AngularGrid grid;
  CHECK(SliceOf({1, 1, grid.theta_min, grid.phi_min}, grid) == SliceIndex{0, 0});
  const double mid_theta = 0.5 * (grid.theta_min + grid.theta_max);
  const double mid_phi = 0.5 * (grid.phi_min + grid.phi_max);
  CHECK(SliceOf({1, 1, mid_theta, mid_phi}, grid) ==
        SliceIndex{grid.azimuth_divisions / 2, grid.polar_divisions / 2});
  const SliceIndex last = SliceOf({1, 1, std::nextafter(grid.theta_max, 0.0),
                                   std::nextafter(grid.phi_max, 0.0)},
                                  grid);
  CHECK(last.azimuth == grid.azimuth_divisions - 1);
  CHECK(last.polar == grid.polar_divisions - 1);
}

TEST_CASE("slice_index rejects angles outside the grid") {
  const AngularGrid grid;
  try {
    SliceOf({1, 1, 0.0, 10.0 * kDegToRad}, grid);
    FAIL("expected OutOfGrid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kOutOfGrid);
  }
  CHECK_THROWS_AS(SliceOf({1, 1, 0.0, grid.phi_max}, grid), Error);
  CHECK_THROWS_AS(SliceOf({1, 1, 0.0, -30.0 * kDegToRad}, grid), Error);
}

TEST_CASE("slice_index spreads uniform angles evenly") {
  AngularGrid grid;
  grid.azimuth_divisions = 16;
  grid.polar_divisions = 8;
  Rng rng(1);
  std::uniform_real_distribution<double> theta(grid.theta_min, grid.theta_max);
  std::uniform_real_distribution<double> phi(grid.phi_min, grid.phi_max);
  std::vector<int> counts(16 * 8, 0);
  const int n = 128000;
  for (int i = 0; i < n; ++i) {
    const SliceIndex s = SliceOf({1, 1, theta(rng), phi(rng)}, grid);
    ++counts[s.polar * 16 + s.azimuth];
  }
  const double expected = n / 128.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 127 degrees of freedom, 99.9% quantile about 181.
  CHECK(chi2 < 181.0);
}

TEST_CASE("grid and config validation") {
  AngularGrid grid;
  CHECK_NOTHROW(grid.Validate());
  grid.azimuth_divisions = 1;
  CHECK_THROWS_AS(grid.Validate(), Error);
  grid = AngularGrid{};
  grid.phi_max = grid.phi_min;
  CHECK_THROWS_AS(grid.Validate(), Error);

  PatternAwareConfig config;
  CHECK_NOTHROW(config.Validate());
  config.apply_probability = 1.5;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = PatternAwareConfig{};
  config.relocation_factor = 1.0;
  CHECK_THROWS_AS(config.Validate(), Error);
  config.relocation_factor = 2.5;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = PatternAwareConfig{};
  config.relocated_min = 80;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = PatternAwareConfig{};
  config.min_points["Car"] = 0;
  CHECK_THROWS_AS(config.Validate(), Error);
  CHECK(PatternAwareConfig{}.MinPointsFor("Van") == 1);
  CHECK(PatternAwareConfig{}.MinPointsFor("Pedestrian") == 200);
}

TEST_CASE("downsample_pattern examples") {
  const AngularGrid grid;
  PointCloud even, odd;
  for (int i = 0; i < 5; ++i) {
    even.push_back(SliceCenterPoint(grid, 0, 0, 10.0 + i));
    odd.push_back(SliceCenterPoint(grid, 1, 1, 10.0 + i));
  }
  CHECK(DownsamplePattern(even, grid) == even);
  CHECK(DownsamplePattern(odd, grid).empty());
}

TEST_CASE("downsample_pattern keeps the even/even slices of a 4x4 block") {
  const AngularGrid grid;
  PointCloud block;
  for (int ia = 0; ia < 4; ++ia) {
    for (int ip = 0; ip < 4; ++ip) {
      block.push_back(SliceCenterPoint(grid, 256 + ia, 40 + ip, 12.0));
    }
  }
  const PointCloud kept = DownsamplePattern(block, grid);
  REQUIRE(kept.size() == 4);
  std::set<std::pair<int, int>> slices;
  for (const LidarPoint& p : kept) {
    const SphericalPoint s = ToSpherical(p);
    const SliceIndex idx = SliceOf(s, grid);
    CHECK(idx.azimuth % 2 == 0);
    CHECK(idx.polar % 2 == 0);
    slices.insert({idx.azimuth, idx.polar});
  }
  CHECK(slices == std::set<std::pair<int, int>>{{256, 40}, {256, 42}, {258, 40}, {258, 42}});
}

TEST_CASE("downsample_pattern preserves order, is a subset, and is stable") {
  const AngularGrid grid;
  Rng rng(2);
  const Box3D box = MakeBox(14, 3, -0.9, 3.9, 1.6, 1.5, 0.4);
  const PointCloud points = PointsInside(box, 3000, rng);
  const PointCloud kept = DownsamplePattern(points, grid);
  CHECK(kept.size() < points.size());
  std::size_t cursor = 0;
  for (const LidarPoint& p : kept) {
    while (cursor < points.size() && !(points[cursor] == p)) ++cursor;
    REQUIRE(cursor < points.size());
    ++cursor;
  }
  // Survivors all sit on even slices, so a second pass keeps them all.
  CHECK(DownsamplePattern(kept, grid) == kept);

  // Stride k keeps one slice in k along each axis.
  const PointCloud third = DownsamplePattern(points, grid, 3);
  for (const LidarPoint& p : third) {
    const SliceIndex idx = SliceOf(ToSpherical(p), grid);
    CHECK(idx.azimuth % 3 == 0);
    CHECK(idx.polar % 3 == 0);
  }
}

TEST_CASE("downsample_pattern matches an independent slice oracle") {
  const AngularGrid grid;
  Rng rng(3);
  std::uniform_real_distribution<double> coord(-40.0, 40.0);
  std::uniform_real_distribution<double> height(-1.5, 0.5);
  PointCloud points;
  for (int i = 0; i < 20000; ++i) points.push_back({coord(rng), coord(rng), height(rng), 0});
  PointCloud expected;
  for (const LidarPoint& p : points) {
    const double theta = std::atan2(p.y, p.x);
    const double phi = std::atan2(p.z, std::hypot(p.x, p.y));
    if (phi < grid.phi_min || phi >= grid.phi_max) continue;
    const int ia = std::min(SliceOfAzimuth(grid, theta), grid.azimuth_divisions - 1);
    const int ip = std::min(SliceOfPolar(grid, phi), grid.polar_divisions - 1);
    if (ia % 2 == 0 && ip % 2 == 0) expected.push_back(p);
  }
  PointCloud in_grid;
  for (const LidarPoint& p : points) {
    const double phi = std::atan2(p.z, std::hypot(p.x, p.y));
    if (phi >= grid.phi_min && phi < grid.phi_max) in_grid.push_back(p);
  }
  CHECK(DownsamplePattern(in_grid, grid) == expected);
  if (in_grid.size() < points.size()) {
    CHECK_THROWS_AS(DownsamplePattern(points, grid), Error);
  }
}

TEST_CASE("relocate_object examples") {
  const Box3D box = MakeBox(10, 0, -0.5, 3.9, 1.6, 1.5, 0.3);
  auto [moved, points] = RelocateObject(box, {}, 2.0);
  CHECK(moved.cx == doctest::Approx(20.0));
  CHECK(moved.cy == 0.0);
  CHECK(moved.cz == -0.5);
  CHECK(moved.yaw == box.yaw);
  CHECK(std::atan2(moved.cy, moved.cx) == 0.0);

  const Box3D oblique = MakeBox(6, 8, -1.0, 3.9, 1.6, 1.5, 1.0);
  const Box3D far = RelocateObject(oblique, {}, 2.0).first;
  CHECK(far.Distance() == doctest::Approx(20.0));
  CHECK(std::atan2(far.cy, far.cx) == doctest::Approx(std::atan2(8.0, 6.0)));
  CHECK(far.Bottom() == doctest::Approx(oblique.Bottom()));

  try {
    RelocateObject(MakeBox(0, 0, 0, 1, 1, 1), {}, 2.0);
    FAIL("expected DegenerateLocation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateLocation);
  }
}

TEST_CASE("relocate_object keeps box-frame offsets") {
  const Box3D box = MakeBox(12, -5, -0.9, 4, 2, 1.5, -0.7);
  const auto corners = Corners(box);
  const PointCloud points(corners.begin(), corners.end());
  const auto [moved, moved_points] = RelocateObject(box, points, 2.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const BoxFrameOffset before = ToBoxFrame(box, points[i].x, points[i].y, points[i].z);
    const BoxFrameOffset after =
        ToBoxFrame(moved, moved_points[i].x, moved_points[i].y, moved_points[i].z);
    CHECK(after.u == doctest::Approx(before.u));
    CHECK(after.v == doctest::Approx(before.v));
    CHECK(after.w == doctest::Approx(before.w));
  }
}

TEST_CASE("pattern_aware_sample relocates a dense car at 15 m to 30 m") {
  Rng rng(4);
  const Box3D box = MakeBox(15, 0, -0.98, 3.9, 1.6, 1.5, 0.0);
  const GtObject car{"Car", box, PointsInside(box, 2000, rng), "000000"};
  const PatternAwareResult result = PatternAwareSample(car, AlwaysApply(), rng);
  REQUIRE(result.outcome == SampleOutcome::kRelocated);
  CHECK(result.object.distance() == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(result.object.num_points() < car.num_points());
}

TEST_CASE("pattern_aware_sample rejects a car relocated past the range limit") {
  Rng rng(5);
  const Box3D box = MakeBox(40, 0, -0.98, 3.9, 1.6, 1.5, 0.0);
  const GtObject car{"Car", box, PointsInside(box, 2000, rng), "000000"};
  const PatternAwareResult result = PatternAwareSample(car, AlwaysApply(), rng);
  CHECK(result.outcome == SampleOutcome::kRejected);
  CHECK(result.object.box == car.box);
  CHECK(result.object.points == car.points);
}

TEST_CASE("pattern_aware_sample enforces per-class minimum points") {
  const AngularGrid grid;
  const double d = 12.0;
  const Box3D box = MakeBox(d, 0, -0.8, 0.8, 0.6, 1.8, 0.0);
  // Slice centers inside the box: one even/even and one odd/odd.
  std::optional<LidarPoint> even, odd;
  for (int ia = 250; ia < 262; ++ia) {
    for (int ip = 0; ip < grid.polar_divisions; ++ip) {
      const LidarPoint p = SliceCenterPoint(grid, ia, ip, d);
      if (!PointInBox(box, p)) continue;
      if (ia % 2 == 0 && ip % 2 == 0 && !even) even = p;
      if (ia % 2 == 1 && ip % 2 == 1 && !odd) odd = p;
    }
  }
  REQUIRE(even.has_value());
  REQUIRE(odd.has_value());
  auto pedestrian = [&](std::size_t survivors) {
    GtObject object{"Pedestrian", box, {}, "000000"};
    object.points.assign(survivors, *even);
    object.points.insert(object.points.end(), 100, *odd);
    return object;
  };
  Rng rng(6);
  const PatternAwareResult sparse = PatternAwareSample(pedestrian(150), AlwaysApply(), rng);
  CHECK(sparse.outcome == SampleOutcome::kRejected);
  const PatternAwareResult dense = PatternAwareSample(pedestrian(200), AlwaysApply(), rng);
  CHECK(dense.outcome == SampleOutcome::kRelocated);
  CHECK(dense.object.num_points() == 200);
}

TEST_CASE("pattern_aware_sample respects the apply probability") {
  Rng build(7);
  const Box3D box = MakeBox(15, 0, -0.98, 3.9, 1.6, 1.5, 0.0);
  const GtObject car{"Car", box, PointsInside(box, 500, build), "000000"};
  PatternAwareConfig config;
  Rng rng(8);
  const int n = 20000;
  int relocated = 0;
  for (int i = 0; i < n; ++i) {
    relocated += PatternAwareSample(car, config, rng).outcome == SampleOutcome::kRelocated;
  }
  // Binomial(20000, 0.4): sd about 69.
  CHECK(std::abs(relocated - 0.4 * n) < 4 * 69.3);

  config.apply_probability = 0.0;
  for (int i = 0; i < 100; ++i) {
    CHECK(PatternAwareSample(car, config, rng).outcome == SampleOutcome::kUnchanged);
  }
}

TEST_CASE("relocated objects satisfy the relocation invariants") {
  Rng rng(9);
  std::uniform_real_distribution<double> distance(8.0, 36.0);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  int relocated = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double d = distance(rng);
    const double a = angle(rng);
    const Box3D box = MakeBox(d * std::cos(a), d * std::sin(a), -0.98, 3.9, 1.6,
                              1.5, angle(rng));
    const GtObject car{"Car", box, PointsInside(box, 400, rng), "x"};
    const PatternAwareResult result = PatternAwareSample(car, AlwaysApply(), rng);
    if (result.outcome != SampleOutcome::kRelocated) continue;
    ++relocated;
    const Box3D& moved = result.object.box;
    REQUIRE(std::abs(moved.Distance() - 2.0 * d) < 1e-9);
    REQUIRE(std::abs(moved.Bottom() - box.Bottom()) < 1e-12);
    REQUIRE(moved.yaw == box.yaw);
    REQUIRE(moved.Distance() >= 20.0);
    REQUIRE(moved.Distance() <= 70.0);
    for (const LidarPoint& p : result.object.points) {
      const BoxFrameOffset o = ToBoxFrame(moved, p.x, p.y, p.z);
      REQUIRE(std::abs(o.u) <= moved.l / 2 + 1e-9);
      REQUIRE(std::abs(o.v) <= moved.w / 2 + 1e-9);
      REQUIRE(std::abs(o.w) <= moved.h / 2 + 1e-9);
    }
  }
  CHECK(relocated > 100);
}

namespace {

GtDatabase SyntheticDatabase(Rng& rng, double min_d, double max_d) {
  std::uniform_real_distribution<double> distance(min_d, max_d);
  std::uniform_real_distribution<double> angle(-0.5, 0.5);
  GtDatabase db;
  for (int i = 0; i < 40; ++i) {
    const double d = distance(rng);
    const double a = angle(rng);
    const Box3D box =
        MakeBox(d * std::cos(a), d * std::sin(a), -0.98, 3.9, 1.6, 1.5, angle(rng));
    db.Add({"Car", box, PointsInside(box, 300, rng), "db"});
  }
  return db;
}

// Plain ground-truth sampling with the same random stream as AugmentFrame:
// one uniform draw per sampled object.
InsertResult PlainSampling(const PointCloud& cloud, const std::vector<LabeledBox>& boxes,
                           const GtDatabase& db, const SamplingPlan& plan, Rng& rng) {
  std::vector<GtObject> candidates;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& [name, count] : plan) {
    for (GtObject& o : SampleObjects(db, name, count, rng)) {
      (void)unit(rng);
      candidates.push_back(std::move(o));
    }
  }
  return InsertObjects(cloud, boxes, candidates);
}

}  // namespace

TEST_CASE("augment_frame with probability 0 is plain ground-truth sampling") {
  Rng build(10);
  const GtDatabase db = SyntheticDatabase(build, 8, 40);
  const FrameData frame = pagt::testing::MakeFrame("000000", build);
  const std::vector<LabeledBox> boxes = FrameBoxes(frame);
  PatternAwareConfig config;
  config.apply_probability = 0.0;
  const SamplingPlan plan = {{"Car", 15}};
  Rng a(11), b(11);
  const AugmentedFrame augmented = AugmentFrame(frame.cloud, boxes, db, config, plan, a);
  const InsertResult plain = PlainSampling(frame.cloud, boxes, db, plan, b);
  CHECK(augmented.cloud == plain.cloud);
  CHECK(augmented.boxes.size() == plain.boxes.size());
  CHECK(augmented.stats.relocated == 0);
  CHECK(augmented.stats.sampled == 15);
  CHECK(augmented.stats.accepted + augmented.stats.collision_rejected == 15);
}

TEST_CASE("augment_frame falls back to the original objects when all are rejected") {
  Rng build(12);
  const GtDatabase db = SyntheticDatabase(build, 40, 60);
  const FrameData frame = pagt::testing::MakeFrame("000001", build);
  const std::vector<LabeledBox> boxes = FrameBoxes(frame);
  const SamplingPlan plan = {{"Car", 10}, {"Cyclist", 5}};
  Rng a(13), b(13);
  const AugmentedFrame augmented =
      AugmentFrame(frame.cloud, boxes, db, AlwaysApply(), plan, a);
  const InsertResult plain = PlainSampling(frame.cloud, boxes, db, {{"Car", 10}}, b);
  CHECK(augmented.cloud == plain.cloud);
  CHECK(augmented.stats.pattern_rejected == 10);
  CHECK(augmented.stats.relocated == 0);
}

TEST_CASE("augment_frame is deterministic and collision free") {
  Rng build(14);
  const GtDatabase db = SyntheticDatabase(build, 8, 40);
  const FrameData frame = pagt::testing::MakeFrame("000002", build);
  const std::vector<LabeledBox> boxes = FrameBoxes(frame);
  const PatternAwareConfig config;
  Rng a = FrameRng(5, "000002");
  Rng b = FrameRng(5, "000002");
  const AugmentedFrame first = AugmentFrame(frame.cloud, boxes, db, config, {{"Car", 15}}, a);
  const AugmentedFrame second = AugmentFrame(frame.cloud, boxes, db, config, {{"Car", 15}}, b);
  CHECK(kitti::WritePointCloud(first.cloud) == kitti::WritePointCloud(second.cloud));
  CHECK(first.original_box_count == boxes.size());
  for (std::size_t i = 0; i < first.boxes.size(); ++i) {
    CHECK(first.boxes[i].box == second.boxes[i].box);
    for (std::size_t j = i + 1; j < first.boxes.size(); ++j) {
      REQUIRE(BevOverlapArea(first.boxes[i].box, first.boxes[j].box) == 0.0);
    }
  }
}
