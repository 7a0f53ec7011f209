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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace pagt {

inline constexpr double kPi = 3.14159265358979323846;

// A single return in the sensor frame: x forward, y left, z up (meters).
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  bool operator==(const LidarPoint&) const = default;
};

using PointCloud = std::vector<LidarPoint>;

struct SphericalPoint {
  double r = 0.0;      // range
  double d = 0.0;      // horizontal range
  double theta = 0.0;  // azimuth in [-pi, pi)
  double phi = 0.0;    // elevation in [-pi/2, pi/2]
};

// Gravity-aligned oriented box in the sensor frame. (cx, cy, cz) is the
// volumetric center; l runs along the heading, w across it.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;
  double yaw = 0.0;

  bool operator==(const Box3D&) const = default;

  double Volume() const { return l * w * h; }
  double Bottom() const { return cz - 0.5 * h; }
  double Top() const { return cz + 0.5 * h; }
  // Horizontal distance of the center from the sensor.
  double Distance() const;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Wraps an angle into [-pi, pi).
double NormalizeAngle(double angle);

bool IsFinite(const LidarPoint& p);
// Throws MalformedCloud naming the first non-finite point.
void ValidateCloud(const PointCloud& cloud);
// Throws DegenerateBox when a dimension is not strictly positive or a field is
// not finite.
void ValidateBox(const Box3D& box);

SphericalPoint ToSpherical(const LidarPoint& p);
LidarPoint FromSpherical(const SphericalPoint& s, double intensity = 0.0);

// Point expressed in the box frame: rotated by -yaw about the box center.
struct BoxFrameOffset {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};
BoxFrameOffset ToBoxFrame(const Box3D& box, double x, double y, double z);

// Closed-box membership test.
bool PointInBox(const Box3D& box, const LidarPoint& p);
// Membership of the infinite vertical column over the box footprint.
bool PointInFootprint(const Box3D& box, const LidarPoint& p);

std::vector<std::size_t> PointsInBox(const PointCloud& cloud, const Box3D& box);

// Counter-clockwise footprint corners.
std::array<Vec2, 4> BevCorners(const Box3D& box);
// All eight corners, bottom face first (counter-clockwise), then the top face.
std::array<LidarPoint, 8> Corners(const Box3D& box);

// Intersection area of the two box footprints in the x-y plane.
double BevOverlapArea(const Box3D& a, const Box3D& b);
double Iou3d(const Box3D& a, const Box3D& b);

// Area of the intersection of two convex counter-clockwise polygons.
double ConvexIntersectionArea(std::span<const Vec2> subject,
                              std::span<const Vec2> clip);

}  // namespace pagt
