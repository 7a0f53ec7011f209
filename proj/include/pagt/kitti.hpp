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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pagt/geometry.hpp"

namespace pagt::kitti {

// One object row of a KITTI label (or result) file. Dimensions follow the
// camera-frame convention of the file: height, width, length.
struct Label {
  std::string class_name;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox2d{};  // left, top, right, bottom (pixels)
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  double x = 0.0;  // bottom center, rectified camera frame
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;
  // Present only in detection result files.
  std::optional<double> score;

  bool IsDontCare() const { return class_name == "DontCare"; }
  double BoxHeightPixels() const { return bbox2d[3] - bbox2d[1]; }

  bool operator==(const Label&) const = default;
};

struct CalibSet {
  Eigen::Matrix<double, 3, 4> p2 = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix3d r0_rect = Eigen::Matrix3d::Identity();
  Eigen::Matrix<double, 3, 4> tr_velo_to_cam =
      Eigen::Matrix<double, 3, 4>::Zero();

  // Velodyne point -> rectified camera point.
  Eigen::Vector3d VeloToRect(const Eigen::Vector3d& velo) const;
  Eigen::Vector3d RectToVelo(const Eigen::Vector3d& rect) const;
  // Projects a rectified camera point onto the image plane of camera 2.
  Eigen::Vector2d ProjectRect(const Eigen::Vector3d& rect) const;
};

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2, kExcluded = 3 };

std::string_view DifficultyName(Difficulty difficulty);

enum class FloatFormat {
  kKitti,  // two decimals, as written by the KITTI tooling
  kExact,  // shortest representation that round-trips
};

// Velodyne scans: a flat array of little-endian float32 (x, y, z, intensity).
PointCloud ReadPointCloud(std::span<const std::byte> bytes);
std::vector<std::byte> WritePointCloud(const PointCloud& cloud);

PointCloud ReadPointCloudFile(const std::filesystem::path& path);
void WritePointCloudFile(const std::filesystem::path& path,
                         const PointCloud& cloud);

// Label files hold 15 whitespace-separated fields per line; result files add
// a trailing score.
std::vector<Label> ParseLabels(std::string_view text);
std::vector<Label> ParseDetections(std::string_view text);
std::string SerializeLabels(std::span<const Label> labels,
                            FloatFormat format = FloatFormat::kKitti);

CalibSet ParseCalib(std::string_view text);
std::string SerializeCalib(const CalibSet& calib);

// Camera-frame label -> gravity-aligned box centered on its volume in the
// velodyne frame.
Box3D LabelToLidarBox(const Label& label, const CalibSet& calib);

// Inverse of LabelToLidarBox. Geometry fields (location, dims, rotation_y)
// are recomputed; alpha and the 2D box are derived by projecting the box
// through P2. Truncation and occlusion are left at zero.
Label LidarBoxToLabel(const Box3D& box, std::string class_name,
                      const CalibSet& calib);

Difficulty DifficultyOf(const Label& label);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace pagt::kitti
