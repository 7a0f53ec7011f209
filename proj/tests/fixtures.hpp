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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pagt/geometry.hpp"
#include "pagt/gt_database.hpp"
#include "pagt/kitti.hpp"
#include "pagt/random.hpp"

namespace pagt::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

Box3D MakeBox(double cx, double cy, double cz, double l, double w, double h,
              double yaw = 0.0);

// KITTI-like intrinsics, identity rectification and the canonical
// velodyne->camera axis permutation with a small offset.
kitti::CalibSet FixtureCalib();

// Points drawn uniformly inside the box.
PointCloud PointsInside(const Box3D& box, std::size_t count, Rng& rng);

// A frame with a flat ground patch and a few non-overlapping objects whose
// point counts shrink with distance.
FrameData MakeFrame(const std::string& id, Rng& rng);

struct FixtureDataset {
  std::filesystem::path root;
  std::filesystem::path split_file;
  std::vector<std::string> ids;
};

// Writes velodyne/, label_2/, calib/ and a split file under `root`.
FixtureDataset WriteFixtureDataset(const std::filesystem::path& root,
                                   std::size_t frames, std::uint64_t seed);

// Writes config.json under `dir` and returns its path. `extra` is spliced
// into the top-level JSON object (without a leading comma).
std::filesystem::path WriteConfig(const std::filesystem::path& dir,
                                  const FixtureDataset& data,
                                  const std::string& extra = "");

std::string ReadBytes(const std::filesystem::path& path);

}  // namespace pagt::testing
