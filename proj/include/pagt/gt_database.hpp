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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pagt/geometry.hpp"
#include "pagt/kitti.hpp"
#include "pagt/random.hpp"

namespace pagt {

inline const std::vector<std::string>& DefaultClasses() {
  static const std::vector<std::string> kClasses = {"Car", "Pedestrian",
                                                    "Cyclist"};
  return kClasses;
}

// A stored annotated object: its box plus the scan points inside it.
struct GtObject {
  std::string class_name;
  Box3D box;
  PointCloud points;
  std::string source_frame;

  std::size_t num_points() const { return points.size(); }
  double distance() const { return box.Distance(); }
};

struct LabeledBox {
  std::string class_name;
  Box3D box;
};

// One parsed training frame.
struct FrameData {
  std::string id;
  PointCloud cloud;
  std::vector<kitti::Label> labels;
  kitti::CalibSet calib;
};

struct DatabaseMetadata {
  std::string split_name;
  std::string build_timestamp;
};

// Per-class collections of ground-truth objects. Class order is lexicographic
// and the object order within a class follows insertion.
class GtDatabase {
 public:
  GtDatabase() = default;
  explicit GtDatabase(DatabaseMetadata metadata)
      : metadata_(std::move(metadata)) {}

  void Add(GtObject object);

  const std::vector<GtObject>& Objects(const std::string& class_name) const;
  std::vector<std::string> ClassNames() const;
  std::map<std::string, std::size_t> ClassCounts() const;
  std::size_t TotalCount() const;
  bool Empty() const { return TotalCount() == 0; }

  const DatabaseMetadata& metadata() const { return metadata_; }
  DatabaseMetadata& metadata() { return metadata_; }

  // Copy holding only objects with at least the configured number of points.
  // Classes missing from the map are kept unfiltered.
  GtDatabase FilterByMinPoints(
      const std::map<std::string, std::size_t>& min_points) const;

  // Writes index.json plus one gt_<class>.bin blob per class into `dir`.
  void Save(const std::filesystem::path& dir) const;
  static GtDatabase Load(const std::filesystem::path& dir);

 private:
  DatabaseMetadata metadata_;
  std::map<std::string, std::vector<GtObject>> objects_;
};

// Extracts every labeled object of the given classes. Frames may be processed
// concurrently on `workers` threads; objects are merged in frame-id order.
GtDatabase BuildDatabase(std::span<const FrameData> frames,
                         const std::vector<std::string>& classes,
                         DatabaseMetadata metadata = {},
                         std::size_t workers = 1);

// Draws `count` objects uniformly without replacement. When `count` exceeds
// the class size, the collection is reshuffled after each full pass.
std::vector<GtObject> SampleObjects(const GtDatabase& db,
                                    const std::string& class_name,
                                    std::size_t count, Rng& rng);

struct InsertResult {
  PointCloud cloud;
  std::vector<LabeledBox> boxes;
  std::size_t accepted = 0;
  // Per candidate, in input order.
  std::vector<bool> accepted_mask;
};

// Pastes candidates into the frame in order. A candidate whose footprint
// overlaps any existing or previously accepted box is skipped; otherwise the
// scene points in its footprint column are removed and its points appended.
InsertResult InsertObjects(const PointCloud& frame_cloud,
                           const std::vector<LabeledBox>& frame_boxes,
                           std::span<const GtObject> candidates);

// Non-DontCare labels of a frame converted into the sensor frame.
std::vector<LabeledBox> FrameBoxes(const FrameData& frame);

}  // namespace pagt
