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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pagt/geometry.hpp"
#include "pagt/kitti.hpp"

namespace pagt {

struct BinEdges {
  // Strictly increasing, edges.size() == bins + 1.
  std::vector<double> edges;

  std::size_t BinCount() const { return edges.empty() ? 0 : edges.size() - 1; }
  // Half-open [e_i, e_{i+1}) except the last bin, which is closed.
  std::optional<std::size_t> BinOf(double value) const;
  // Edges rounded to whole meters, for table headers.
  std::vector<long> Rounded() const;
};

// Edges at the 0, 1/B, ..., 1 quantiles (linear interpolation between order
// statistics). Throws TooFewSamples when fewer than B values are given and
// InvalidArgument when ties collapse two edges.
BinEdges EqualElementEdges(std::span<const double> distances, std::size_t bins);

// height_i = count_i / (N * width_i), so every bin's area is its share of N.
std::vector<double> NormalizedHistogram(std::span<const double> distances,
                                        const BinEdges& edges);
std::vector<std::size_t> BinCounts(std::span<const double> distances,
                                   const BinEdges& edges);

struct Detection {
  Box3D box;
  double score = 0.0;
  std::string class_name;
  std::string frame;
};

struct GroundTruth {
  Box3D box;
  std::string class_name;
  std::string frame;
  kitti::Difficulty difficulty = kitti::Difficulty::kEasy;
};

enum class MatchFlag : std::uint8_t { kFalsePositive = 0, kTruePositive = 1 };

struct MatchResult {
  // Indexed like the input detections.
  std::vector<MatchFlag> detection_flags;
  std::vector<bool> gt_matched;
  // Index of the matched ground truth per detection, if any.
  std::vector<std::optional<std::size_t>> assignment;
};

// Greedy matching in descending score (ties keep input order): each
// detection takes the unmatched ground truth with the highest IoU if that IoU
// reaches the threshold. Callers pass a single frame and class.
MatchResult MatchDetections(std::span<const Detection> detections,
                            std::span<const GroundTruth> gts,
                            double iou_threshold);

// Recall positions {1/n, 2/n, ..., 1}.
std::vector<double> RecallPositions(std::size_t count = 40);

// Interpolated AP in percent. `flags` must be ordered by descending score.
// Returns nullopt when there is no ground truth to recall.
std::optional<double> AveragePrecision(std::span<const MatchFlag> flags,
                                       std::size_t num_gt,
                                       std::span<const double> recall_positions);

struct ScoredFlag {
  double score = 0.0;
  MatchFlag flag = MatchFlag::kFalsePositive;
};

// Matches every frame and class independently and returns the score-sorted
// flags; ground truths flagged in `ignored` may absorb detections without
// counting as a miss or producing a true positive.
std::vector<ScoredFlag> CollectFlags(std::span<const Detection> detections,
                                     std::span<const GroundTruth> gts,
                                     double iou_threshold,
                                     const std::vector<bool>* ignored = nullptr);

struct BinResult {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t num_gt = 0;
  std::size_t num_detections = 0;
  std::optional<double> ap;  // absent when the bin holds no ground truth
};

struct EvalReport {
  std::vector<BinResult> bins;
  std::optional<double> overall_ap;
  std::size_t overall_gt = 0;
  std::map<kitti::Difficulty, std::optional<double>> difficulty_ap;
  std::size_t recall_positions = 40;
};

// Bins every ground truth and every detection by its own horizontal center
// distance and evaluates each bin independently. No difficulty filter is
// applied; items outside the edges are dropped.
EvalReport ApByBin(std::span<const Detection> detections,
                   std::span<const GroundTruth> gts, const BinEdges& edges,
                   double iou_threshold, std::size_t recall_count = 40);

// Standard cumulative difficulty AP: ground truths harder than `level` are
// ignored, and detections matching only ignored ones are discarded.
std::optional<double> DifficultyAp(std::span<const Detection> detections,
                                   std::span<const GroundTruth> gts,
                                   kitti::Difficulty level,
                                   double iou_threshold,
                                   std::size_t recall_count = 40);

// Sample skewness m3 / m2^(3/2) using population moments.
double Skewness(std::span<const double> values);
double Mean(std::span<const double> values);

}  // namespace pagt
