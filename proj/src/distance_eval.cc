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

#include "pagt/distance_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "pagt/errors.hpp"

namespace pagt {
namespace {

enum class Outcome { kFalsePositive, kTruePositive, kIgnored };

std::vector<std::size_t> ScoreOrder(std::span<const Detection> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });
  return order;
}

// Best unmatched ground truth for `det` among those with the requested
// ignore status, provided its IoU reaches the threshold.
std::optional<std::size_t> BestMatch(const Detection& det,
                                     std::span<const GroundTruth> gts,
                                     const std::vector<bool>& matched,
                                     const std::vector<bool>* ignored,
                                     bool want_ignored, double threshold) {
  std::optional<std::size_t> best;
  double best_iou = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (matched[g]) continue;
    const bool is_ignored = ignored != nullptr && (*ignored)[g];
    if (is_ignored != want_ignored) continue;
    const double iou = Iou3d(det.box, gts[g].box);
    if (iou >= threshold && iou > best_iou) {
      best_iou = iou;
      best = g;
    }
  }
  return best;
}

std::vector<Outcome> Match(std::span<const Detection> detections,
                           std::span<const GroundTruth> gts, double threshold,
                           const std::vector<bool>* ignored,
                           std::vector<bool>& matched,
                           std::vector<std::optional<std::size_t>>& assignment) {
  std::vector<Outcome> outcomes(detections.size(), Outcome::kFalsePositive);
  matched.assign(gts.size(), false);
  assignment.assign(detections.size(), std::nullopt);
  for (std::size_t d : ScoreOrder(detections)) {
    if (auto g = BestMatch(detections[d], gts, matched, ignored, false,
                           threshold)) {
      matched[*g] = true;
      assignment[d] = g;
      outcomes[d] = Outcome::kTruePositive;
    } else if (ignored != nullptr) {
      if (auto ig = BestMatch(detections[d], gts, matched, ignored, true,
                              threshold)) {
        matched[*ig] = true;
        assignment[d] = ig;
        outcomes[d] = Outcome::kIgnored;
      }
    }
  }
  return outcomes;
}

}  // namespace

std::optional<std::size_t> BinEdges::BinOf(double value) const {
  if (edges.size() < 2 || value < edges.front() || value > edges.back()) {
    return std::nullopt;
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  const auto index = static_cast<std::size_t>(it - edges.begin());
  return std::min(index, edges.size() - 1) - 1;
}

std::vector<long> BinEdges::Rounded() const {
  std::vector<long> rounded;
  for (double e : edges) rounded.push_back(std::lround(e));
  return rounded;
}

BinEdges EqualElementEdges(std::span<const double> distances,
                           std::size_t bins) {
  if (bins < 1) throw Error(ErrorKind::kInvalidArgument, "need at least 1 bin");
  if (distances.size() < bins) {
    throw Error(ErrorKind::kTooFewSamples,
                std::to_string(distances.size()) + " samples for " +
                    std::to_string(bins) + " bins");
  }
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  BinEdges result;
  result.edges.reserve(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    const double position =
        static_cast<double>(k) * static_cast<double>(n - 1) / bins;
    const auto lower = static_cast<std::size_t>(std::floor(position));
    const std::size_t upper = std::min(lower + 1, n - 1);
    const double fraction = position - static_cast<double>(lower);
    result.edges.push_back(sorted[lower] +
                           fraction * (sorted[upper] - sorted[lower]));
  }
  for (std::size_t k = 1; k < result.edges.size(); ++k) {
    if (!(result.edges[k] > result.edges[k - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "tied distances collapse bin " + std::to_string(k - 1));
    }
  }
  return result;
}

std::vector<std::size_t> BinCounts(std::span<const double> distances,
                                   const BinEdges& edges) {
  std::vector<std::size_t> counts(edges.BinCount(), 0);
  for (double d : distances) {
    if (auto bin = edges.BinOf(d)) ++counts[*bin];
  }
  return counts;
}

std::vector<double> NormalizedHistogram(std::span<const double> distances,
                                        const BinEdges& edges) {
  const std::vector<std::size_t> counts = BinCounts(distances, edges);
  std::vector<double> heights(counts.size(), 0.0);
  if (distances.empty()) return heights;
  const auto n = static_cast<double>(distances.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double width = edges.edges[i + 1] - edges.edges[i];
    heights[i] = static_cast<double>(counts[i]) / (n * width);
  }
  return heights;
}

MatchResult MatchDetections(std::span<const Detection> detections,
                            std::span<const GroundTruth> gts,
                            double iou_threshold) {
  MatchResult result;
  const std::vector<Outcome> outcomes = Match(
      detections, gts, iou_threshold, nullptr, result.gt_matched, result.assignment);
  result.detection_flags.reserve(outcomes.size());
  for (Outcome o : outcomes) {
    result.detection_flags.push_back(o == Outcome::kTruePositive
                                         ? MatchFlag::kTruePositive
                                         : MatchFlag::kFalsePositive);
  }
  return result;
}

std::vector<double> RecallPositions(std::size_t count) {
  std::vector<double> positions;
  positions.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    positions.push_back(static_cast<double>(i) / static_cast<double>(count));
  }
  return positions;
}

std::optional<double> AveragePrecision(std::span<const MatchFlag> flags,
                                       std::size_t num_gt,
                                       std::span<const double> recall_positions) {
  if (num_gt == 0) return std::nullopt;
  if (recall_positions.empty()) return 0.0;
  const std::size_t n = flags.size();
  std::vector<double> recall(n);
  std::vector<double> best_precision_after(n + 1, 0.0);
  std::size_t tp = 0;
  std::vector<double> precision(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (flags[k] == MatchFlag::kTruePositive) ++tp;
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = n; k-- > 0;) {
    best_precision_after[k] = std::max(best_precision_after[k + 1], precision[k]);
  }
  double sum = 0.0;
  for (double r : recall_positions) {
    // Recall is non-decreasing along the ranked list.
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    sum += best_precision_after[static_cast<std::size_t>(it - recall.begin())];
  }
  return 100.0 * sum / static_cast<double>(recall_positions.size());
}

std::vector<ScoredFlag> CollectFlags(std::span<const Detection> detections,
                                     std::span<const GroundTruth> gts,
                                     double iou_threshold,
                                     const std::vector<bool>* ignored) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      groups;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    groups[{detections[d].frame, detections[d].class_name}].first.push_back(d);
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    groups[{gts[g].frame, gts[g].class_name}].second.push_back(g);
  }

  std::vector<ScoredFlag> flags;
  for (const auto& [key, members] : groups) {
    const auto& [det_idx, gt_idx] = members;
    if (det_idx.empty()) continue;
    std::vector<Detection> dets;
    for (std::size_t d : det_idx) dets.push_back(detections[d]);
    std::vector<GroundTruth> group_gts;
    std::vector<bool> group_ignored;
    for (std::size_t g : gt_idx) {
      group_gts.push_back(gts[g]);
      group_ignored.push_back(ignored != nullptr && (*ignored)[g]);
    }
    std::vector<bool> matched;
    std::vector<std::optional<std::size_t>> assignment;
    const std::vector<Outcome> outcomes =
        Match(dets, group_gts, iou_threshold,
              ignored != nullptr ? &group_ignored : nullptr, matched, assignment);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (outcomes[i] == Outcome::kIgnored) continue;
      flags.push_back({dets[i].score, outcomes[i] == Outcome::kTruePositive
                                          ? MatchFlag::kTruePositive
                                          : MatchFlag::kFalsePositive});
    }
  }
  std::stable_sort(flags.begin(), flags.end(),
                   [](const ScoredFlag& a, const ScoredFlag& b) {
                     return a.score > b.score;
                   });
  return flags;
}

namespace {

std::optional<double> ApOfFlags(const std::vector<ScoredFlag>& scored,
                                std::size_t num_gt, std::size_t recall_count) {
  std::vector<MatchFlag> flags;
  flags.reserve(scored.size());
  for (const ScoredFlag& s : scored) flags.push_back(s.flag);
  const std::vector<double> positions = RecallPositions(recall_count);
  return AveragePrecision(flags, num_gt, positions);
}

}  // namespace

EvalReport ApByBin(std::span<const Detection> detections,
                   std::span<const GroundTruth> gts, const BinEdges& edges,
                   double iou_threshold, std::size_t recall_count) {
  EvalReport report;
  report.recall_positions = recall_count;
  const std::size_t bins = edges.BinCount();
  std::vector<std::vector<Detection>> bin_dets(bins);
  std::vector<std::vector<GroundTruth>> bin_gts(bins);
  for (const Detection& d : detections) {
    if (auto b = edges.BinOf(d.box.Distance())) bin_dets[*b].push_back(d);
  }
  for (const GroundTruth& g : gts) {
    if (auto b = edges.BinOf(g.box.Distance())) bin_gts[*b].push_back(g);
  }
  for (std::size_t b = 0; b < bins; ++b) {
    BinResult bin;
    bin.lo = edges.edges[b];
    bin.hi = edges.edges[b + 1];
    bin.num_gt = bin_gts[b].size();
    bin.num_detections = bin_dets[b].size();
    bin.ap = ApOfFlags(CollectFlags(bin_dets[b], bin_gts[b], iou_threshold),
                       bin.num_gt, recall_count);
    report.bins.push_back(bin);
  }
  report.overall_gt = gts.size();
  report.overall_ap = ApOfFlags(CollectFlags(detections, gts, iou_threshold),
                                gts.size(), recall_count);
  for (kitti::Difficulty level :
       {kitti::Difficulty::kEasy, kitti::Difficulty::kModerate,
        kitti::Difficulty::kHard}) {
    report.difficulty_ap[level] =
        DifficultyAp(detections, gts, level, iou_threshold, recall_count);
  }
  return report;
}

std::optional<double> DifficultyAp(std::span<const Detection> detections,
                                   std::span<const GroundTruth> gts,
                                   kitti::Difficulty level,
                                   double iou_threshold,
                                   std::size_t recall_count) {
  std::vector<bool> ignored(gts.size());
  std::size_t care = 0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    ignored[g] = static_cast<int>(gts[g].difficulty) > static_cast<int>(level);
    if (!ignored[g]) ++care;
  }
  return ApOfFlags(CollectFlags(detections, gts, iou_threshold, &ignored), care,
                   recall_count);
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double Skewness(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = Mean(values);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  const auto n = static_cast<double>(values.size());
  m2 /= n;
  m3 /= n;
  if (m2 == 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

}  // namespace pagt
