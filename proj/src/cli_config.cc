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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pagt/cli.hpp"

namespace pagt::cli {
namespace {

using nlohmann::json;

[[noreturn]] void Invalid(const std::string& message) {
  throw Error(ErrorKind::kInvalidConfig, message);
}

void CheckKeys(const json& block, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!block.is_object()) Invalid(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : block.items()) {
    if (!keys.contains(key)) Invalid("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void Read(const json& block, const char* key, T& target,
          const std::string& where) {
  if (!block.contains(key)) return;
  try {
    target = block.at(key).get<T>();
  } catch (const json::exception&) {
    Invalid(where + "." + key + " has the wrong type");
  }
}

void ReadRange(const json& block, const char* key, double& lo, double& hi,
               const std::string& where) {
  if (!block.contains(key)) return;
  const json& value = block.at(key);
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
      !value[1].is_number()) {
    Invalid(where + "." + key + " must be a two-number array");
  }
  lo = value[0].get<double>();
  hi = value[1].get<double>();
}

void ReadPath(const json& block, const char* key,
              std::filesystem::path& target,
              const std::filesystem::path& base_dir) {
  std::string text;
  Read(block, key, text, "config");
  if (text.empty()) return;
  std::filesystem::path p(text);
  target = p.is_absolute() ? p : base_dir / p;
}

void ParsePatternAware(const json& block, RunConfig& config) {
  const std::string where = "pattern_aware";
  CheckKeys(block, where,
            {"enabled", "azimuth_divisions", "polar_divisions",
             "azimuth_range_deg", "polar_range_deg", "probability",
             "relocation_factor", "min_points", "relocated_range"});
  PatternAwareConfig& pa = config.pattern_aware;
  Read(block, "enabled", config.pattern_aware_enabled, where);
  Read(block, "azimuth_divisions", pa.grid.azimuth_divisions, where);
  Read(block, "polar_divisions", pa.grid.polar_divisions, where);
  double lo = pa.grid.theta_min / kDegToRad;
  double hi = pa.grid.theta_max / kDegToRad;
  ReadRange(block, "azimuth_range_deg", lo, hi, where);
  pa.grid.theta_min = lo * kDegToRad;
  pa.grid.theta_max = hi * kDegToRad;
  lo = pa.grid.phi_min / kDegToRad;
  hi = pa.grid.phi_max / kDegToRad;
  ReadRange(block, "polar_range_deg", lo, hi, where);
  pa.grid.phi_min = lo * kDegToRad;
  pa.grid.phi_max = hi * kDegToRad;
  Read(block, "probability", pa.apply_probability, where);
  Read(block, "relocation_factor", pa.relocation_factor, where);
  Read(block, "min_points", pa.min_points, where);
  ReadRange(block, "relocated_range", pa.relocated_min, pa.relocated_max, where);
}

void ParseGtSampling(const json& block, RunConfig& config) {
  const std::string where = "gt_sampling";
  CheckKeys(block, where, {"sample_counts", "min_points"});
  if (block.contains("sample_counts")) {
    std::map<std::string, std::size_t> counts;
    Read(block, "sample_counts", counts, where);
    // Draw in the configured class order, then any remaining classes.
    SamplingPlan plan;
    for (const std::string& name : config.classes) {
      if (auto it = counts.find(name); it != counts.end()) {
        plan.emplace_back(name, it->second);
        counts.erase(it);
      }
    }
    for (const auto& [name, count] : counts) plan.emplace_back(name, count);
    config.sampling_plan = std::move(plan);
  }
  Read(block, "min_points", config.gt_min_points, where);
}

void ParseBaselines(const json& block, BaselineConfig& b) {
  CheckKeys(block, "baselines",
            {"frustum_dropout", "frustum_noise", "random_drop", "global"});
  if (block.contains("frustum_dropout")) {
    const json& sub = block.at("frustum_dropout");
    const std::string where = "baselines.frustum_dropout";
    CheckKeys(sub, where, {"enabled", "probability"});
    Read(sub, "enabled", b.frustum_dropout, where);
    Read(sub, "probability", b.frustum_dropout_probability, where);
  }
  if (block.contains("frustum_noise")) {
    const json& sub = block.at("frustum_noise");
    const std::string where = "baselines.frustum_noise";
    CheckKeys(sub, where, {"enabled", "sigma"});
    Read(sub, "enabled", b.frustum_noise, where);
    Read(sub, "sigma", b.frustum_noise_sigma, where);
  }
  if (block.contains("random_drop")) {
    const json& sub = block.at("random_drop");
    const std::string where = "baselines.random_drop";
    CheckKeys(sub, where, {"enabled", "probability"});
    Read(sub, "enabled", b.random_drop, where);
    Read(sub, "probability", b.random_drop_probability, where);
  }
  if (block.contains("global")) {
    const json& sub = block.at("global");
    const std::string where = "baselines.global";
    CheckKeys(sub, where,
              {"enabled", "flip_probability", "rotation_range", "scale_range",
               "translation_std"});
    Read(sub, "enabled", b.global, where);
    GlobalAugmentConfig& g = b.global_config;
    Read(sub, "flip_probability", g.flip_probability, where);
    ReadRange(sub, "rotation_range", g.rotation_min, g.rotation_max, where);
    ReadRange(sub, "scale_range", g.scale_min, g.scale_max, where);
    Read(sub, "translation_std", g.translation_std, where);
  }
}

void ParseEval(const json& block, EvalConfig& eval,
               const std::filesystem::path& base_dir) {
  const std::string where = "eval";
  CheckKeys(block, where,
            {"bins", "iou_thresholds", "recall_positions", "detections_dir"});
  Read(block, "bins", eval.bins, where);
  if (block.contains("iou_thresholds")) {
    std::map<std::string, double> thresholds;
    Read(block, "iou_thresholds", thresholds, where);
    for (const auto& [name, value] : thresholds) eval.iou_thresholds[name] = value;
  }
  Read(block, "recall_positions", eval.recall_positions, where);
  ReadPath(block, "detections_dir", eval.detections_dir, base_dir);
}

void ParseAnalyze(const json& block, AnalyzeConfig& analyze) {
  const std::string where = "analyze";
  CheckKeys(block, where, {"samples", "class", "bins"});
  Read(block, "samples", analyze.samples, where);
  Read(block, "class", analyze.class_name, where);
  Read(block, "bins", analyze.bins, where);
}

void ParseSimulate(const json& block, SimulateConfig& sim) {
  const std::string where = "simulate";
  CheckKeys(block, where,
            {"vertical_resolution_deg", "horizontal_resolution_deg", "fov_deg",
             "max_range", "plate", "near_distance", "factor",
             "count_ratio_bounds"});
  Read(block, "vertical_resolution_deg", sim.sensor.vertical_resolution_deg,
       where);
  Read(block, "horizontal_resolution_deg",
       sim.sensor.horizontal_resolution_deg, where);
  ReadRange(block, "fov_deg", sim.sensor.fov_down_deg, sim.sensor.fov_up_deg,
            where);
  Read(block, "max_range", sim.sensor.max_range, where);
  if (block.contains("plate")) {
    const json& plate = block.at("plate");
    const std::string plate_where = "simulate.plate";
    CheckKeys(plate, plate_where,
              {"width", "height", "thickness", "center_z", "azimuth_deg"});
    Read(plate, "width", sim.plate_width, plate_where);
    Read(plate, "height", sim.plate_height, plate_where);
    Read(plate, "thickness", sim.plate_thickness, plate_where);
    Read(plate, "center_z", sim.plate_center_z, plate_where);
    Read(plate, "azimuth_deg", sim.plate_azimuth_deg, plate_where);
  }
  Read(block, "near_distance", sim.near_distance, where);
  Read(block, "factor", sim.factor, where);
  ReadRange(block, "count_ratio_bounds", sim.min_count_ratio,
            sim.max_count_ratio, where);
}

void Validate(const RunConfig& config) {
  try {
    config.pattern_aware.Validate();
    config.simulate.sensor.Validate();
  } catch (const Error& e) {
    Invalid(e.what());
  }
  if (config.workers == 0) Invalid("workers must be at least 1");
  if (config.classes.empty()) Invalid("classes must not be empty");
  if (config.eval.bins == 0) Invalid("eval.bins must be at least 1");
  if (config.eval.recall_positions == 0) {
    Invalid("eval.recall_positions must be at least 1");
  }
  if (config.analyze.bins == 0) Invalid("analyze.bins must be at least 1");
  const BaselineConfig& b = config.baselines;
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(b.frustum_dropout_probability) ||
      !probability(b.random_drop_probability) ||
      !probability(b.global_config.flip_probability)) {
    Invalid("baseline probabilities must lie in [0, 1]");
  }
  if (!(b.frustum_noise_sigma >= 0.0)) Invalid("frustum_noise.sigma < 0");
  if (!(b.global_config.scale_min > 0.0) ||
      b.global_config.scale_max < b.global_config.scale_min ||
      b.global_config.rotation_max < b.global_config.rotation_min) {
    Invalid("baselines.global ranges are invalid");
  }
  const SimulateConfig& sim = config.simulate;
  if (sim.factor < 2) Invalid("simulate.factor must be at least 2");
  if (!(sim.plate_width > 0.0 && sim.plate_height > 0.0 &&
        sim.plate_thickness > 0.0)) {
    Invalid("simulate.plate dimensions must be positive");
  }
}

}  // namespace

RunConfig ParseRunConfig(const std::string& json_text,
                         const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    Invalid(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(root, "config",
            {"dataset_root", "split_file", "database_dir", "output_dir",
             "classes", "seed", "workers", "build_timestamp", "pattern_aware",
             "gt_sampling", "baselines", "eval", "analyze", "simulate"});
  RunConfig config;
  ReadPath(root, "dataset_root", config.dataset_root, base_dir);
  ReadPath(root, "split_file", config.split_file, base_dir);
  ReadPath(root, "output_dir", config.output_dir, base_dir);
  ReadPath(root, "database_dir", config.database_dir, base_dir);
  if (config.output_dir.empty()) config.output_dir = base_dir / "output";
  Read(root, "classes", config.classes, "config");
  Read(root, "seed", config.seed, "config");
  Read(root, "workers", config.workers, "config");
  Read(root, "build_timestamp", config.build_timestamp, "config");
  if (root.contains("pattern_aware")) ParsePatternAware(root["pattern_aware"], config);
  if (root.contains("gt_sampling")) ParseGtSampling(root["gt_sampling"], config);
  if (root.contains("baselines")) ParseBaselines(root["baselines"], config.baselines);
  if (root.contains("eval")) ParseEval(root["eval"], config.eval, base_dir);
  if (root.contains("analyze")) ParseAnalyze(root["analyze"], config.analyze);
  if (root.contains("simulate")) ParseSimulate(root["simulate"], config.simulate);
  Validate(config);
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Invalid("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return ParseRunConfig(text.str(), path.parent_path());
}

}  // namespace pagt::cli
