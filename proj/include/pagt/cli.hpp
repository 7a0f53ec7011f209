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
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pagt/baselines.hpp"
#include "pagt/errors.hpp"
#include "pagt/gt_database.hpp"
#include "pagt/pattern_aware.hpp"
#include "pagt/scan_oracle.hpp"

namespace pagt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitMalformedData = 2,
  kExitInvalidConfig = 3,
};

int ExitCodeFor(ErrorKind kind);

struct BaselineConfig {
  bool frustum_dropout = false;
  double frustum_dropout_probability = 0.3;
  bool frustum_noise = false;
  double frustum_noise_sigma = 0.02;
  bool random_drop = false;
  double random_drop_probability = 0.3;
  bool global = false;
  GlobalAugmentConfig global_config;
};

struct EvalConfig {
  std::size_t bins = 10;
  std::map<std::string, double> iou_thresholds = {
      {"Car", 0.7}, {"Pedestrian", 0.5}, {"Cyclist", 0.5}};
  std::size_t recall_positions = 40;
  std::filesystem::path detections_dir;
};

struct AnalyzeConfig {
  std::size_t samples = 5000;
  std::string class_name = "Car";
  std::size_t bins = 10;
};

struct SimulateConfig {
  SensorSpec sensor;
  double plate_width = 1.0;
  double plate_height = 1.0;
  double plate_thickness = 0.02;
  double plate_center_z = -0.5;
  double plate_azimuth_deg = 0.0;
  double near_distance = 15.0;
  int factor = 2;
  double min_count_ratio = 0.85;
  double max_count_ratio = 1.15;
};

struct RunConfig {
  std::filesystem::path dataset_root;
  std::filesystem::path split_file;
  std::filesystem::path database_dir;
  std::filesystem::path output_dir;
  std::vector<std::string> classes = DefaultClasses();
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // Written into the database index; empty means "now".
  std::string build_timestamp;

  bool pattern_aware_enabled = true;
  PatternAwareConfig pattern_aware;
  SamplingPlan sampling_plan = DefaultSamplingPlan();
  std::map<std::string, std::size_t> gt_min_points = {
      {"Car", 5}, {"Pedestrian", 5}, {"Cyclist", 5}};
  BaselineConfig baselines;
  EvalConfig eval;
  AnalyzeConfig analyze;
  SimulateConfig simulate;
};

// Parses the JSON configuration. Relative paths resolve against `base_dir`.
// Throws InvalidConfig on unknown keys, wrong types or invalid values.
RunConfig ParseRunConfig(const std::string& json_text,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

std::vector<std::string> ReadSplit(const std::filesystem::path& path);

// Reads velodyne/<id>.bin, label_2/<id>.txt and calib/<id>.txt. Any failure
// is reported with the frame id attached.
FrameData LoadFrame(const std::filesystem::path& root, const std::string& id);

// Each command throws pagt::Error on failure and writes its human summary to
// `out`; `log` receives the line-oriented log records.
void CmdBuildDb(const RunConfig& config, std::ostream& out, std::ostream& log);
void CmdAugment(const RunConfig& config, std::ostream& out, std::ostream& log);
void CmdEval(const RunConfig& config, std::ostream& out, std::ostream& log);
void CmdAnalyze(const RunConfig& config, std::ostream& out, std::ostream& log);
// Returns true when the oracle chain met its bounds (or produced no hits).
bool CmdSimulate(const RunConfig& config, std::ostream& out, std::ostream& log);

// Full command-line entry point; returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace pagt::cli
