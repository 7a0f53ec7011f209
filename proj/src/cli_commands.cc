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
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pagt/cli.hpp"
#include "pagt/distance_eval.hpp"
#include "pagt/kitti.hpp"
#include "pagt/parallel.hpp"

namespace pagt::cli {
namespace fs = std::filesystem;

namespace {

// Records look like "pagt|INFO|build-db|message".
class Logger {
 public:
  Logger(std::ostream& sink, std::string command)
      : sink_(sink), command_(std::move(command)) {}

  void Info(const std::string& message) { Write("INFO", message); }
  void Warn(const std::string& message) { Write("WARN", message); }

 private:
  void Write(const char* level, const std::string& message) {
    std::lock_guard lock(mutex_);
    sink_ << "pagt|" << level << '|' << command_ << '|' << message << '\n';
  }

  std::ostream& sink_;
  std::string command_;
  std::mutex mutex_;
};

void Require(const fs::path& path, const char* key) {
  if (path.empty()) {
    throw Error(ErrorKind::kInvalidConfig, std::string(key) + " is not set");
  }
}

fs::path DatabaseDir(const RunConfig& config) {
  return config.database_dir.empty() ? config.output_dir / "gt_database"
                                     : config.database_dir;
}

void MakeDirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());
}

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string Fixed(double value, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

std::string ApText(const std::optional<double>& ap) {
  return ap ? Fixed(*ap) : std::string("NA");
}

std::vector<FrameData> LoadFrames(const RunConfig& config,
                                  const std::vector<std::string>& ids) {
  std::vector<FrameData> frames(ids.size());
  ParallelFor(ids.size(), config.workers, [&](std::size_t i) {
    frames[i] = LoadFrame(config.dataset_root, ids[i]);
  });
  return frames;
}

std::vector<kitti::Label> OutputLabels(const FrameData& frame,
                                       const AugmentedFrame& augmented,
                                       bool transformed) {
  std::vector<kitti::Label> labels;
  std::size_t box_index = 0;
  for (const kitti::Label& label : frame.labels) {
    if (label.IsDontCare()) {
      labels.push_back(label);
      continue;
    }
    const LabeledBox& box = augmented.boxes[box_index++];
    if (!transformed) {
      labels.push_back(label);
      continue;
    }
    kitti::Label moved = kitti::LidarBoxToLabel(box.box, label.class_name,
                                                frame.calib);
    moved.truncation = label.truncation;
    moved.occlusion = label.occlusion;
    labels.push_back(std::move(moved));
  }
  for (std::size_t i = augmented.original_box_count;
       i < augmented.boxes.size(); ++i) {
    labels.push_back(kitti::LidarBoxToLabel(augmented.boxes[i].box,
                                            augmented.boxes[i].class_name,
                                            frame.calib));
  }
  return labels;
}

struct FrameOutcome {
  AugmentStats stats;
  std::size_t num_points = 0;
};

FrameOutcome AugmentOne(const RunConfig& config, const GtDatabase& db,
                        const PatternAwareConfig& pattern,
                        const std::string& id) {
  const FrameData frame = LoadFrame(config.dataset_root, id);
  Rng rng = FrameRng(config.seed, id);
  std::vector<LabeledBox> boxes;
  try {
    boxes = FrameBoxes(frame);
  } catch (const Error& e) {
    throw Error(e.kind(), "frame " + id + ": " + e.what());
  }

  AugmentedFrame augmented =
      AugmentFrame(frame.cloud, boxes, db, pattern, config.sampling_plan, rng);

  const BaselineConfig& b = config.baselines;
  for (const LabeledBox& labeled : augmented.boxes) {
    if (labeled.box.Distance() == 0.0) continue;
    if (b.frustum_dropout) {
      augmented.cloud = FrustumDropout(augmented.cloud, labeled.box,
                                       b.frustum_dropout_probability, rng);
    }
    if (b.frustum_noise) {
      augmented.cloud = FrustumNoise(augmented.cloud, labeled.box,
                                     b.frustum_noise_sigma, rng);
    }
    if (b.random_drop) {
      augmented.cloud = RandomDrop(augmented.cloud, labeled.box,
                                   b.random_drop_probability, rng);
    }
  }
  if (b.global) {
    const GlobalTransformSpec spec = SampleGlobalTransform(b.global_config, rng);
    auto [cloud, moved] = GlobalTransform(augmented.cloud, augmented.boxes, spec);
    augmented.cloud = std::move(cloud);
    augmented.boxes = std::move(moved);
  }

  const fs::path out = config.output_dir;
  kitti::WritePointCloudFile(out / "velodyne" / (id + ".bin"), augmented.cloud);
  const std::vector<kitti::Label> labels =
      OutputLabels(frame, augmented, b.global);
  kitti::WriteTextFile(out / "label_2" / (id + ".txt"),
                       kitti::SerializeLabels(labels));
  kitti::WriteTextFile(out / "calib" / (id + ".txt"),
                       kitti::SerializeCalib(frame.calib));
  return {augmented.stats, augmented.cloud.size()};
}

void WriteHistogramRows(std::ostream& csv, const std::string& series,
                        std::span<const double> distances,
                        const BinEdges& edges) {
  const std::vector<std::size_t> counts = BinCounts(distances, edges);
  const std::vector<double> heights = NormalizedHistogram(distances, edges);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    csv << series << ',' << Fixed(edges.edges[i]) << ','
        << Fixed(edges.edges[i + 1]) << ',' << counts[i] << ','
        << Fixed(heights[i], 8) << ",,\n";
  }
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kInvalidConfig:
    case ErrorKind::kInvalidArgument:
      return kExitInvalidConfig;
    default:
      return kExitMalformedData;
  }
}

std::vector<std::string> ReadSplit(const fs::path& path) {
  const std::string text = kitti::ReadTextFile(path);
  std::vector<std::string> ids;
  std::istringstream in(text);
  std::string token;
  while (in >> token) ids.push_back(token);
  return ids;
}

FrameData LoadFrame(const fs::path& root, const std::string& id) {
  FrameData frame;
  frame.id = id;
  const fs::path cloud_path = root / "velodyne" / (id + ".bin");
  const fs::path label_path = root / "label_2" / (id + ".txt");
  const fs::path calib_path = root / "calib" / (id + ".txt");
  for (const fs::path& p : {cloud_path, label_path, calib_path}) {
    if (!fs::exists(p)) {
      throw Error(ErrorKind::kMissingInput,
                  "frame " + id + ": missing " + p.string());
    }
  }
  try {
    frame.cloud = kitti::ReadPointCloudFile(cloud_path);
    frame.labels = kitti::ParseLabels(kitti::ReadTextFile(label_path));
    frame.calib = kitti::ParseCalib(kitti::ReadTextFile(calib_path));
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::kIo ? ErrorKind::kMissingInput : e.kind(),
                "frame " + id + ": " + e.what());
  }
  return frame;
}

void CmdBuildDb(const RunConfig& config, std::ostream& out, std::ostream& log) {
  Logger logger(log, "build-db");
  Require(config.dataset_root, "dataset_root");
  Require(config.split_file, "split_file");
  const std::vector<std::string> ids = ReadSplit(config.split_file);
  if (ids.empty()) logger.Warn("split " + config.split_file.string() + " is empty");
  logger.Info("loading " + std::to_string(ids.size()) + " frames");

  const std::vector<FrameData> frames = LoadFrames(config, ids);
  DatabaseMetadata metadata{config.split_file.stem().string(),
                            config.build_timestamp.empty() ? UtcNow()
                                                           : config.build_timestamp};
  const GtDatabase db =
      BuildDatabase(frames, config.classes, metadata, config.workers);
  const fs::path dir = DatabaseDir(config);
  db.Save(dir);
  logger.Info("wrote " + std::to_string(db.TotalCount()) + " objects to " +
              dir.string());
  for (const std::string& name : config.classes) {
    out << name << ' ' << db.Objects(name).size() << '\n';
  }
}

void CmdAugment(const RunConfig& config, std::ostream& out, std::ostream& log) {
  Logger logger(log, "augment");
  Require(config.dataset_root, "dataset_root");
  Require(config.split_file, "split_file");
  const GtDatabase db =
      GtDatabase::Load(DatabaseDir(config)).FilterByMinPoints(config.gt_min_points);
  PatternAwareConfig pattern = config.pattern_aware;
  if (!config.pattern_aware_enabled) pattern.apply_probability = 0.0;

  std::vector<std::string> ids = ReadSplit(config.split_file);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (const char* sub : {"velodyne", "label_2", "calib"}) {
    MakeDirs(config.output_dir / sub);
  }

  std::vector<FrameOutcome> outcomes(ids.size());
  ParallelFor(ids.size(), config.workers, [&](std::size_t i) {
    outcomes[i] = AugmentOne(config, db, pattern, ids[i]);
  });

  std::ostringstream manifest;
  manifest << "frame_id,sampled,accepted,relocated,pattern_rejected,"
              "collision_rejected,num_points\n";
  AugmentStats total;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const AugmentStats& s = outcomes[i].stats;
    manifest << ids[i] << ',' << s.sampled << ',' << s.accepted << ','
             << s.relocated << ',' << s.pattern_rejected << ','
             << s.collision_rejected << ',' << outcomes[i].num_points << '\n';
    total.sampled += s.sampled;
    total.accepted += s.accepted;
    total.relocated += s.relocated;
    total.pattern_rejected += s.pattern_rejected;
    total.collision_rejected += s.collision_rejected;
  }
  kitti::WriteTextFile(config.output_dir / "manifest.csv", manifest.str());
  logger.Info("augmented " + std::to_string(ids.size()) + " frames");
  out << "frames " << ids.size() << "\nsampled " << total.sampled
      << "\naccepted " << total.accepted << "\nrelocated " << total.relocated
      << "\npattern_rejected " << total.pattern_rejected
      << "\ncollision_rejected " << total.collision_rejected << '\n';
}

void CmdEval(const RunConfig& config, std::ostream& out, std::ostream& log) {
  Logger logger(log, "eval");
  Require(config.dataset_root, "dataset_root");
  Require(config.split_file, "split_file");
  Require(config.eval.detections_dir, "eval.detections_dir");
  const std::vector<std::string> ids = ReadSplit(config.split_file);

  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
  for (const std::string& id : ids) {
    const fs::path label_path = config.dataset_root / "label_2" / (id + ".txt");
    const fs::path calib_path = config.dataset_root / "calib" / (id + ".txt");
    if (!fs::exists(label_path) || !fs::exists(calib_path)) {
      throw Error(ErrorKind::kMissingInput,
                  "frame " + id + ": missing label or calib file");
    }
    try {
      const kitti::CalibSet calib =
          kitti::ParseCalib(kitti::ReadTextFile(calib_path));
      for (const kitti::Label& label :
           kitti::ParseLabels(kitti::ReadTextFile(label_path))) {
        if (label.IsDontCare()) continue;
        gts.push_back({kitti::LabelToLidarBox(label, calib), label.class_name,
                       id, kitti::DifficultyOf(label)});
      }
      const fs::path det_path = config.eval.detections_dir / (id + ".txt");
      if (!fs::exists(det_path)) continue;
      for (const kitti::Label& label :
           kitti::ParseDetections(kitti::ReadTextFile(det_path))) {
        if (label.IsDontCare()) continue;
        dets.push_back({kitti::LabelToLidarBox(label, calib), *label.score,
                        label.class_name, id});
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + id + ": " + e.what());
    }
  }

  MakeDirs(config.output_dir);
  for (const std::string& name : config.classes) {
    std::vector<GroundTruth> class_gts;
    std::vector<Detection> class_dets;
    std::vector<double> distances;
    for (const GroundTruth& g : gts) {
      if (g.class_name != name) continue;
      class_gts.push_back(g);
      distances.push_back(g.box.Distance());
    }
    for (const Detection& d : dets) {
      if (d.class_name == name) class_dets.push_back(d);
    }
    if (class_gts.size() < config.eval.bins) {
      logger.Warn(name + ": " + std::to_string(class_gts.size()) +
                  " ground truths, fewer than " +
                  std::to_string(config.eval.bins) + " bins; skipped");
      continue;
    }
    const auto iou_it = config.eval.iou_thresholds.find(name);
    const double iou = iou_it == config.eval.iou_thresholds.end() ? 0.5
                                                                  : iou_it->second;
    const BinEdges edges = EqualElementEdges(distances, config.eval.bins);
    const EvalReport report = ApByBin(class_dets, class_gts, edges, iou,
                                      config.eval.recall_positions);

    std::ostringstream csv;
    csv << "bin_lo,bin_hi,n_gt,AP\n";
    for (const BinResult& bin : report.bins) {
      csv << Fixed(bin.lo) << ',' << Fixed(bin.hi) << ',' << bin.num_gt << ','
          << ApText(bin.ap) << '\n';
    }
    csv << "all,all," << report.overall_gt << ',' << ApText(report.overall_ap)
        << '\n';
    kitti::WriteTextFile(config.output_dir / ("eval_" + name + ".csv"),
                         csv.str());

    std::ostringstream diff;
    diff << "difficulty,AP\n";
    for (const auto& [level, ap] : report.difficulty_ap) {
      diff << kitti::DifficultyName(level) << ',' << ApText(ap) << '\n';
    }
    kitti::WriteTextFile(
        config.output_dir / ("eval_" + name + "_difficulty.csv"), diff.str());

    std::ostringstream hist;
    hist << "bin_lo,bin_hi,height\n";
    const std::vector<double> heights = NormalizedHistogram(distances, edges);
    for (std::size_t i = 0; i < heights.size(); ++i) {
      hist << Fixed(edges.edges[i]) << ',' << Fixed(edges.edges[i + 1]) << ','
           << Fixed(heights[i], 8) << '\n';
    }
    kitti::WriteTextFile(config.output_dir / ("hist_" + name + ".csv"),
                         hist.str());

    out << name << " (IoU " << Fixed(iou, 2) << ")\n";
    const std::vector<long> rounded = edges.Rounded();
    for (std::size_t i = 0; i < report.bins.size(); ++i) {
      out << "  " << rounded[i] << '-' << rounded[i + 1] << " m: "
          << ApText(report.bins[i].ap) << " (" << report.bins[i].num_gt
          << " gt)\n";
    }
    out << "  overall: " << ApText(report.overall_ap) << '\n';
    for (const auto& [level, ap] : report.difficulty_ap) {
      out << "  " << kitti::DifficultyName(level) << ": " << ApText(ap) << '\n';
    }
  }
}

void CmdAnalyze(const RunConfig& config, std::ostream& out, std::ostream& log) {
  Logger logger(log, "analyze");
  const AnalyzeConfig& analyze = config.analyze;
  const GtDatabase db =
      GtDatabase::Load(DatabaseDir(config)).FilterByMinPoints(config.gt_min_points);
  PatternAwareConfig pattern = config.pattern_aware;
  if (!config.pattern_aware_enabled) pattern.apply_probability = 0.0;

  Rng rng = FrameRng(config.seed, "analyze");
  const std::vector<GtObject> sampled =
      SampleObjects(db, analyze.class_name, analyze.samples, rng);
  std::vector<double> before;
  std::vector<double> after;
  std::size_t relocated = 0;
  std::size_t outside_range = 0;
  for (const GtObject& object : sampled) {
    before.push_back(object.distance());
    const PatternAwareResult result = PatternAwareSample(object, pattern, rng);
    after.push_back(result.object.distance());
    if (result.outcome == SampleOutcome::kRelocated) {
      ++relocated;
      const double d = result.object.distance();
      if (d < pattern.relocated_min || d > pattern.relocated_max) ++outside_range;
    }
  }

  const BinEdges before_edges = EqualElementEdges(before, analyze.bins);
  const BinEdges after_edges = EqualElementEdges(after, analyze.bins);
  std::ostringstream csv;
  csv << "series,bin_lo,bin_hi,count,height,mean,skewness\n";
  WriteHistogramRows(csv, "before", before, before_edges);
  WriteHistogramRows(csv, "after", after, after_edges);
  csv << "before_summary,,," << before.size() << ",," << Fixed(Mean(before), 6)
      << ',' << Fixed(Skewness(before), 6) << '\n';
  csv << "after_summary,,," << after.size() << ",," << Fixed(Mean(after), 6)
      << ',' << Fixed(Skewness(after), 6) << '\n';
  MakeDirs(config.output_dir);
  kitti::WriteTextFile(
      config.output_dir / ("distribution_" + analyze.class_name + ".csv"),
      csv.str());
  logger.Info("sampled " + std::to_string(sampled.size()) + " " +
              analyze.class_name + " objects");

  out << "class " << analyze.class_name << "\nsamples " << sampled.size()
      << "\nrelocated " << relocated << "\nrelocated_outside_range "
      << outside_range << "\nmean_before " << Fixed(Mean(before))
      << "\nmean_after " << Fixed(Mean(after)) << "\nskewness_before "
      << Fixed(Skewness(before)) << "\nskewness_after "
      << Fixed(Skewness(after)) << '\n';
}

bool CmdSimulate(const RunConfig& config, std::ostream& out, std::ostream& log) {
  Logger logger(log, "simulate");
  const SimulateConfig& sim = config.simulate;
  const double azimuth = sim.plate_azimuth_deg * kDegToRad;
  Box3D plate;
  plate.cx = sim.near_distance * std::cos(azimuth);
  plate.cy = sim.near_distance * std::sin(azimuth);
  plate.cz = sim.plate_center_z;
  plate.l = sim.plate_thickness;
  plate.w = sim.plate_width;
  plate.h = sim.plate_height;
  plate.yaw = NormalizeAngle(azimuth);

  const OracleChainResult chain = RunOracleChain(plate, sim.sensor, sim.factor);
  const fs::path dir = config.output_dir / "simulate";
  MakeDirs(dir);
  kitti::WritePointCloudFile(dir / "near.bin", chain.near_scan);
  kitti::WritePointCloudFile(dir / "chained.bin", chain.chained);
  kitti::WritePointCloudFile(dir / "far.bin", chain.far_scan);

  out << "near_points " << chain.near_scan.size() << "\nchained_points "
      << chain.chained.size() << "\nfar_points " << chain.far_scan.size()
      << '\n';
  if (!chain.comparison) {
    logger.Warn("no hits on the target");
    out << "status no-hit\n";
    return true;
  }
  const CloudComparison& c = *chain.comparison;
  const bool ratio_ok =
      c.count_ratio >= sim.min_count_ratio && c.count_ratio <= sim.max_count_ratio;
  const bool nn_ok = c.mean_nn_distance < chain.azimuth_arc_at_far;
  out << "count_ratio " << Fixed(c.count_ratio) << "\nmean_nn_distance "
      << Fixed(c.mean_nn_distance, 6) << "\nmax_nn_distance "
      << Fixed(c.max_nn_distance, 6) << "\nazimuth_arc_at_far "
      << Fixed(chain.azimuth_arc_at_far, 6) << "\nstatus "
      << (ratio_ok && nn_ok ? "PASS" : "FAIL") << '\n';
  return ratio_ok && nn_ok;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Pattern-aware ground-truth sampling toolkit", "pagt"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string output;
  std::string detections;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", seed, "Override the global seed");
    sub->add_option("--workers", workers, "Worker threads");
    sub->add_option("--output", output, "Override the output directory");
  };
  CLI::App* build = app.add_subcommand("build-db", "Build the GT database");
  CLI::App* augment = app.add_subcommand("augment", "Augment a split");
  CLI::App* eval = app.add_subcommand("eval", "Distance-binned AP evaluation");
  CLI::App* analyze =
      app.add_subcommand("analyze", "Distance distribution before/after");
  CLI::App* simulate = app.add_subcommand("simulate", "Run the scan oracle");
  for (CLI::App* sub : {build, augment, eval, analyze, simulate}) add_common(sub);
  eval->add_option("--detections", detections,
                   "Directory of KITTI result files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pagt|ERROR|cli|" << e.what() << '\n';
    return kExitInvalidConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    RunConfig config = LoadRunConfig(config_path);
    if (seed) config.seed = *seed;
    if (workers) {
      if (*workers == 0) throw Error(ErrorKind::kInvalidConfig, "workers must be >= 1");
      config.workers = *workers;
    }
    if (!output.empty()) config.output_dir = output;
    if (!detections.empty()) config.eval.detections_dir = detections;

    if (chosen == build) {
      CmdBuildDb(config, out, err);
    } else if (chosen == augment) {
      CmdAugment(config, out, err);
    } else if (chosen == eval) {
      CmdEval(config, out, err);
    } else if (chosen == analyze) {
      CmdAnalyze(config, out, err);
    } else if (!CmdSimulate(config, out, err)) {
      return kExitMalformedData;
    }
  } catch (const Error& e) {
    err << "pagt|ERROR|" << command << '|' << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "pagt|ERROR|" << command << '|' << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace pagt::cli
