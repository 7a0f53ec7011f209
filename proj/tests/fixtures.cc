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

#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace pagt::testing {
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device device;
  path_ = fs::temp_directory_path() /
          ("pagt_" + tag + "_" + std::to_string(device()) + "_" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Box3D MakeBox(double cx, double cy, double cz, double l, double w, double h,
              double yaw) {
  Box3D box;
  box.cx = cx;
  box.cy = cy;
  box.cz = cz;
  box.l = l;
  box.w = w;
  box.h = h;
  box.yaw = yaw;
  return box;
}

kitti::CalibSet FixtureCalib() {
  kitti::CalibSet calib;
  calib.p2 << 721.5377, 0.0, 609.5593, 44.85728,  //
      0.0, 721.5377, 172.854, 0.2163791,         //
      0.0, 0.0, 1.0, 0.002745884;
  calib.r0_rect.setIdentity();
  calib.tr_velo_to_cam << 0.0, -1.0, 0.0, -0.004,  //
      0.0, 0.0, -1.0, -0.076,                      //
      1.0, 0.0, 0.0, -0.27;
  return calib;
}

PointCloud PointsInside(const Box3D& box, std::size_t count, Rng& rng) {
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::uniform_real_distribution<double> intensity(0.0, 1.0);
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  PointCloud points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = unit(rng) * box.l * 0.98;
    const double v = unit(rng) * box.w * 0.98;
    const double w = unit(rng) * box.h * 0.98;
    points.push_back({box.cx + c * u - s * v, box.cy + s * u + c * v,
                      box.cz + w, intensity(rng)});
  }
  return points;
}

FrameData MakeFrame(const std::string& id, Rng& rng) {
  FrameData frame;
  frame.id = id;
  frame.calib = FixtureCalib();

  std::uniform_real_distribution<double> ground_x(2.0, 70.0);
  std::uniform_real_distribution<double> ground_y(-30.0, 30.0);
  std::uniform_real_distribution<double> intensity(0.0, 1.0);
  for (int i = 0; i < 1500; ++i) {
    frame.cloud.push_back({ground_x(rng), ground_y(rng), -1.73, intensity(rng)});
  }

  struct Template {
    const char* name;
    double l, w, h;
    double density;  // points at 10 m
  };
  static const Template kTemplates[] = {
      {"Car", 3.9, 1.6, 1.5, 900.0},
      {"Pedestrian", 0.8, 0.6, 1.75, 1200.0},
      {"Cyclist", 1.76, 0.6, 1.73, 1100.0},
  };
  std::uniform_real_distribution<double> distance(6.0, 45.0);
  std::uniform_real_distribution<double> azimuth(-0.6, 0.6);
  std::uniform_real_distribution<double> yaw(-kPi, kPi);
  std::uniform_int_distribution<int> kind(0, 2);
  std::vector<Box3D> placed;
  for (int attempt = 0; attempt < 30 && placed.size() < 6; ++attempt) {
    const Template& t = kTemplates[kind(rng)];
    const double d = distance(rng);
    const double a = azimuth(rng);
    const Box3D box = MakeBox(d * std::cos(a), d * std::sin(a),
                              -1.73 + t.h / 2.0, t.l, t.w, t.h, yaw(rng));
    bool clear = true;
    for (const Box3D& other : placed) {
      // Keep a margin so two-decimal label rounding cannot create contact.
      Box3D grown = other;
      grown.l += 0.2;
      grown.w += 0.2;
      if (BevOverlapArea(grown, box) > 0.0) clear = false;
    }
    if (!clear) continue;
    placed.push_back(box);
    const auto count = static_cast<std::size_t>(t.density * 100.0 / (d * d)) + 3;
    PointCloud points = PointsInside(box, count, rng);
    frame.cloud.insert(frame.cloud.end(), points.begin(), points.end());
    frame.labels.push_back(kitti::LidarBoxToLabel(box, t.name, frame.calib));
  }
  kitti::Label dont_care;
  dont_care.class_name = "DontCare";
  dont_care.truncation = -1;
  dont_care.occlusion = -1;
  dont_care.alpha = -10;
  dont_care.bbox2d = {700.0, 160.0, 720.0, 180.0};
  dont_care.h = dont_care.w = dont_care.l = -1;
  dont_care.x = dont_care.y = dont_care.z = -1000;
  dont_care.rotation_y = -10;
  frame.labels.push_back(dont_care);
  return frame;
}

FixtureDataset WriteFixtureDataset(const fs::path& root, std::size_t frames,
                                   std::uint64_t seed) {
  FixtureDataset data;
  data.root = root;
  for (const char* sub : {"velodyne", "label_2", "calib"}) {
    fs::create_directories(root / sub);
  }
  std::ostringstream split;
  for (std::size_t i = 0; i < frames; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "%06zu", i);
    Rng rng = FrameRng(seed, id);
    FrameData frame = MakeFrame(id, rng);
    // Reparse the rounded labels so in-memory and on-disk frames agree.
    const std::string label_text = kitti::SerializeLabels(frame.labels);
    kitti::WritePointCloudFile(root / "velodyne" / (frame.id + ".bin"),
                               frame.cloud);
    kitti::WriteTextFile(root / "label_2" / (frame.id + ".txt"), label_text);
    kitti::WriteTextFile(root / "calib" / (frame.id + ".txt"),
                         kitti::SerializeCalib(frame.calib));
    split << id << '\n';
    data.ids.push_back(id);
  }
  data.split_file = root / "train.txt";
  kitti::WriteTextFile(data.split_file, split.str());
  return data;
}

fs::path WriteConfig(const fs::path& dir, const FixtureDataset& data,
                     const std::string& extra) {
  std::ostringstream json;
  json << "{\n  \"dataset_root\": \"" << data.root.string() << "\",\n"
       << "  \"split_file\": \"" << data.split_file.string() << "\",\n"
       << "  \"output_dir\": \"" << (dir / "out").string() << "\",\n"
       << "  \"database_dir\": \"" << (dir / "db").string() << "\",\n"
       << "  \"build_timestamp\": \"2026-01-01T00:00:00Z\"";
  if (!extra.empty()) json << ",\n  " << extra;
  json << "\n}\n";
  const fs::path path = dir / "config.json";
  kitti::WriteTextFile(path, json.str());
  return path;
}

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace pagt::testing
