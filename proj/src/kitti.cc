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

#include "pagt/kitti.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "pagt/errors.hpp"

namespace pagt::kitti {
namespace {

constexpr std::size_t kPointStride = 16;
constexpr std::size_t kLabelFields = 15;

float LoadFloatLe(const std::byte* src) {
  std::uint32_t bits;
  std::memcpy(&bits, src, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  return std::bit_cast<float>(bits);
}

void StoreFloatLe(float value, std::byte* dst) {
  auto bits = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap32(bits);
  }
  std::memcpy(dst, &bits, sizeof(bits));
}

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    const std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::optional<double> ToDouble(std::string_view token) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<int> ToInt(std::string_view token) {
  int value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<Label> ParseLabelRows(std::string_view text, bool with_score) {
  const std::size_t expected = kLabelFields + (with_score ? 1 : 0);
  std::vector<Label> labels;
  const std::vector<std::string_view> lines = SplitLines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line_number = static_cast<int>(n) + 1;
    const std::vector<std::string_view> fields = SplitWhitespace(lines[n]);
    if (fields.empty()) continue;
    if (fields.size() != expected) {
      throw MalformedLabelError(
          line_number, "expected " + std::to_string(expected) +
                           " fields, found " + std::to_string(fields.size()));
    }
    auto number = [&](std::size_t i) {
      const std::optional<double> v = ToDouble(fields[i]);
      if (!v || !std::isfinite(*v)) {
        throw MalformedLabelError(line_number, "field " + std::to_string(i + 1) +
                                                   " is not a number: '" +
                                                   std::string(fields[i]) + "'");
      }
      return *v;
    };
    Label label;
    label.class_name = std::string(fields[0]);
    label.truncation = number(1);
    // Occlusion is an integer code, but some tools write it as "0.00".
    if (const std::optional<int> occ = ToInt(fields[2])) {
      label.occlusion = *occ;
    } else {
      const double occ_real = number(2);
      if (occ_real != std::floor(occ_real)) {
        throw MalformedLabelError(line_number, "occlusion is not an integer");
      }
      label.occlusion = static_cast<int>(occ_real);
    }
    label.alpha = number(3);
    for (std::size_t i = 0; i < 4; ++i) label.bbox2d[i] = number(4 + i);
    label.h = number(8);
    label.w = number(9);
    label.l = number(10);
    label.x = number(11);
    label.y = number(12);
    label.z = number(13);
    label.rotation_y = number(14);
    if (with_score) label.score = number(15);
    labels.push_back(std::move(label));
  }
  return labels;
}

void AppendNumber(std::string& out, double value, FloatFormat format) {
  char buffer[64];
  if (format == FloatFormat::kKitti) {
    const int n = std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    out.append(buffer, static_cast<std::size_t>(n));
  } else {
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    out.append(buffer, ptr);
  }
}

template <int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> ParseMatrix(
    const std::vector<std::string_view>& values, std::string_view key) {
  if (values.size() != static_cast<std::size_t>(Rows * Cols)) {
    throw Error(ErrorKind::kMalformedCalib,
                std::string(key) + " expects " + std::to_string(Rows * Cols) +
                    " values, found " + std::to_string(values.size()));
  }
  Eigen::Matrix<double, Rows, Cols> m;
  for (int r = 0; r < Rows; ++r) {
    for (int c = 0; c < Cols; ++c) {
      const std::optional<double> v = ToDouble(values[r * Cols + c]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::kMalformedCalib,
                    std::string(key) + " has a non-numeric entry");
      }
      m(r, c) = *v;
    }
  }
  return m;
}

void CheckOrthonormal(const Eigen::Matrix3d& rotation, std::string_view key) {
  const double deviation =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (deviation > 1e-3) {
    throw Error(ErrorKind::kMalformedCalib,
                std::string(key) + " rotation block is not orthonormal");
  }
}

template <typename Derived>
void AppendMatrix(std::string& out, std::string_view key,
                  const Eigen::MatrixBase<Derived>& m) {
  out.append(key);
  out.append(":");
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.push_back(' ');
      AppendNumber(out, m(r, c), FloatFormat::kExact);
    }
  }
  out.push_back('\n');
}

}  // namespace

Eigen::Vector3d CalibSet::VeloToRect(const Eigen::Vector3d& velo) const {
  const Eigen::Vector3d cam =
      tr_velo_to_cam.leftCols<3>() * velo + tr_velo_to_cam.col(3);
  return r0_rect * cam;
}

Eigen::Vector3d CalibSet::RectToVelo(const Eigen::Vector3d& rect) const {
  const Eigen::Vector3d cam = r0_rect.inverse() * rect;
  return tr_velo_to_cam.leftCols<3>().inverse() * (cam - tr_velo_to_cam.col(3));
}

Eigen::Vector2d CalibSet::ProjectRect(const Eigen::Vector3d& rect) const {
  const Eigen::Vector3d uvw = p2.leftCols<3>() * rect + p2.col(3);
  return {uvw.x() / uvw.z(), uvw.y() / uvw.z()};
}

std::string_view DifficultyName(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy: return "Easy";
    case Difficulty::kModerate: return "Moderate";
    case Difficulty::kHard: return "Hard";
    case Difficulty::kExcluded: return "Excluded";
  }
  return "Excluded";
}

PointCloud ReadPointCloud(std::span<const std::byte> bytes) {
  if (bytes.size() % kPointStride != 0) {
    throw Error(ErrorKind::kMalformedCloud,
                "byte length " + std::to_string(bytes.size()) +
                    " is not a multiple of 16");
  }
  PointCloud cloud(bytes.size() / kPointStride);
  const std::byte* src = bytes.data();
  for (LidarPoint& p : cloud) {
    p.x = LoadFloatLe(src);
    p.y = LoadFloatLe(src + 4);
    p.z = LoadFloatLe(src + 8);
    p.intensity = LoadFloatLe(src + 12);
    src += kPointStride;
  }
  ValidateCloud(cloud);
  return cloud;
}

std::vector<std::byte> WritePointCloud(const PointCloud& cloud) {
  std::vector<std::byte> bytes(cloud.size() * kPointStride);
  std::byte* dst = bytes.data();
  for (const LidarPoint& p : cloud) {
    StoreFloatLe(static_cast<float>(p.x), dst);
    StoreFloatLe(static_cast<float>(p.y), dst + 4);
    StoreFloatLe(static_cast<float>(p.z), dst + 8);
    StoreFloatLe(static_cast<float>(p.intensity), dst + 12);
    dst += kPointStride;
  }
  return bytes;
}

PointCloud ReadPointCloudFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  try {
    return ReadPointCloud(std::as_bytes(std::span(raw)));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void WritePointCloudFile(const std::filesystem::path& path,
                         const PointCloud& cloud) {
  const std::vector<std::byte> bytes = WritePointCloud(cloud);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

std::vector<Label> ParseLabels(std::string_view text) {
  return ParseLabelRows(text, false);
}

std::vector<Label> ParseDetections(std::string_view text) {
  return ParseLabelRows(text, true);
}

std::string SerializeLabels(std::span<const Label> labels, FloatFormat format) {
  std::string out;
  for (const Label& label : labels) {
    out.append(label.class_name);
    auto field = [&](double v) {
      out.push_back(' ');
      AppendNumber(out, v, format);
    };
    field(label.truncation);
    out.push_back(' ');
    out.append(std::to_string(label.occlusion));
    field(label.alpha);
    for (double v : label.bbox2d) field(v);
    field(label.h);
    field(label.w);
    field(label.l);
    field(label.x);
    field(label.y);
    field(label.z);
    field(label.rotation_y);
    if (label.score) {
      out.push_back(' ');
      AppendNumber(out, *label.score, FloatFormat::kExact);
    }
    out.push_back('\n');
  }
  return out;
}

CalibSet ParseCalib(std::string_view text) {
  std::optional<Eigen::Matrix<double, 3, 4>> p2;
  std::optional<Eigen::Matrix3d> r0;
  std::optional<Eigen::Matrix<double, 3, 4>> tr;
  for (std::string_view line : SplitLines(text)) {
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string_view key = line.substr(0, colon);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back())))
      key.remove_suffix(1);
    const std::vector<std::string_view> values =
        SplitWhitespace(line.substr(colon + 1));
    if (key == "P2") {
      p2 = ParseMatrix<3, 4>(values, key);
    } else if (key == "R0_rect" || key == "R_rect") {
      r0 = ParseMatrix<3, 3>(values, key);
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      tr = ParseMatrix<3, 4>(values, key);
    }
  }
  if (!p2) throw Error(ErrorKind::kMissingCalibKey, "P2");
  if (!r0) throw Error(ErrorKind::kMissingCalibKey, "R0_rect");
  if (!tr) throw Error(ErrorKind::kMissingCalibKey, "Tr_velo_to_cam");
  CheckOrthonormal(*r0, "R0_rect");
  CheckOrthonormal(tr->leftCols<3>(), "Tr_velo_to_cam");
  CalibSet calib;
  calib.p2 = *p2;
  calib.r0_rect = *r0;
  calib.tr_velo_to_cam = *tr;
  return calib;
}

std::string SerializeCalib(const CalibSet& calib) {
  std::string out;
  AppendMatrix(out, "P2", calib.p2);
  AppendMatrix(out, "R0_rect", calib.r0_rect);
  AppendMatrix(out, "Tr_velo_to_cam", calib.tr_velo_to_cam);
  return out;
}

Box3D LabelToLidarBox(const Label& label, const CalibSet& calib) {
  if (!(label.h > 0.0) || !(label.w > 0.0) || !(label.l > 0.0)) {
    throw Error(ErrorKind::kDegenerateBox,
                "label '" + label.class_name + "' has non-positive dimensions");
  }
  const Eigen::Vector3d bottom =
      calib.RectToVelo(Eigen::Vector3d(label.x, label.y, label.z));
  Box3D box;
  box.cx = bottom.x();
  box.cy = bottom.y();
  box.cz = bottom.z() + 0.5 * label.h;
  box.l = label.l;
  box.w = label.w;
  box.h = label.h;
  // Camera heading is measured about the downward y axis from the camera x
  // axis; the velodyne heading is about +z from the forward x axis.
  box.yaw = NormalizeAngle(-label.rotation_y - 0.5 * kPi);
  return box;
}

Label LidarBoxToLabel(const Box3D& box, std::string class_name,
                      const CalibSet& calib) {
  const Eigen::Vector3d bottom =
      calib.VeloToRect(Eigen::Vector3d(box.cx, box.cy, box.Bottom()));
  Label label;
  label.class_name = std::move(class_name);
  label.h = box.h;
  label.w = box.w;
  label.l = box.l;
  label.x = bottom.x();
  label.y = bottom.y();
  label.z = bottom.z();
  label.rotation_y = NormalizeAngle(-box.yaw - 0.5 * kPi);
  label.alpha = NormalizeAngle(label.rotation_y - std::atan2(label.x, label.z));

  bool visible = true;
  double left = 1e300, top = 1e300, right = -1e300, bottom_px = -1e300;
  for (const LidarPoint& corner : Corners(box)) {
    const Eigen::Vector3d rect =
        calib.VeloToRect(Eigen::Vector3d(corner.x, corner.y, corner.z));
    if (rect.z() <= 0.1) {
      visible = false;
      break;
    }
    const Eigen::Vector2d px = calib.ProjectRect(rect);
    left = std::min(left, px.x());
    right = std::max(right, px.x());
    top = std::min(top, px.y());
    bottom_px = std::max(bottom_px, px.y());
  }
  if (visible && std::isfinite(left) && std::isfinite(top)) {
    label.bbox2d = {left, top, right, bottom_px};
  } else {
    label.bbox2d = {-1.0, -1.0, -1.0, -1.0};
  }
  return label;
}

Difficulty DifficultyOf(const Label& label) {
  const double height = label.BoxHeightPixels();
  if (height >= 40.0 && label.occlusion <= 0 && label.truncation <= 0.15) {
    return Difficulty::kEasy;
  }
  if (height >= 25.0 && label.occlusion <= 1 && label.truncation <= 0.30) {
    return Difficulty::kModerate;
  }
  if (height >= 25.0 && label.occlusion <= 2 && label.truncation <= 0.50) {
    return Difficulty::kHard;
  }
  return Difficulty::kExcluded;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

}  // namespace pagt::kitti
