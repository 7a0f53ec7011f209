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

#include "pagt/gt_database.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "pagt/errors.hpp"
#include "pagt/parallel.hpp"

namespace pagt {
namespace {

using nlohmann::json;

constexpr std::size_t kObjectHeaderBytes = 4 + 7 * 8 + 4;
constexpr std::size_t kPointBytes = 16;
constexpr int kFormatVersion = 1;

template <typename T>
void PutLe(std::vector<std::byte>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  auto bits = std::bit_cast<Bits>(value);
  if constexpr (std::endian::native == std::endian::big) {
    bits = sizeof(T) == 8 ? __builtin_bswap64(bits) : __builtin_bswap32(bits);
  }
  const std::size_t at = out.size();
  out.resize(at + sizeof(T));
  std::memcpy(out.data() + at, &bits, sizeof(T));
}

template <typename T>
T GetLe(const std::byte* src) {
  using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  Bits bits;
  std::memcpy(&bits, src, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    bits = sizeof(T) == 8 ? __builtin_bswap64(bits) : __builtin_bswap32(bits);
  }
  return std::bit_cast<T>(bits);
}

std::string BlobName(const std::string& class_name) {
  return "gt_" + class_name + ".bin";
}

std::vector<std::byte> ReadBinary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

[[noreturn]] void Corrupt(const std::string& message) {
  throw Error(ErrorKind::kMalformedDatabase, message);
}

std::vector<GtObject> ExtractObjects(const FrameData& frame,
                                     const std::vector<std::string>& classes) {
  std::vector<GtObject> objects;
  for (const kitti::Label& label : frame.labels) {
    if (label.IsDontCare()) continue;
    if (std::find(classes.begin(), classes.end(), label.class_name) ==
        classes.end()) {
      continue;
    }
    GtObject object;
    object.class_name = label.class_name;
    object.box = kitti::LabelToLidarBox(label, frame.calib);
    object.source_frame = frame.id;
    for (std::size_t i : PointsInBox(frame.cloud, object.box)) {
      object.points.push_back(frame.cloud[i]);
    }
    objects.push_back(std::move(object));
  }
  return objects;
}

}  // namespace

void GtDatabase::Add(GtObject object) {
  objects_[object.class_name].push_back(std::move(object));
}

const std::vector<GtObject>& GtDatabase::Objects(
    const std::string& class_name) const {
  static const std::vector<GtObject> kEmpty;
  const auto it = objects_.find(class_name);
  return it == objects_.end() ? kEmpty : it->second;
}

std::vector<std::string> GtDatabase::ClassNames() const {
  std::vector<std::string> names;
  for (const auto& [name, objects] : objects_) names.push_back(name);
  return names;
}

std::map<std::string, std::size_t> GtDatabase::ClassCounts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& [name, objects] : objects_) counts[name] = objects.size();
  return counts;
}

std::size_t GtDatabase::TotalCount() const {
  std::size_t total = 0;
  for (const auto& [name, objects] : objects_) total += objects.size();
  return total;
}

GtDatabase GtDatabase::FilterByMinPoints(
    const std::map<std::string, std::size_t>& min_points) const {
  GtDatabase filtered(metadata_);
  for (const auto& [name, objects] : objects_) {
    const auto it = min_points.find(name);
    const std::size_t threshold = it == min_points.end() ? 0 : it->second;
    for (const GtObject& object : objects) {
      if (object.num_points() >= threshold) filtered.Add(object);
    }
  }
  return filtered;
}

void GtDatabase::Save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string());

  json index;
  index["format"] = "pagt-gt-database";
  index["version"] = kFormatVersion;
  index["split"] = metadata_.split_name;
  index["build_timestamp"] = metadata_.build_timestamp;
  index["classes"] = json::array();

  std::uint32_t class_id = 0;
  for (const auto& [name, objects] : objects_) {
    std::vector<std::byte> blob;
    json entries = json::array();
    for (const GtObject& object : objects) {
      entries.push_back({{"offset", blob.size()},
                         {"num_points", object.num_points()},
                         {"distance", object.distance()},
                         {"source_frame", object.source_frame}});
      PutLe<std::uint32_t>(blob, class_id);
      for (double v : {object.box.cx, object.box.cy, object.box.cz,
                       object.box.l, object.box.w, object.box.h,
                       object.box.yaw}) {
        PutLe<double>(blob, v);
      }
      PutLe<std::uint32_t>(blob,
                           static_cast<std::uint32_t>(object.num_points()));
      for (const LidarPoint& p : object.points) {
        PutLe<float>(blob, static_cast<float>(p.x));
        PutLe<float>(blob, static_cast<float>(p.y));
        PutLe<float>(blob, static_cast<float>(p.z));
        PutLe<float>(blob, static_cast<float>(p.intensity));
      }
    }
    const std::filesystem::path blob_path = dir / BlobName(name);
    std::ofstream out(blob_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + blob_path.string());
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size()));
    if (!out) throw Error(ErrorKind::kIo, "short write to " + blob_path.string());

    index["classes"].push_back({{"name", name},
                                {"id", class_id},
                                {"count", objects.size()},
                                {"blob", BlobName(name)},
                                {"blob_bytes", blob.size()},
                                {"objects", std::move(entries)}});
    ++class_id;
  }
  kitti::WriteTextFile(dir / "index.json", index.dump(2) + "\n");
}

GtDatabase GtDatabase::Load(const std::filesystem::path& dir) {
  json index;
  try {
    index = json::parse(kitti::ReadTextFile(dir / "index.json"));
  } catch (const json::exception& e) {
    Corrupt(std::string("index.json: ") + e.what());
  }

  GtDatabase db;
  try {
    if (index.at("format") != "pagt-gt-database" ||
        index.at("version") != kFormatVersion) {
      Corrupt("unsupported index format");
    }
    db.metadata_.split_name = index.at("split").get<std::string>();
    db.metadata_.build_timestamp =
        index.at("build_timestamp").get<std::string>();

    for (const json& entry : index.at("classes")) {
      const auto name = entry.at("name").get<std::string>();
      const auto class_id = entry.at("id").get<std::uint32_t>();
      const auto count = entry.at("count").get<std::size_t>();
      const std::vector<std::byte> blob =
          ReadBinary(dir / entry.at("blob").get<std::string>());
      const json& objects = entry.at("objects");
      if (objects.size() != count) Corrupt(name + ": count mismatch");

      std::vector<GtObject>& stored = db.objects_[name];
      for (const json& meta : objects) {
        const auto offset = meta.at("offset").get<std::size_t>();
        if (offset + kObjectHeaderBytes > blob.size()) {
          Corrupt(name + ": object offset past end of blob");
        }
        const std::byte* src = blob.data() + offset;
        if (GetLe<std::uint32_t>(src) != class_id) {
          Corrupt(name + ": class id mismatch at offset " +
                  std::to_string(offset));
        }
        GtObject object;
        object.class_name = name;
        object.source_frame = meta.at("source_frame").get<std::string>();
        double fields[7];
        for (int i = 0; i < 7; ++i) fields[i] = GetLe<double>(src + 4 + 8 * i);
        object.box = {fields[0], fields[1], fields[2], fields[3],
                      fields[4], fields[5], fields[6]};
        const auto num_points = GetLe<std::uint32_t>(src + 60);
        if (num_points != meta.at("num_points").get<std::size_t>()) {
          Corrupt(name + ": point count mismatch at offset " +
                  std::to_string(offset));
        }
        const std::byte* pts = src + kObjectHeaderBytes;
        if (offset + kObjectHeaderBytes + num_points * kPointBytes >
            blob.size()) {
          Corrupt(name + ": points past end of blob");
        }
        object.points.resize(num_points);
        for (LidarPoint& p : object.points) {
          p = {GetLe<float>(pts), GetLe<float>(pts + 4), GetLe<float>(pts + 8),
               GetLe<float>(pts + 12)};
          pts += kPointBytes;
        }
        if (std::abs(object.distance() - meta.at("distance").get<double>()) >
            1e-9) {
          Corrupt(name + ": distance mismatch at offset " +
                  std::to_string(offset));
        }
        ValidateBox(object.box);
        ValidateCloud(object.points);
        stored.push_back(std::move(object));
      }
    }
  } catch (const json::exception& e) {
    Corrupt(std::string("index.json: ") + e.what());
  }
  return db;
}

GtDatabase BuildDatabase(std::span<const FrameData> frames,
                         const std::vector<std::string>& classes,
                         DatabaseMetadata metadata, std::size_t workers) {
  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frames[a].id < frames[b].id;
  });

  std::vector<std::vector<GtObject>> per_frame(frames.size());
  ParallelFor(order.size(), workers, [&](std::size_t k) {
    const FrameData& frame = frames[order[k]];
    try {
      per_frame[k] = ExtractObjects(frame, classes);
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + frame.id + ": " + e.what());
    }
  });

  GtDatabase db(std::move(metadata));
  for (std::vector<GtObject>& objects : per_frame) {
    for (GtObject& object : objects) db.Add(std::move(object));
  }
  return db;
}

std::vector<GtObject> SampleObjects(const GtDatabase& db,
                                    const std::string& class_name,
                                    std::size_t count, Rng& rng) {
  const std::vector<GtObject>& pool = db.Objects(class_name);
  if (pool.empty()) {
    throw Error(ErrorKind::kEmptyClass, "no objects of class " + class_name);
  }
  std::vector<GtObject> sampled;
  sampled.reserve(count);
  std::vector<std::size_t> indices(pool.size());
  while (sampled.size() < count) {
    std::iota(indices.begin(), indices.end(), 0);
    const std::size_t take = std::min(count - sampled.size(), pool.size());
    // Partial Fisher-Yates: the first `take` slots become a uniform draw.
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
      std::swap(indices[i], indices[pick(rng)]);
      sampled.push_back(pool[indices[i]]);
    }
  }
  return sampled;
}

InsertResult InsertObjects(const PointCloud& frame_cloud,
                           const std::vector<LabeledBox>& frame_boxes,
                           std::span<const GtObject> candidates) {
  InsertResult result;
  result.boxes = frame_boxes;
  result.accepted_mask.assign(candidates.size(), false);

  std::vector<const GtObject*> accepted;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const GtObject& candidate = candidates[c];
    const bool collides = std::any_of(
        result.boxes.begin(), result.boxes.end(), [&](const LabeledBox& b) {
          return BevOverlapArea(b.box, candidate.box) > 0.0;
        });
    if (collides) continue;
    result.boxes.push_back({candidate.class_name, candidate.box});
    result.accepted_mask[c] = true;
    accepted.push_back(&candidate);
  }
  result.accepted = accepted.size();

  result.cloud.reserve(frame_cloud.size());
  for (const LidarPoint& p : frame_cloud) {
    const bool covered =
        std::any_of(accepted.begin(), accepted.end(), [&](const GtObject* o) {
          return PointInFootprint(o->box, p);
        });
    if (!covered) result.cloud.push_back(p);
  }
  for (const GtObject* object : accepted) {
    result.cloud.insert(result.cloud.end(), object->points.begin(),
                        object->points.end());
  }
  return result;
}

std::vector<LabeledBox> FrameBoxes(const FrameData& frame) {
  std::vector<LabeledBox> boxes;
  for (const kitti::Label& label : frame.labels) {
    if (label.IsDontCare()) continue;
    boxes.push_back({label.class_name, kitti::LabelToLidarBox(label, frame.calib)});
  }
  return boxes;
}

}  // namespace pagt
