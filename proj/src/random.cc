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

#include "pagt/random.hpp"

namespace pagt {

std::uint64_t StableHash(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Rng FrameRng(std::uint64_t global_seed, std::string_view frame_id) {
  const std::uint64_t frame_hash = StableHash(frame_id);
  std::seed_seq seq{static_cast<std::uint32_t>(global_seed),
                    static_cast<std::uint32_t>(global_seed >> 32),
                    static_cast<std::uint32_t>(frame_hash),
                    static_cast<std::uint32_t>(frame_hash >> 32)};
  return Rng(seq);
}

}  // namespace pagt
