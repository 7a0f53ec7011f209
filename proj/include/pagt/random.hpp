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

#include <cstdint>
#include <random>
#include <string_view>

namespace pagt {

using Rng = std::mt19937_64;

// Stable 64-bit FNV-1a hash; std::hash is not stable across implementations.
std::uint64_t StableHash(std::string_view text);

// Independent per-frame stream derived from (global seed, frame id).
Rng FrameRng(std::uint64_t global_seed, std::string_view frame_id);

}  // namespace pagt
