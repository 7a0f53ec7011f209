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

#include "pagt/errors.hpp"

namespace pagt {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedCloud: return "MalformedCloud";
    case ErrorKind::kMalformedLabel: return "MalformedLabel";
    case ErrorKind::kMissingCalibKey: return "MissingCalibKey";
    case ErrorKind::kMalformedCalib: return "MalformedCalib";
    case ErrorKind::kDegenerateBox: return "DegenerateBox";
    case ErrorKind::kDegenerateLocation: return "DegenerateLocation";
    case ErrorKind::kOutOfGrid: return "OutOfGrid";
    case ErrorKind::kEmptyClass: return "EmptyClass";
    case ErrorKind::kTooFewSamples: return "TooFewSamples";
    case ErrorKind::kEmptyCloud: return "EmptyCloud";
    case ErrorKind::kMalformedDatabase: return "MalformedDatabase";
    case ErrorKind::kMissingInput: return "MissingInput";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace pagt
