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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pagt {

enum class ErrorKind {
  kMalformedCloud,
  kMalformedLabel,
  kMissingCalibKey,
  kMalformedCalib,
  kDegenerateBox,
  kDegenerateLocation,
  kOutOfGrid,
  kEmptyClass,
  kTooFewSamples,
  kEmptyCloud,
  kMalformedDatabase,
  kMissingInput,
  kInvalidArgument,
  kInvalidConfig,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown when a label line fails to parse; line numbers are 1-based.
class MalformedLabelError : public Error {
 public:
  MalformedLabelError(int line, const std::string& message)
      : Error(ErrorKind::kMalformedLabel,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace pagt
