// Copyright 2026 The Peaqlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PEAQLAB_ERROR_HPP_
#define PEAQLAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace peaqlab {

enum class ErrorKind {
  kFileNotFound,
  kParseError,
  kMissingColumn,
  kDuplicateKey,
  kOutOfRangeScore,
  kNonPositiveCI,
  kInconsistentContentType,
  kUnmatchedKeys,
  kInconsistentFeatureSet,
  kUnsupportedFormat,
  kCorruptHeader,
  kLagOutOfRange,
  kSilentInput,
  kConfigMismatch,
  kShapeMismatch,
  kEmptyAfterWarmup,
  kDegenerateDesign,
  kTooFewRows,
  kPenaltyExceedsRows,
  kFeatureMismatch,
  kDimensionMismatch,
  kConstantInput,
  kLengthMismatch,
  kTooFewSamples,
  kDegenerateSplit,
  kSchemaVersionMismatch,
  kChecksumMismatch,
  kInternal,
};

const char* error_kind_name(ErrorKind kind);

/// Toolkit-wide exception type; carries a machine-readable kind next to the
/// human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace peaqlab

#endif  // PEAQLAB_ERROR_HPP_
