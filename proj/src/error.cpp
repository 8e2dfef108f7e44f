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

#include "peaqlab/error.hpp"

namespace peaqlab {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFileNotFound: return "FileNotFound";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kMissingColumn: return "MissingColumn";
    case ErrorKind::kDuplicateKey: return "DuplicateKey";
    case ErrorKind::kOutOfRangeScore: return "OutOfRangeScore";
    case ErrorKind::kNonPositiveCI: return "NonPositiveCI";
    case ErrorKind::kInconsistentContentType: return "InconsistentContentType";
    case ErrorKind::kUnmatchedKeys: return "UnmatchedKeys";
    case ErrorKind::kInconsistentFeatureSet: return "InconsistentFeatureSet";
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kCorruptHeader: return "CorruptHeader";
    case ErrorKind::kLagOutOfRange: return "LagOutOfRange";
    case ErrorKind::kSilentInput: return "SilentInput";
    case ErrorKind::kConfigMismatch: return "ConfigMismatch";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kEmptyAfterWarmup: return "EmptyAfterWarmup";
    case ErrorKind::kDegenerateDesign: return "DegenerateDesign";
    case ErrorKind::kTooFewRows: return "TooFewRows";
    case ErrorKind::kPenaltyExceedsRows: return "PenaltyExceedsRows";
    case ErrorKind::kFeatureMismatch: return "FeatureMismatch";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kConstantInput: return "ConstantInput";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kTooFewSamples: return "TooFewSamples";
    case ErrorKind::kDegenerateSplit: return "DegenerateSplit";
    case ErrorKind::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace peaqlab
