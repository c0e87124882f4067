/*
 * Copyright 2026 The snapgap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "snapgap/error.h"

namespace snapgap {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMissingColumn: return "MissingColumn";
    case ErrorKind::kUnreadableStream: return "UnreadableStream";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kNonNumericZip: return "NonNumericZip";
    case ErrorKind::kLengthOverflow: return "LengthOverflow";
    case ErrorKind::kZeroPoverty: return "ZeroPoverty";
    case ErrorKind::kNoEligibleRows: return "NoEligibleRows";
    case ErrorKind::kDegenerateDesign: return "DegenerateDesign";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
    case ErrorKind::kNonConvergence: return "NonConvergence";
    case ErrorKind::kSingleClass: return "SingleClass";
    case ErrorKind::kFeatureMismatch: return "FeatureMismatch";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kTooFewPositives: return "TooFewPositives";
    case ErrorKind::kInsufficientData: return "InsufficientData";
    case ErrorKind::kDegeneratePrevalence: return "DegeneratePrevalence";
    case ErrorKind::kNoPositives: return "NoPositives";
    case ErrorKind::kPeriodsOverlap: return "PeriodsOverlap";
    case ErrorKind::kInsufficientCohort: return "InsufficientCohort";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
    case ErrorKind::kIoFailure: return "IoFailure";
    case ErrorKind::kParseError: return "ParseError";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInsufficientCohort:
    case ErrorKind::kTooFewPositives:
    case ErrorKind::kNoEligibleRows:
    case ErrorKind::kSingleClass:
    case ErrorKind::kNoPositives:
      return 3;
    case ErrorKind::kUnreadableStream:
    case ErrorKind::kIoFailure:
      return 4;
    default:
      return 2;
  }
}

}  // namespace snapgap
