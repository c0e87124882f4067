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

#ifndef SNAPGAP_ERROR_H_
#define SNAPGAP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace snapgap {

// Every failure the engine reports. The CLI maps each kind onto an exit code
// through ExitCodeFor().
enum class ErrorKind {
  // ingest
  kMissingColumn,
  kUnreadableStream,
  kEmptyInput,
  kNonNumericZip,
  kLengthOverflow,
  // labeling
  kZeroPoverty,
  kNoEligibleRows,
  kDegenerateDesign,
  kInvalidConfig,
  // models
  kNonConvergence,
  kSingleClass,
  kFeatureMismatch,
  kInvalidParams,
  kTooFewPositives,
  // calibration
  kInsufficientData,
  kDegeneratePrevalence,
  // metrics
  kNoPositives,
  // pipeline
  kPeriodsOverlap,
  kInsufficientCohort,
  kInvalidSpec,
  kIoFailure,
  kParseError,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// 2 validation, 3 insufficient cohort, 4 I/O.
int ExitCodeFor(ErrorKind kind);

}  // namespace snapgap

#endif  // SNAPGAP_ERROR_H_
