/*
 * Copyright 2026 The xbandit Authors.
 *
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xbandit {

enum class ErrorCode {
  kInvalidArgument,
  kNonNormalized,
  kOutOfRange,
  kNotContinuous,
  kIndexTooLarge,
  kPropertyViolation,
  kHorizonOverflow,
  kContinuousArm,
  kBudgetExceeded,
  kUnknownPolicy,
  kConfigInvalid,
  kIoFailure,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonNormalized: return "NonNormalized";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kNotContinuous: return "NotContinuous";
    case ErrorCode::kIndexTooLarge: return "IndexTooLarge";
    case ErrorCode::kPropertyViolation: return "PropertyViolation";
    case ErrorCode::kHorizonOverflow: return "HorizonOverflow";
    case ErrorCode::kContinuousArm: return "ContinuousArm";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kUnknownPolicy: return "UnknownPolicy";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kIoFailure: return "IoFailure";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when an integer horizon does not fit; the log of the real-valued
// horizon is still available to callers working in log space.
class HorizonOverflow : public Error {
 public:
  HorizonOverflow(double log_horizon, const std::string& message)
      : Error(ErrorCode::kHorizonOverflow, message), log_horizon_(log_horizon) {}

  double log_horizon() const noexcept { return log_horizon_; }

 private:
  double log_horizon_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace xbandit
