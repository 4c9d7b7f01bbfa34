/******************************************************************************
 * Copyright 2026 The DPTCO Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dptco {

enum class ErrorCode {
  kInvalidArgument,
  kTimeOutOfWindow,
  kQuadratureFailure,
  kSelfLoop,
  kNegativeWeight,
  kDisconnected,
  kDegenerateSize,
  kDimensionMismatch,
  kNoConvergence,
  kNonPositiveInput,
  kNotHurwitz,
  kSingularSystem,
  kGuardExceeded,
  kEmptyTrajectory,
  kMarginTooSmall,
  kNonFiniteState,
  kStepUnderflow,
  kIoFailure,
  kParseError,
  kConfigError,
  kSchemaMismatch,
  kCriterionViolation,
};

const char* error_code_name(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DisconnectedError : public Error {
 public:
  explicit DisconnectedError(std::vector<std::size_t> unreached);
  const std::vector<std::size_t>& unreached() const noexcept {
    return unreached_;
  }

 private:
  std::vector<std::size_t> unreached_;
};

class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(double t, std::size_t component);
  double time() const noexcept { return t_; }
  std::size_t component() const noexcept { return component_; }

 private:
  double t_;
  std::size_t component_;
};

/// Config/parse error carrying a 1-based source line (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, const std::string& what, std::size_t line = 0)
      : Error(code, what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dptco
