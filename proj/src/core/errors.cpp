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
#include "dptco/errors.hpp"

#include <sstream>

namespace dptco {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kTimeOutOfWindow: return "TimeOutOfWindow";
    case ErrorCode::kQuadratureFailure: return "QuadratureFailure";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kDegenerateSize: return "DegenerateSize";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kNotHurwitz: return "NotHurwitz";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kGuardExceeded: return "GuardExceeded";
    case ErrorCode::kEmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::kMarginTooSmall: return "MarginTooSmall";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kCriterionViolation: return "CriterionViolation";
  }
  return "Unknown";
}

namespace {

std::string describe_unreached(const std::vector<std::size_t>& nodes) {
  std::ostringstream os;
  os << "network is disconnected; unreached nodes {";
  for (std::size_t i = 0; i < nodes.size(); ++i)
    os << (i ? "," : "") << nodes[i];
  os << "}";
  return os.str();
}

std::string describe_non_finite(double t, std::size_t component) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite state component " << component << " at t=" << t;
  return os.str();
}

}  // namespace

DisconnectedError::DisconnectedError(std::vector<std::size_t> unreached)
    : Error(ErrorCode::kDisconnected, describe_unreached(unreached)),
      unreached_(std::move(unreached)) {}

NonFiniteStateError::NonFiniteStateError(double t, std::size_t component)
    : Error(ErrorCode::kNonFiniteState, describe_non_finite(t, component)),
      t_(t),
      component_(component) {}

}  // namespace dptco
