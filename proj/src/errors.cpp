// Copyright 2026 The Privest Authors
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

#include "privest/errors.hpp"

namespace privest {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDOutOfRange: return "d_out_of_range";
    case ErrorCode::kAlphabetTooLarge: return "alphabet_too_large";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kEpsilonZero: return "epsilon_zero";
    case ErrorCode::kRankDeficient: return "rank_deficient";
    case ErrorCode::kZeroClassMass: return "zero_class_mass";
    case ErrorCode::kSingularPhi: return "singular_phi";
    case ErrorCode::kNotPositiveDefinite: return "not_positive_definite";
    case ErrorCode::kNotExtremal: return "not_extremal";
    case ErrorCode::kSupportMismatch: return "support_mismatch";
    case ErrorCode::kSimplexViolation: return "simplex_violation";
    case ErrorCode::kDegenerateDelta: return "degenerate_delta";
    case ErrorCode::kDomainViolation: return "domain_violation";
    case ErrorCode::kResolutionTooCoarse: return "resolution_too_coarse";
    case ErrorCode::kUnsupportedK: return "unsupported_k";
    case ErrorCode::kParseError: return "parse_error";
  }
  return "unknown";
}

bool Error::is_usage() const {
  switch (code_) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDOutOfRange:
    case ErrorCode::kAlphabetTooLarge:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kEpsilonZero:
    case ErrorCode::kResolutionTooCoarse:
    case ErrorCode::kUnsupportedK:
    case ErrorCode::kParseError:
      return true;
    default:
      return false;
  }
}

}  // namespace privest
