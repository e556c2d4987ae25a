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

#ifndef PRIVEST_ERRORS_HPP_
#define PRIVEST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace privest {

enum class ErrorCode {
  kInvalidArgument,
  kDOutOfRange,
  kAlphabetTooLarge,
  kDimensionMismatch,
  kEpsilonZero,
  kRankDeficient,
  kZeroClassMass,
  kSingularPhi,
  kNotPositiveDefinite,
  kNotExtremal,
  kSupportMismatch,
  kSimplexViolation,
  kDegenerateDelta,
  kDomainViolation,
  kResolutionTooCoarse,
  kUnsupportedK,
  kParseError,
};

const char* ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported as Error. The code
// distinguishes parameter-validation failures from numerical ones; the C API
// and the CLI map codes onto their status values and exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // True for errors caused by bad parameters rather than by numerics.
  bool is_usage() const;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace privest

#endif  // PRIVEST_ERRORS_HPP_
