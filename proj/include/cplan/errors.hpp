// Copyright 2026 The cplan Authors
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

#ifndef CPLAN_ERRORS_HPP_
#define CPLAN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cplan {

// Error kinds surfaced by the library. The C API maps each one onto a status
// code, so keep the two lists in sync (see cplan.h).
enum class ErrorCode {
  kInvalidArgument = 1,
  kDegenerateGeometry,
  kInvalidArcLength,
  kInsufficientHorizon,
  kReverseMotion,
  kParse,
  kVersion,
  kIo,
  kAugmentInfeasible,
  kRelabelDegenerate,
  kCluster,
  kNoCandidates,
  kShape,
  kTrainingDiverged,
  kPathExhausted,
  kConfig,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace cplan

#endif  // CPLAN_ERRORS_HPP_
