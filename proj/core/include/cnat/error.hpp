// Copyright 2026 The cnat Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnat {

/// Every failure the library can raise. The CLI maps any of these to a
/// nonzero exit status.
enum class ErrorCode {
  kNonFiniteInput,
  kBadTarget,
  kNonScalarLoss,
  kShapeMismatch,
  kBadTokenId,
  kEmptyInput,
  kEmptyDecoderInput,
  kLengthOverflow,
  kLengthMismatch,
  kFertilityOverflow,
  kInfeasibleLength,
  kVocabMismatch,
  kNonFiniteLoss,
  kRegimeDataMismatch,
  kBadRule,
  kEmptyEval,
  kBalanceInfeasible,
  kParse,
  kIo,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace cnat
