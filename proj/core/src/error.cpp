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

#include "cnat/error.hpp"

namespace cnat {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kBadTarget: return "BadTarget";
    case ErrorCode::kNonScalarLoss: return "NonScalarLoss";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBadTokenId: return "BadTokenId";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kEmptyDecoderInput: return "EmptyDecoderInput";
    case ErrorCode::kLengthOverflow: return "LengthOverflow";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kFertilityOverflow: return "FertilityOverflow";
    case ErrorCode::kInfeasibleLength: return "InfeasibleLength";
    case ErrorCode::kVocabMismatch: return "VocabMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kRegimeDataMismatch: return "RegimeDataMismatch";
    case ErrorCode::kBadRule: return "BadRule";
    case ErrorCode::kEmptyEval: return "EmptyEval";
    case ErrorCode::kBalanceInfeasible: return "BalanceInfeasible";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
      code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cnat
