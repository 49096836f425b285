// Copyright 2026 The acr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acr/error.hpp"

namespace acr {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMissingOutcome: return "missing-outcome";
    case ErrorCode::kNonBinaryTreatment: return "non-binary-treatment";
    case ErrorCode::kNonNumeric: return "non-numeric";
    case ErrorCode::kTooFewRows: return "too-few-rows";
    case ErrorCode::kCountGuard: return "count-guard";
    case ErrorCode::kDegenerateDesign: return "degenerate-design";
    case ErrorCode::kEmptyArm: return "empty-arm";
    case ErrorCode::kDegenerateSe: return "degenerate-se";
    case ErrorCode::kDegeneratePhi: return "degenerate-phi";
    case ErrorCode::kArityMismatch: return "arity-mismatch";
    case ErrorCode::kNonFinite: return "non-finite";
    case ErrorCode::kMissingScore: return "missing-score";
    case ErrorCode::kPValueRange: return "p-value-range";
    case ErrorCode::kNegativeEValue: return "negative-e-value";
  }
  return "unknown";
}

}  // namespace acr
