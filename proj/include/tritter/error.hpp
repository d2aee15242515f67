// Copyright 2026 The Tritter Authors
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

namespace tritter {

/// Failure categories. Validation errors come from bad inputs or configs;
/// numerical errors come from algorithms that could not produce a result.
enum class ErrorCode {
    InvalidDimension,
    Shape,
    Size,
    Validation,
    UnsupportedPattern,
    InvalidOverlap,
    NoRecipe,
    NoTransform,
    CannotScale,
    Convergence,
    UndefinedVisibility,
    Fit,
    Parse,
    Io,
};

enum class ErrorCategory { Validation, Numerical };

constexpr ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::CannotScale:
        case ErrorCode::Convergence:
        case ErrorCode::UndefinedVisibility:
        case ErrorCode::Fit:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Validation;
    }
}

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

   private:
    ErrorCode code_;
};

}  // namespace tritter
