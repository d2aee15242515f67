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

#include "tritter/error.hpp"

namespace tritter {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension:
            return "invalid-dimension";
        case ErrorCode::Shape:
            return "shape";
        case ErrorCode::Size:
            return "size";
        case ErrorCode::Validation:
            return "validation";
        case ErrorCode::UnsupportedPattern:
            return "unsupported-pattern";
        case ErrorCode::InvalidOverlap:
            return "invalid-overlap";
        case ErrorCode::NoRecipe:
            return "no-recipe";
        case ErrorCode::NoTransform:
            return "no-transform";
        case ErrorCode::CannotScale:
            return "cannot-scale";
        case ErrorCode::Convergence:
            return "convergence";
        case ErrorCode::UndefinedVisibility:
            return "undefined-visibility";
        case ErrorCode::Fit:
            return "fit";
        case ErrorCode::Parse:
            return "parse";
        case ErrorCode::Io:
            return "io";
    }
    return "unknown";
}

}  // namespace tritter
