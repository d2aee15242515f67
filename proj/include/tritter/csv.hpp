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

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace tritter::csv {

struct Row {
    std::size_t line = 0;  // 1-based line number in the source
    std::vector<std::string> fields;
};

/// Splits comma-separated lines, trimming whitespace and skipping blank lines.
/// Quoting is not supported; none of the formats here need it.
std::vector<Row> read_rows(std::istream &in);

std::optional<double> to_number(const std::string &field);

/// True when no field of the row parses as a number.
bool looks_like_header(const Row &row);

}  // namespace tritter::csv
