// Copyright 2026 The Speaker Sense Authors.
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

// RFC 4180-style delimited text: quoted fields, doubled quotes inside quotes,
// CRLF or LF line endings.

#ifndef SPEAKER_SENSE_SRC_CSV_H_
#define SPEAKER_SENSE_SRC_CSV_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace speaker_sense::internal {

struct CsvRow {
  std::size_t line;  // 1-based line where the row starts
  std::vector<std::string> fields;
};

// Throws ParseError (with `source`) on an unterminated quoted field.
std::vector<CsvRow> ParseCsv(std::string_view text, char delimiter,
                             const std::string& source);

std::string CsvEscape(std::string_view field, char delimiter = ',');

std::string CsvLine(const std::vector<std::string>& fields,
                    char delimiter = ',');

}  // namespace speaker_sense::internal

#endif  // SPEAKER_SENSE_SRC_CSV_H_
