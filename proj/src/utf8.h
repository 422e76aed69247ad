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

// Minimal UTF-8 helpers shared by the tokenizer and the name matcher.
// Invalid sequences decode to U+FFFD one byte at a time.

#ifndef SPEAKER_SENSE_SRC_UTF8_H_
#define SPEAKER_SENSE_SRC_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace speaker_sense::internal {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes the code point starting at text[pos]; stores its byte length in
// *len (always >= 1).
char32_t DecodeUtf8(std::string_view text, std::size_t pos, std::size_t* len);

void AppendUtf8(char32_t cp, std::string* out);

// Letters and digits in the loose sense used for tokenization: ASCII
// alphanumerics plus any non-ASCII code point outside the punctuation,
// symbol, and emoji blocks.
bool IsWordCodePoint(char32_t cp);

// Simple one-to-one lowercase mapping for ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic capitals. Other code points are returned unchanged.
char32_t ToLowerCodePoint(char32_t cp);

}  // namespace speaker_sense::internal

#endif  // SPEAKER_SENSE_SRC_UTF8_H_
