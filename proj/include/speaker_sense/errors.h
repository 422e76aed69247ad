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

#ifndef SPEAKER_SENSE_ERRORS_H_
#define SPEAKER_SENSE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <string>

namespace speaker_sense {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `line` is 1-based; 0 when the error is not tied to a
// particular line (e.g. an empty file).
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, std::string field,
             const std::string& detail)
      : Error(Format(path, line, field, detail)),
        path_(std::move(path)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string Format(const std::string& path, std::size_t line,
                            const std::string& field,
                            const std::string& detail) {
    std::string msg = path;
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += ": field '" + field + "'";
    msg += ": " + detail;
    return msg;
  }

  std::string path_;
  std::size_t line_;
  std::string field_;
};

// A precondition on the arguments does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// No mapping satisfies the sampling constraints.
class InfeasibleError : public Error {
 public:
  InfeasibleError(std::string speaker, const std::string& detail)
      : Error("cannot map speaker '" + speaker + "': " + detail),
        speaker_(std::move(speaker)) {}

  const std::string& speaker() const { return speaker_; }

 private:
  std::string speaker_;
};

// Transient transport failure; the caller may retry.
class RetriableError : public Error {
 public:
  using Error::Error;
};

// Remote service answered with something that violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace speaker_sense

#endif  // SPEAKER_SENSE_ERRORS_H_
