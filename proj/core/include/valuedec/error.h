// Copyright 2026 The valuedec Authors.
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

#ifndef VALUEDEC_ERROR_H_
#define VALUEDEC_ERROR_H_

#include <stdexcept>
#include <string>

namespace valuedec {

// Root of every exception thrown by the library. `kind()` is a stable short
// tag used by the CLI when it reports structured JSON errors.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid_argument", message) {}
};

// Corrupt or unsupported on-disk data (bad magic, version, truncation).
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message)
      : Error("format_error", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

// A text record that failed to parse. `line()` is 1-based, 0 if unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("parse_error", "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Every legal continuation of a prefix received zero probability mass.
class DeadPrefixError : public Error {
 public:
  explicit DeadPrefixError(const std::string& message)
      : Error("dead_prefix", message) {}
};

class VocabularyMismatch : public Error {
 public:
  explicit VocabularyMismatch(const std::string& message)
      : Error("vocabulary_mismatch", message) {}
};

}  // namespace valuedec

#endif  // VALUEDEC_ERROR_H_
