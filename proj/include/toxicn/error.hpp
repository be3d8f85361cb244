// Copyright 2026 The toxicn Authors
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

#ifndef TOXICN_ERROR_HPP_
#define TOXICN_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace toxicn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. Carries the offending location when
// it is known (1-based line number, 0 when not applicable).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::string source = {},
            std::size_t line = 0)
      : Error(Format(what, source, line)),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  static std::string Format(const std::string& what, const std::string& source,
                            std::size_t line) {
    std::string out;
    if (!source.empty()) out += source;
    if (line != 0) out += (out.empty() ? "line " : ":") + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::string source_;
  std::size_t line_;
};

// A record that does not decode into a ToxiSample.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::string field, std::size_t record)
      : DataError("record " + std::to_string(record) +
                  (field.empty() ? "" : ", field '" + field + "'") + ": " +
                  what),
        field_(std::move(field)),
        record_(record) {}

  const std::string& field() const { return field_; }
  std::size_t record() const { return record_; }

 private:
  std::string field_;
  std::size_t record_;
};

// Shapes, indices or configuration values outside their contract.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace toxicn

#endif  // TOXICN_ERROR_HPP_
