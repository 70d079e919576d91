// Copyright 2026 The sentclf Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sentclf {

// Every error thrown by the library derives from Error. The CLI maps the
// three families below onto its exit codes (1 config, 2 data, 3 diverged).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of an API or an invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Bad input data: unreadable files, malformed lines, shape mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

// Non-finite training loss.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, int iteration)
      : Error(what + " at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace sentclf
