// Copyright 2026 The spikevib Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spikevib {

// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInput = 3,
  kContract = 4,
  kTuning = 5,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
  virtual const char* kind() const noexcept = 0;
};

// Rejected input: bad arguments, mismatched rates, malformed files.
class InputError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInput; }
  const char* kind() const noexcept override { return "input"; }
};

// A filter could not be designed for the requested parameters.
class DesignError : public InputError {
 public:
  using InputError::InputError;
  const char* kind() const noexcept override { return "design"; }
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t line_;
};

// Caller broke an operation's precondition (e.g. non-monotone time).
class ContractError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kContract; }
  const char* kind() const noexcept override { return "contract"; }
};

class TuningError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kTuning; }
  const char* kind() const noexcept override { return "tuning"; }
};

}  // namespace spikevib
