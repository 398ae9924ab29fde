// Copyright 2026 The circsketch Authors.
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

#ifndef CIRCSKETCH_ERRORS_H_
#define CIRCSKETCH_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace circsketch {

// Root of the library's exception hierarchy. The CLI maps subclasses onto
// exit codes (validation/IO -> 1, budget -> 2, convergence -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index or shift outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Any other precondition violation (bad parameter, duplicate shifts, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed the configured budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual,
                   std::vector<double> trace = {})
      : Error(what), last_residual_(last_residual), trace_(std::move(trace)) {}

  double last_residual() const { return last_residual_; }
  const std::vector<double>& trace() const { return trace_; }

 private:
  double last_residual_;
  std::vector<double> trace_;
};

// Non-finite value produced where a finite one is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace circsketch

#endif  // CIRCSKETCH_ERRORS_H_
