// sfb/errors.h

// Copyright 2026  The sfb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SFB_ERRORS_H_
#define SFB_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfb {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A weight was built from NaN, +inf, or a value outside its semiring.
class InvalidWeightError : public Error {
 public:
  using Error::Error;
};

/// Semifield division by the zero element.
class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// Shapes of two operands do not agree, or an index is out of range.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed graph text or likelihood container.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The total weight of all accepting paths is the zero element.
class EmptyLatticeError : public Error {
 public:
  explicit EmptyLatticeError(const std::string &which)
      : Error("empty lattice: " + which + " has no accepting path"),
        which_(which) {}
  const std::string &which() const noexcept { return which_; }

 private:
  std::string which_;
};

/// Requested sizes cannot be realized (graph generation, oracle guard,
/// benchmark memory budget).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace sfb

#endif  // SFB_ERRORS_H_
