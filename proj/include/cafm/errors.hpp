// Copyright 2026 The cafm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cafm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Formula syntax error. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column,
             std::string token);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string token_;
};

class InvalidNameError : public Error {
 public:
  explicit InvalidNameError(const std::string& name);
};

/// A variable of the formula has no entry in the assignment.
class UnboundVariableError : public Error {
 public:
  explicit UnboundVariableError(std::string name);
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A model, context assignment or product breaks a subset/disjointness rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class StackUnderflowError : public Error {
 public:
  StackUnderflowError() : Error("pop() called with no open push level") {}
};

class NoModelError : public Error {
 public:
  NoModelError() : Error("no model available: last check was not satisfiable or state changed since") {}
};

/// A time, cancellation or refinement budget ran out before a verdict.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace cafm
