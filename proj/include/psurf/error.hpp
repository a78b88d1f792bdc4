#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psurf {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is 1-based; end of input is size() + 1.
class ParseError : public Error {
public:
  ParseError(std::size_t offset, std::string expected, const std::string& what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

/// Evaluation failure: unbound variable or a value outside a function's domain.
class EvalError : public Error {
public:
  using Error::Error;
};

/// Numerical linear-algebra failure (singular matrix, no convergence, ...).
class LinAlgError : public Error {
public:
  using Error::Error;
};

/// The surface is degenerate at the requested point.
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Invalid input file or command-line configuration.
class InputError : public Error {
public:
  using Error::Error;
};

}  // namespace psurf
