#ifndef EDGECORR_ERRORS_HPP
#define EDGECORR_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgecorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or evidence text. Carries the 1-based position of the
/// offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Table length or scope arity does not fit what the operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value index lies outside the variable's domain.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A variable is not where the operation requires it to be.
class ScopeError : public Error {
 public:
  using Error::Error;
};

/// Every joint configuration has zero weight (inconsistent evidence).
class ZeroPartition : public Error {
 public:
  using Error::Error;
};

/// An edge-parameter update produced an all-zero derivative vector.
class DegenerateUpdate : public Error {
 public:
  using Error::Error;
};

/// A conditional Pr'(x_i | x_j) was requested where Pr'(x_j) = 0.
class ZeroConditional : public Error {
 public:
  using Error::Error;
};

/// A belief puts mass on a configuration whose potential is zero.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration would exceed the configured state budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A generator spec cannot be realized.
class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace edgecorr

#endif  // EDGECORR_ERRORS_HPP
