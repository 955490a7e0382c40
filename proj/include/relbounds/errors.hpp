#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relbounds {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (dimension mismatch, range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization or an eigenvalue check found a nonpositive pivot.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, std::size_t pivot, double value)
      : Error(what), pivot_(pivot), value_(value) {}

  /// Index of the failing pivot / eigenvalue (0-based).
  std::size_t pivot() const noexcept { return pivot_; }
  /// The offending pivot or eigenvalue.
  double value() const noexcept { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

/// A matrix that has to be inverted is numerically singular.
class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, double smallest)
      : Error(what), smallest_(smallest) {}

  double smallest_magnitude() const noexcept { return smallest_; }

 private:
  double smallest_;
};

/// Jacobi iteration hit the sweep cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double off_norm)
      : Error(what), off_norm_(off_norm) {}

  double off_diagonal_norm() const noexcept { return off_norm_; }

 private:
  double off_norm_;
};

/// The hypothesis under which a bound is stated does not hold, and the bound
/// cannot even be evaluated (e.g. a nonpositive gap in a denominator).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class FileNotFound : public Error {
 public:
  using Error::Error;
};

}  // namespace relbounds
