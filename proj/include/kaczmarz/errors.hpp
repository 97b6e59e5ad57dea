#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kaczmarz {

// A row of the input matrix is (numerically) the zero vector and cannot be
// normalized; carries the offending row index.
class ZeroRowError : public std::invalid_argument {
 public:
  explicit ZeroRowError(std::size_t row)
      : std::invalid_argument("row " + std::to_string(row) +
                              " has numerically zero norm"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// Residual is numerically zero: the residual-weighted distribution is
// undefined because the system is already solved. Solvers treat this as a
// clean termination, not a failure.
class SolutionReached : public std::runtime_error {
 public:
  SolutionReached() : std::runtime_error("residual is numerically zero") {}
};

// The cyclic rule is deterministic and has no probability profile.
class RuleNotStochastic : public std::invalid_argument {
 public:
  RuleNotStochastic()
      : std::invalid_argument("cyclic rule has no sampling profile") {}
};

// Expectation of the next error is undefined at the exact solution.
class AtSolution : public std::invalid_argument {
 public:
  AtSolution() : std::invalid_argument("iterate already solves the system") {}
};

class ZeroVectorError : public std::invalid_argument {
 public:
  ZeroVectorError() : std::invalid_argument("vector is numerically zero") {}
};

// Factorization of A^T A broke down: the matrix is (near-)rank-deficient.
class SingularOrIllConditioned : public std::runtime_error {
 public:
  explicit SingularOrIllConditioned(const std::string& what)
      : std::runtime_error(what) {}
};

// The rate-functional minimizer produced a value below the proven lower
// bound; indicates an implementation bug, never a property of the input.
class FloorViolated : public std::logic_error {
 public:
  FloorViolated(double estimate, double floor)
      : std::logic_error("rate functional estimate " +
                         std::to_string(estimate) +
                         " below proven floor " + std::to_string(floor)) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Matrix/RHS file did not parse; carries the 1-based line number.
class BadMatrixFile : public std::runtime_error {
 public:
  BadMatrixFile(const std::string& path, std::size_t line,
                const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class GeneratorError : public std::invalid_argument {
 public:
  explicit GeneratorError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace kaczmarz
