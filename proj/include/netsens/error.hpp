#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netsens {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, edge sets, directions).
class DataError : public Error {
public:
  using Error::Error;
};

// Parse failure with the offending line (1-based; 0 when not line related).
class ParseError : public DataError {
public:
  ParseError(std::size_t line, const std::string& what)
      : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// The dense path was requested for a graph larger than the configured limit.
class DenseLimitError : public DataError {
public:
  DenseLimitError(std::size_t n, std::size_t limit)
      : DataError("graph has " + std::to_string(n) + " nodes, dense limit is " + std::to_string(limit) +
                  "; use a Krylov estimator instead"),
        n_(n),
        limit_(limit) {}

  std::size_t nodes() const noexcept { return n_; }
  std::size_t limit() const noexcept { return limit_; }

private:
  std::size_t n_;
  std::size_t limit_;
};

// Non-convergence, breakdown, overflow and similar numerical failures.
class NumericalError : public Error {
public:
  using Error::Error;
};

class OverflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Serious breakdown of the two-sided Lanczos recurrence at the given step.
class SeriousBreakdown : public NumericalError {
public:
  explicit SeriousBreakdown(std::size_t step)
      : NumericalError("serious Lanczos breakdown at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

} // namespace netsens
