#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace blochlab {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A function evaluator failed (point outside the domain, non-finite value).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Successive refinements did not agree within the budget. Carries the last
/// two iterates so callers can judge how far off the answer is.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::complex<double> previous,
                   std::complex<double> last)
      : std::runtime_error(what), previous_(previous), last_(last) {}

  std::complex<double> previous() const { return previous_; }
  std::complex<double> last() const { return last_; }

 private:
  std::complex<double> previous_;
  std::complex<double> last_;
};

/// Malformed textual input; `position()` is the 0-based offset of the problem.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// A rigorous check could neither confirm nor refute its claim.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blochlab
