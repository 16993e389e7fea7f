#pragma once

#include <stdexcept>
#include <string>

namespace dsgda {

// Shape mismatch between states, matrices or samples.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when the mixing matrix has no spectral gap (lambda numerically 1).
class SpectralGapError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A bound was asked for outside the regime where it is stated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int round, int step)
      : std::runtime_error("non-finite iterate at round " + std::to_string(round) +
                           ", local step " + std::to_string(step)),
        round_(round),
        step_(step) {}
  int round() const { return round_; }
  int step() const { return step_; }

 private:
  int round_;
  int step_;
};

}  // namespace dsgda
