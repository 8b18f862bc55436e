#pragma once

#include <stdexcept>
#include <string>

namespace rssgp {

/// Raised when the Gram matrix of an exact GP cannot be factorized reliably,
/// even after the full jitter ladder.
class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, double final_jitter)
      : std::runtime_error(what), final_jitter_(final_jitter) {}

  double final_jitter() const { return final_jitter_; }

 private:
  double final_jitter_;
};

/// Numerical failure that is not a user error (e.g. a Monte-Carlo estimator
/// losing too many samples).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rssgp
