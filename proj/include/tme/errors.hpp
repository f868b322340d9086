#pragma once

#include <stdexcept>
#include <string>

namespace tme {

/// Thrown when the sample size fails the necessary condition for the
/// covariance MLEs to exist. Fitting must refuse to proceed.
class ExistenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a file cannot be read or does not match its declared format.
class FileFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when no candidate rank combination satisfies the sparsity criterion.
class RankSelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a normal-equation system is singular; the message names the
/// mode whose design factor lost rank.
class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an iterative fit produces a non-finite log-likelihood,
/// signalling covariance collapse. Carries the iteration number.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace tme
