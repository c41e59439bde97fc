#pragma once

#include <stdexcept>
#include <string>

namespace acts {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector/matrix shapes disagree with the model or kernel dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A covariance factorization failed even after the last jitter level.
class CholeskyError : public Error {
 public:
  CholeskyError(const std::string& what, double last_jitter)
      : Error(what), last_jitter_(last_jitter) {}
  double last_jitter() const noexcept { return last_jitter_; }

 private:
  double last_jitter_;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Mask probabilities requested for an all-zero gradient.
class DegenerateGradientError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace acts
