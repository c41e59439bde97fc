#pragma once

#include <cmath>
#include <random>

#include "acts/gp.hpp"
#include "acts/types.hpp"

namespace testing {

using acts::Matrix;
using acts::Vector;

inline Matrix random_points(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = u(rng);
  return x;
}

inline Vector random_vector(Eigen::Index d, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (Eigen::Index j = 0; j < d; ++j) v[j] = u(rng);
  return v;
}

inline acts::KernelParams random_params(Eigen::Index d, std::mt19937_64& rng) {
  acts::KernelParams p;
  p.lengthscales = random_vector(d, rng, 0.3, 1.5);
  p.noise_variance = std::exp(std::uniform_real_distribution<double>(std::log(1e-4), std::log(1e-1))(rng));
  return p;
}

/// Random conditioned model: n points, smooth-ish targets.
inline acts::GpModel random_model(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  Matrix x = random_points(n, d, rng);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = std::sin(3.0 * x.row(i).sum()) + 0.1 * x(i, 0);
  return acts::condition(acts::Dataset::make(x, y), random_params(d, rng));
}

/// max |a - b| / max(|b|, floor)
inline double rel_err(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b, double floor = 1e-3) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), floor);
}

}  // namespace testing
