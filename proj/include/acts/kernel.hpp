#pragma once

#include "acts/types.hpp"

namespace acts {

/// Lower bound for the learned observation-noise variance.
inline constexpr double kNoiseFloor = 1e-6;

/// Squared-exponential ARD kernel hyperparameters. All distances are in
/// unit-cube coordinates.
struct KernelParams {
  Vector lengthscales;
  double outputscale = 1.0;
  double noise_variance = 1e-4;

  Eigen::Index dim() const noexcept { return lengthscales.size(); }
  /// Throws std::invalid_argument on non-positive lengthscales, outputscale,
  /// or a noise variance below kNoiseFloor.
  void validate() const;

  static KernelParams isotropic(Eigen::Index d, double lengthscale, double noise = 1e-4);
};

double eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2, const KernelParams& p);

/// Gradient of k(x, x2) with respect to x.
Vector grad_first_arg(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                      const KernelParams& p);

/// Gradient of k(x, x2) with respect to x2. Equals -grad_first_arg for this kernel.
Vector grad_second_arg(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                       const KernelParams& p);

/// Mixed second derivative d^2 k / (dx dx2^T), i.e. Cov(grad f(x), grad f(x2)).
Matrix hess_mixed(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                  const KernelParams& p);

// Data-parallel builders. Rows of A, B are points. These use OpenMP when it
// is enabled and write each output entry exactly once, so results do not
// depend on the thread count.

/// k(A, B), |A| x |B|.
Matrix cross_gram(const Matrix& a, const Matrix& b, const KernelParams& p);
/// k(A, A), exactly symmetric, no noise.
Matrix gram(const Matrix& a, const KernelParams& p);
/// Cov(f(A), grad f(x0)): row i is d k(a_i, x0) / d x0, |A| x d.
Matrix gradient_cross(const Matrix& a, const Eigen::Ref<const Vector>& x0, const KernelParams& p);

/// Covariance blocks of the joint prior over (y, f(Xc), grad f(x0)).
struct JointGramBlocks {
  Matrix Kyy;  // n x n, includes noise_variance * I
  Matrix Kyf;  // n x M
  Matrix Kyg;  // n x d
  Matrix Kff;  // M x M
  Matrix Kfg;  // M x d
  Matrix Kgg;  // d x d

  /// Dense (n + M + d) square matrix in (y, f, g) order.
  Matrix assemble() const;
};

JointGramBlocks gram_blocks(const Matrix& x, const Matrix& xc, const Eigen::Ref<const Vector>& x0,
                            const KernelParams& p);

namespace reference {

// Straight loops over eval()/grad_second_arg(); kept as the oracle for the
// parallel builders above and as the serial baseline in the benchmarks.
Matrix cross_gram(const Matrix& a, const Matrix& b, const KernelParams& p);
Matrix gradient_cross(const Matrix& a, const Eigen::Ref<const Vector>& x0, const KernelParams& p);

}  // namespace reference

}  // namespace acts
