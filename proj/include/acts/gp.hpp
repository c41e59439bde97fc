#pragma once

#include <cstdint>
#include <optional>

#include "acts/kernel.hpp"
#include "acts/types.hpp"

namespace acts {

struct Standardization {
  double mean = 0.0;
  double scale = 1.0;
};

/// Training data in unit-cube coordinates plus the standardized targets the
/// GP is fitted on. Standardization is recomputed by `make`.
struct Dataset {
  Matrix X;  // n x d
  Vector y;  // raw scale
  Vector y_std;
  Standardization standardization;

  /// Standardizes with the mean and unbiased standard deviation of y. A zero
  /// or undefined spread (n < 2, constant y) leaves scale = 1.
  static Dataset make(Matrix X, Vector y);
  static Dataset empty(Eigen::Index d);

  Eigen::Index size() const noexcept { return X.rows(); }
  Eigen::Index dim() const noexcept { return X.cols(); }
};

/// Fitted exact GP with a zero prior mean on the standardized scale.
struct GpModel {
  KernelParams params;
  Dataset data;
  Matrix chol;   // lower factor of K(X,X) + noise * I (+ jitter)
  Vector alpha;  // (K + noise I)^{-1} y_std
  double jitter = 0.0;
  double fit_objective = 0.0;  // log marginal likelihood + log prior at params
  int fit_iterations = 0;

  Eigen::Index dim() const noexcept { return params.dim(); }
  Eigen::Index size() const noexcept { return data.size(); }
};

/// Factorizes the noisy Gram matrix for fixed hyperparameters. Works for
/// an empty dataset (prior model).
GpModel condition(Dataset data, KernelParams params);

/// Dimension-scaled lognormal lengthscale prior: log ell ~ N(loc(d), scale^2).
struct LengthscalePrior {
  static double loc(Eigen::Index d);
  static double scale();
  /// Mode of the lognormal density in ell, exp(loc - scale^2).
  static double mode(Eigen::Index d);
  /// Sum over dimensions of the lognormal log density evaluated at ell. The
  /// optional gradient is taken with respect to log ell.
  static double log_density(const Vector& ell, Vector* grad_log_ell = nullptr);
};

struct LmlResult {
  double value = 0.0;
  /// d/d(log ell_1..d, log noise_variance); empty when not requested.
  Vector gradient;
};

LmlResult log_marginal_likelihood(const Dataset& data, const KernelParams& params, bool with_gradient = true);
LmlResult log_marginal_likelihood(const GpModel& model, bool with_gradient = true);

struct FitOptions {
  int restarts = 3;
  int max_iters = 200;
  double grad_tol = 1e-5;
  double initial_noise = 1e-3;
  /// Used as the first start when present.
  std::optional<KernelParams> warm_start;
};

/// Type-II MAP fit of lengthscales and noise variance (outputscale fixed at
/// 1) by multi-start L-BFGS ascent in log space with backtracking.
/// Throws FitError when no start yields a finite objective.
GpModel fit(const Dataset& data, std::uint64_t seed, const FitOptions& options = {});

struct Posterior {
  Vector mean;
  Matrix cov;
};

Posterior posterior(const GpModel& model, const Matrix& xq);
Vector posterior_mean(const GpModel& model, const Matrix& xq);

/// A draw of grad f(x0) | D together with the conditioning state needed to
/// condition candidate values on it later.
struct GradientSample {
  Vector x0;
  Vector g;
  Vector mean_g;
  Matrix cov_g;
  Matrix chol_g;  // lower factor of cov_g (+ jitter)
  Matrix B;       // chol^{-1} K(X, x0) grad^T, n x d
  double jitter = 0.0;
};

/// Moments of grad f(x0) | D; `g` is set to the mean.
GradientSample gradient_posterior(const GpModel& model, const Eigen::Ref<const Vector>& x0);
GradientSample sample_gradient(const GpModel& model, const Eigen::Ref<const Vector>& x0, std::uint64_t seed);

/// How a candidate covariance is factorized for reparameterized sampling.
struct SamplerOptions {
  enum class Method {
    Dense,    // full Cholesky with jitter escalation
    Pivoted,  // partial pivoted Cholesky, residual variance added back
    Auto,     // pivoted when it converges within max_rank_fraction, else dense
  };
  Method method = Method::Dense;
  double pivot_tolerance = 1e-8;
  double max_rank_fraction = 0.25;
  /// First jitter level for dense factorizations of candidate covariances
  /// (-1 tries the unshifted matrix first).
  int first_jitter_level = -1;
};

struct Moments {
  Vector mean;
  Matrix cov;  // full symmetric
};

/// f(Xc) | D, grad f(x0) = gs.g.
Moments conditional_moments(const GpModel& model, const GradientSample& gs, const Matrix& xc);

/// Eq.-3 style draw of f(Xc) | D.
Vector sample_candidates(const GpModel& model, const Matrix& xc, std::uint64_t seed,
                         const SamplerOptions& options = {});

/// Draw of f(Xc) | D, grad f(x0) = gs.g. Throws Error if gs does not belong
/// to `model` (different data or a different x0 than its conditioning state).
Vector sample_candidates_conditioned(const GpModel& model, const GradientSample& gs, const Matrix& xc,
                                     std::uint64_t seed, const SamplerOptions& options = {});

/// mean + L z for a covariance given by its lower triangle. Consumes `cov`.
Vector draw_gaussian(const Vector& mean, Matrix cov, std::uint64_t seed, const SamplerOptions& options = {});

enum class IncumbentRule {
  MaxObserved,       // argmax_i y_i
  MaxPosteriorMean,  // argmax over observed x of the posterior mean
};

struct Incumbent {
  Vector x0;
  Eigen::Index index = 0;
};

Incumbent incumbent(const GpModel& model, IncumbentRule rule = IncumbentRule::MaxObserved);

namespace reference {

/// Serial triple loop for the LML lengthscale gradient.
LmlResult log_marginal_likelihood(const Dataset& data, const KernelParams& params);

}  // namespace reference

}  // namespace acts
