#include "acts/gp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

#include "acts/error.hpp"
#include "acts/linalg.hpp"
#include "acts/rng.hpp"

namespace acts {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

// Box on the optimization variables (log ell, log(noise - floor)).
constexpr double kLogEllMin = -6.9;  // ~1e-3
constexpr double kLogEllMax = 9.2;   // ~1e4
constexpr double kLogNoiseMin = -23.0;
constexpr double kLogNoiseMax = 2.3;

struct Factorization {
  Matrix chol;
  Vector alpha;
  double jitter = 0.0;
};

Factorization factor_noisy_gram(const Dataset& data, const KernelParams& params) {
  Matrix k = gram(data.X, params);
  k.diagonal().array() += params.noise_variance;
  CholeskyFactor f = jittered_cholesky(k);
  Factorization out;
  out.chol = std::move(f.lower);
  out.jitter = f.jitter;
  out.alpha = out.chol.triangularView<Eigen::Lower>().solve(data.y_std);
  out.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(out.alpha);
  return out;
}

double lml_value(const Dataset& data, const Factorization& f) {
  const double n = static_cast<double>(data.size());
  return -0.5 * data.y_std.dot(f.alpha) - half_log_det(f.chol) - 0.5 * n * kLog2Pi;
}

/// Q = alpha alpha^T - K^{-1}.
Matrix lml_weight(const Factorization& f) {
  const Eigen::Index n = f.chol.rows();
  Matrix kinv = Matrix::Identity(n, n);
  f.chol.triangularView<Eigen::Lower>().solveInPlace(kinv);
  f.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(kinv);
  Matrix q = f.alpha * f.alpha.transpose();
  q -= kinv;
  return q;
}

KernelParams params_from_theta(const Vector& theta, Eigen::Index d) {
  KernelParams p;
  p.lengthscales = theta.head(d).array().exp();
  p.outputscale = 1.0;
  p.noise_variance = kNoiseFloor + std::exp(theta[d]);
  return p;
}

Vector theta_from_params(const KernelParams& p) {
  const Eigen::Index d = p.dim();
  Vector theta(d + 1);
  theta.head(d) = p.lengthscales.array().log();
  theta[d] = std::log(std::max(p.noise_variance - kNoiseFloor, 1e-12));
  return theta;
}

void clamp_theta(Vector& theta) {
  const Eigen::Index d = theta.size() - 1;
  theta.head(d) = theta.head(d).cwiseMax(kLogEllMin).cwiseMin(kLogEllMax);
  theta[d] = std::clamp(theta[d], kLogNoiseMin, kLogNoiseMax);
}

/// Negative MAP objective and its gradient in theta.
double negative_objective(const Dataset& data, const Vector& theta, Vector& grad) {
  const Eigen::Index d = data.dim();
  const KernelParams p = params_from_theta(theta, d);
  LmlResult lml;
  try {
    lml = log_marginal_likelihood(data, p, true);
  } catch (const CholeskyError&) {
    grad = Vector::Zero(d + 1);
    return std::numeric_limits<double>::infinity();
  }
  Vector prior_grad;
  const double prior = LengthscalePrior::log_density(p.lengthscales, &prior_grad);
  grad.resize(d + 1);
  grad.head(d) = -(lml.gradient.head(d) + prior_grad);
  // chain rule through noise = floor + exp(theta_d)
  grad[d] = -lml.gradient[d] * (p.noise_variance - kNoiseFloor) / p.noise_variance;
  const double value = -(lml.value + prior);
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

struct Minimum {
  Vector theta;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// L-BFGS with Armijo backtracking and projection onto the theta box.
Minimum minimize_lbfgs(const Dataset& data, Vector theta, const FitOptions& options) {
  constexpr int kMemory = 10;
  clamp_theta(theta);
  Vector grad;
  double value = negative_objective(data, theta, grad);
  Minimum out{theta, value, 0};
  if (!std::isfinite(value)) return out;

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  int it = 0;
  for (; it < options.max_iters; ++it) {
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) break;

    // two-loop recursion
    Vector dir = -grad;
    std::vector<double> a(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      a[i] = rho_hist[i] * s_hist[i].dot(dir);
      dir -= a[i] * y_hist[i];
    }
    if (!s_hist.empty()) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(dir);
      dir += (a[i] - b) * s_hist[i];
    }
    if (grad.dot(dir) >= 0.0) {
      dir = -grad;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / std::max(grad.lpNorm<Eigen::Infinity>(), 1e-12)) : 1.0;
    Vector next, next_grad;
    double next_value = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      next = theta + step * dir;
      clamp_theta(next);
      next_value = negative_objective(data, next, next_grad);
      if (std::isfinite(next_value) && next_value <= value + 1e-4 * grad.dot(next - theta)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Vector s = next - theta;
    Vector y = next_grad - grad;
    const double sy = s.dot(y);
    theta = std::move(next);
    grad = std::move(next_grad);
    const double improvement = value - next_value;
    value = next_value;
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    if (improvement >= 0.0 && improvement < 1e-12 * std::max(1.0, std::abs(value))) {
      ++it;
      break;
    }
  }
  out.theta = theta;
  out.value = value;
  out.iterations = it;
  return out;
}

void check_query(const GpModel& model, const Matrix& xq) {
  if (xq.rows() > 0 && xq.cols() != model.dim()) {
    throw DimensionError("query points have " + std::to_string(xq.cols()) + " columns, model dimension is " +
                         std::to_string(model.dim()));
  }
}

Matrix as_points(const Matrix& x, Eigen::Index d) { return x.rows() > 0 ? x : Matrix(0, d); }

}  // namespace

Dataset Dataset::make(Matrix X, Vector y) {
  if (X.rows() != y.size()) throw DimensionError("Dataset: |X| != |y|");
  Dataset out;
  out.X = std::move(X);
  out.y = std::move(y);
  const Eigen::Index n = out.y.size();
  Standardization s;
  if (n > 0) s.mean = out.y.mean();
  if (n > 1) {
    const double var = (out.y.array() - s.mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd > 0.0 && std::isfinite(sd)) s.scale = sd;
  }
  out.standardization = s;
  out.y_std = (out.y.array() - s.mean) / s.scale;
  return out;
}

Dataset Dataset::empty(Eigen::Index d) { return make(Matrix(0, d), Vector(0)); }

GpModel condition(Dataset data, KernelParams params) {
  params.validate();
  if (data.size() > 0 && data.dim() != params.dim()) throw DimensionError("condition: data/params dimension mismatch");
  if (data.size() == 0) data.X = Matrix(0, params.dim());
  Factorization f = factor_noisy_gram(data, params);
  GpModel m;
  m.params = std::move(params);
  m.data = std::move(data);
  m.chol = std::move(f.chol);
  m.alpha = std::move(f.alpha);
  m.jitter = f.jitter;
  return m;
}

double LengthscalePrior::loc(Eigen::Index d) {
  return std::numbers::sqrt2 + 0.5 * std::log(static_cast<double>(d));
}

double LengthscalePrior::scale() { return std::sqrt(3.0); }

double LengthscalePrior::mode(Eigen::Index d) { return std::exp(loc(d) - scale() * scale()); }

double LengthscalePrior::log_density(const Vector& ell, Vector* grad_log_ell) {
  const Eigen::Index d = ell.size();
  const double mu = loc(d), sigma = scale();
  const Eigen::ArrayXd log_ell = ell.array().log();
  const Eigen::ArrayXd z = (log_ell - mu) / sigma;
  const double value = (-log_ell - std::log(sigma) - 0.5 * kLog2Pi - 0.5 * z.square()).sum();
  if (grad_log_ell) *grad_log_ell = (-1.0 - z / sigma).matrix();
  return value;
}

LmlResult log_marginal_likelihood(const Dataset& data, const KernelParams& params, bool with_gradient) {
  const Eigen::Index n = data.size(), d = params.dim();
  LmlResult out;
  if (n == 0) {
    if (with_gradient) out.gradient = Vector::Zero(d + 1);
    return out;
  }
  if (data.dim() != d) throw DimensionError("log_marginal_likelihood: data/params dimension mismatch");
  const Factorization f = factor_noisy_gram(data, params);
  out.value = lml_value(data, f);
  if (!with_gradient) return out;

  // dK/dlog ell_j = K o D_j with D_j(i,k) = (x_ij - x_kj)^2 / ell_j^2, so
  // 0.5 sum_ik W_ik D_j(i,k) with W = Q o K expands into two GEMM-shaped terms.
  const Matrix q = lml_weight(f);
  const Matrix w = q.cwiseProduct(gram(data.X, params));
  const Vector row_sums = w.rowwise().sum();
  const Matrix wx = w * data.X;
  out.gradient.resize(d + 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto xj = data.X.col(j);
    const double t = xj.cwiseAbs2().dot(row_sums) - xj.dot(wx.col(j));
    out.gradient[j] = t / (params.lengthscales[j] * params.lengthscales[j]);
  }
  out.gradient[d] = 0.5 * params.noise_variance * q.trace();
  return out;
}

LmlResult log_marginal_likelihood(const GpModel& model, bool with_gradient) {
  return log_marginal_likelihood(model.data, model.params, with_gradient);
}

GpModel fit(const Dataset& data, std::uint64_t seed, const FitOptions& options) {
  const Eigen::Index n = data.size(), d = data.dim();
  if (n < 1) throw FitError("fit: dataset is empty");
  if (options.restarts < 1) throw FitError("fit: restarts must be >= 1");

  Rng rng(derive_seed(seed, Stream::Fit));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_mode = std::log(LengthscalePrior::mode(d));

  Minimum best;
  int total_iterations = 0;
  for (int r = 0; r < options.restarts; ++r) {
    Vector theta(d + 1);
    const int first_cold = options.warm_start ? 1 : 0;
    if (r == 0 && options.warm_start) {
      KernelParams w = *options.warm_start;
      if (w.dim() != d) throw DimensionError("fit: warm start dimension mismatch");
      w.noise_variance = std::max(w.noise_variance, kNoiseFloor);
      theta = theta_from_params(w);
    } else if (r == first_cold) {
      theta.head(d).setConstant(log_mode);
      theta[d] = std::log(options.initial_noise);
    } else {
      for (Eigen::Index j = 0; j < d; ++j) theta[j] = log_mode + normal(rng);
      theta[d] = std::log(1e-6) + unit(rng) * (std::log(1e-1) - std::log(1e-6));
    }
    Minimum m = minimize_lbfgs(data, theta, options);
    total_iterations += m.iterations;
    if (m.value < best.value || best.theta.size() == 0) best = std::move(m);
  }
  if (!std::isfinite(best.value)) {
    throw FitError("fit: no restart produced a finite objective (n=" + std::to_string(n) +
                   ", d=" + std::to_string(d) + "); noisy Gram matrix could not be factorized");
  }
  GpModel model = condition(data, params_from_theta(best.theta, d));
  model.fit_objective = -best.value;
  model.fit_iterations = total_iterations;
  return model;
}

Vector posterior_mean(const GpModel& model, const Matrix& xq) {
  check_query(model, xq);
  const Matrix q = as_points(xq, model.dim());
  if (model.size() == 0) return Vector::Zero(q.rows());
  return cross_gram(q, model.data.X, model.params) * model.alpha;
}

Posterior posterior(const GpModel& model, const Matrix& xq) {
  check_query(model, xq);
  const Matrix q = as_points(xq, model.dim());
  Posterior out;
  out.cov = gram(q, model.params);
  if (model.size() == 0) {
    out.mean = Vector::Zero(q.rows());
    return out;
  }
  const Matrix kyq = cross_gram(model.data.X, q, model.params);
  out.mean = kyq.transpose() * model.alpha;
  const Matrix v = model.chol.triangularView<Eigen::Lower>().solve(kyq);
  out.cov.noalias() -= v.transpose() * v;
  return out;
}

GradientSample gradient_posterior(const GpModel& model, const Eigen::Ref<const Vector>& x0) {
  const Eigen::Index d = model.dim();
  if (x0.size() != d) throw DimensionError("gradient_posterior: x0 dimension mismatch");
  GradientSample gs;
  gs.x0 = x0;
  gs.cov_g = hess_mixed(x0, x0, model.params);
  if (model.size() > 0) {
    const Matrix kyg = gradient_cross(model.data.X, x0, model.params);
    gs.mean_g = kyg.transpose() * model.alpha;
    gs.B = model.chol.triangularView<Eigen::Lower>().solve(kyg);
    gs.cov_g.noalias() -= gs.B.transpose() * gs.B;
  } else {
    gs.mean_g = Vector::Zero(d);
    gs.B = Matrix(0, d);
  }
  gs.cov_g = 0.5 * (gs.cov_g + gs.cov_g.transpose());
  CholeskyFactor f = jittered_cholesky(gs.cov_g);
  gs.chol_g = std::move(f.lower);
  gs.jitter = f.jitter;
  gs.g = gs.mean_g;
  return gs;
}

GradientSample sample_gradient(const GpModel& model, const Eigen::Ref<const Vector>& x0, std::uint64_t seed) {
  GradientSample gs = gradient_posterior(model, x0);
  Rng rng(derive_seed(seed, Stream::Gradient));
  const Vector z = standard_normal(model.dim(), rng);
  gs.g = gs.mean_g + gs.chol_g.triangularView<Eigen::Lower>() * z;
  return gs;
}

namespace {

void check_gradient_sample(const GpModel& model, const GradientSample& gs) {
  const Eigen::Index d = model.dim();
  if (gs.x0.size() != d || gs.g.size() != d || gs.chol_g.rows() != d) {
    throw DimensionError("gradient sample dimension does not match the model");
  }
  if (gs.B.rows() != model.size()) throw Error("gradient sample was conditioned on a different dataset");
  if (model.size() == 0) return;
  // L B must reproduce Cov(y, grad f(x0)) for this model and x0.
  const Matrix kyg = gradient_cross(model.data.X, gs.x0, model.params);
  const Matrix lb = model.chol.triangularView<Eigen::Lower>() * gs.B;
  const double scale = std::max(1.0, kyg.lpNorm<Eigen::Infinity>());
  if ((lb - kyg).lpNorm<Eigen::Infinity>() > 1e-8 * scale) {
    throw Error("gradient sample conditioning state does not match the model at its x0");
  }
}

/// Lower triangle of Cov(f(Xc) | D[, g]) plus the conditional mean.
Moments candidate_moments(const GpModel& model, const GradientSample* gs, const Matrix& xc) {
  const Matrix q = as_points(xc, model.dim());
  Moments out;
  out.cov = gram(q, model.params);
  out.mean = Vector::Zero(q.rows());
  Matrix wy;
  if (model.size() > 0) {
    const Matrix kyc = cross_gram(model.data.X, q, model.params);
    out.mean.noalias() = kyc.transpose() * model.alpha;
    wy = model.chol.triangularView<Eigen::Lower>().solve(kyc);
    out.cov.selfadjointView<Eigen::Lower>().rankUpdate(wy.transpose(), -1.0);
  }
  if (gs) {
    // rank-d update: condition the y-posterior on the realized gradient
    Matrix ccg = gradient_cross(q, gs->x0, model.params);
    if (model.size() > 0) ccg.noalias() -= wy.transpose() * gs->B;
    const Matrix wg = gs->chol_g.triangularView<Eigen::Lower>().solve(ccg.transpose());
    const Vector white = gs->chol_g.triangularView<Eigen::Lower>().solve(gs->g - gs->mean_g);
    out.mean.noalias() += wg.transpose() * white;
    out.cov.selfadjointView<Eigen::Lower>().rankUpdate(wg.transpose(), -1.0);
  }
  return out;
}

}  // namespace

Moments conditional_moments(const GpModel& model, const GradientSample& gs, const Matrix& xc) {
  check_query(model, xc);
  check_gradient_sample(model, gs);
  Moments m = candidate_moments(model, &gs, xc);
  mirror_lower_to_upper(m.cov);
  return m;
}

Vector draw_gaussian(const Vector& mean, Matrix cov, std::uint64_t seed, const SamplerOptions& options) {
  const Eigen::Index m = mean.size();
  if (cov.rows() != m || cov.cols() != m) throw DimensionError("draw_gaussian: covariance shape mismatch");
  Rng rng(derive_seed(seed, Stream::Values));
  if (m == 0) return mean;

  auto pivoted = [&](Eigen::Index max_rank) -> std::optional<Vector> {
    mirror_lower_to_upper(cov);
    const Vector diag = cov.diagonal();
    PivotedCholesky pc = pivoted_cholesky(
        diag, [&](Eigen::Index j) { return Vector(cov.col(j)); }, options.pivot_tolerance, max_rank);
    if (!pc.converged) return std::nullopt;
    const Vector z = standard_normal(pc.factor.cols(), rng);
    const Vector z2 = standard_normal(m, rng);
    Vector f = mean + pc.factor * z;
    f.array() += pc.residual_diagonal.array().sqrt() * z2.array();
    return f;
  };

  switch (options.method) {
    case SamplerOptions::Method::Pivoted: {
      auto f = pivoted(m);
      if (f) return *f;
      throw CholeskyError("pivoted cholesky did not reach tolerance", 0.0);
    }
    case SamplerOptions::Method::Auto: {
      const auto cap = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(options.max_rank_fraction * m));
      auto f = pivoted(cap);
      if (f) return *f;
      rng.seed(derive_seed(seed, Stream::Values));
      break;
    }
    case SamplerOptions::Method::Dense:
      break;
  }
  jittered_cholesky_inplace(cov, options.first_jitter_level);
  const Vector z = standard_normal(m, rng);
  return mean + cov.triangularView<Eigen::Lower>() * z;
}

Vector sample_candidates(const GpModel& model, const Matrix& xc, std::uint64_t seed, const SamplerOptions& options) {
  check_query(model, xc);
  Moments m = candidate_moments(model, nullptr, xc);
  return draw_gaussian(m.mean, std::move(m.cov), seed, options);
}

Vector sample_candidates_conditioned(const GpModel& model, const GradientSample& gs, const Matrix& xc,
                                     std::uint64_t seed, const SamplerOptions& options) {
  check_query(model, xc);
  check_gradient_sample(model, gs);
  Moments m = candidate_moments(model, &gs, xc);
  return draw_gaussian(m.mean, std::move(m.cov), seed, options);
}

Incumbent incumbent(const GpModel& model, IncumbentRule rule) {
  if (model.size() == 0) throw Error("incumbent: dataset is empty");
  Vector score = rule == IncumbentRule::MaxObserved ? model.data.y : posterior_mean(model, model.data.X);
  Incumbent out;
  // first maximal index wins ties
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < score.size(); ++i) {
    if (score[i] > best) {
      best = score[i];
      out.index = i;
    }
  }
  out.x0 = model.data.X.row(out.index).transpose();
  return out;
}

namespace reference {

LmlResult log_marginal_likelihood(const Dataset& data, const KernelParams& params) {
  const Eigen::Index n = data.size(), d = params.dim();
  LmlResult out;
  out.gradient = Vector::Zero(d + 1);
  if (n == 0) return out;
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = eval(data.X.row(i).transpose(), data.X.row(j).transpose(), params);
  }
  Matrix kt = k;
  kt.diagonal().array() += params.noise_variance;
  const CholeskyFactor f = jittered_cholesky(kt);
  Factorization fz{f.lower, Vector(), f.jitter};
  fz.alpha = fz.chol.triangularView<Eigen::Lower>().solve(data.y_std);
  fz.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(fz.alpha);
  out.value = lml_value(data, fz);
  const Matrix q = lml_weight(fz);
  for (Eigen::Index j = 0; j < d; ++j) {
    double s = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        const double diff = data.X(a, j) - data.X(b, j);
        s += q(a, b) * k(a, b) * diff * diff;
      }
    }
    out.gradient[j] = 0.5 * s / (params.lengthscales[j] * params.lengthscales[j]);
  }
  for (Eigen::Index a = 0; a < n; ++a) out.gradient[d] += 0.5 * params.noise_variance * q(a, a);
  return out;
}

}  // namespace reference

}  // namespace acts
