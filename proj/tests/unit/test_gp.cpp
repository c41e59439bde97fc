#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "helpers.hpp"

#include "acts/error.hpp"
#include "acts/gp.hpp"
#include "acts/linalg.hpp"
#include "acts/sobol.hpp"

using namespace acts;
using testing::random_model;
using testing::random_params;
using testing::random_points;
using testing::random_vector;
using testing::rel_err;

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

/// Conditions the dense joint of (y, f(Xc), grad f(x0)) on y and grad f(x0) = g
/// by direct solves.
Moments dense_conditional(const GpModel& m, const Matrix& xc, const Vector& x0, const Vector& g) {
  const Eigen::Index n = m.size(), c = xc.rows(), d = m.dim();
  Matrix full = gram_blocks(m.data.X, xc, x0, m.params).assemble();
  full.topLeftCorner(n, n).diagonal().array() += m.jitter;
  std::vector<Eigen::Index> obs, tgt;
  for (Eigen::Index i = 0; i < n; ++i) obs.push_back(i);
  for (Eigen::Index i = 0; i < d; ++i) obs.push_back(n + c + i);
  for (Eigen::Index i = 0; i < c; ++i) tgt.push_back(n + i);
  const Matrix soo = full(obs, obs), sto = full(tgt, obs), stt = full(tgt, tgt);
  Vector v(n + d);
  v << m.data.y_std, g;
  const Eigen::FullPivLU<Matrix> lu(soo);
  Moments out;
  out.mean = sto * lu.solve(v);
  out.cov = stt - sto * lu.solve(sto.transpose());
  return out;
}

Vector posterior_mean_of(const GpModel& m, const Vector& x) { return posterior_mean(m, x.transpose()); }

}  // namespace

TEST_CASE("dataset standardization") {
  Matrix x(3, 1);
  x << 0.1, 0.5, 0.9;
  Vector y(3);
  y << 1.0, 2.0, 6.0;
  const Dataset ds = Dataset::make(x, y);
  CHECK(ds.standardization.mean == doctest::Approx(3.0));
  CHECK(ds.standardization.scale == doctest::Approx(std::sqrt(7.0)));
  CHECK(ds.y_std.mean() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::sqrt(ds.y_std.squaredNorm() / 2.0) == doctest::Approx(1.0));

  const Dataset flat = Dataset::make(x, Vector::Constant(3, 4.0));
  CHECK(flat.standardization.scale == 1.0);
  CHECK(flat.y_std.isZero(0.0));
  CHECK_THROWS(Dataset::make(x, Vector::Zero(2)));
}

TEST_CASE("log marginal likelihood of a single point") {
  Matrix x(1, 2);
  x << 0.3, 0.4;
  KernelParams p = KernelParams::isotropic(2, 0.7, 0.1);
  const Dataset ds = Dataset::make(x, Vector::Constant(1, 5.0));
  REQUIRE(ds.y_std[0] == 0.0);
  const LmlResult r = log_marginal_likelihood(ds, p);
  CHECK(r.value == doctest::Approx(-0.5 * std::log(1.1) - 0.5 * kLog2Pi).epsilon(1e-14));
}

TEST_CASE("log marginal likelihood gradient matches central differences") {
  std::mt19937_64 rng(11);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 1 + t % 4;
    const GpModel m = random_model(5 + t % 6, d, rng);
    const KernelParams& p = m.params;
    const LmlResult r = log_marginal_likelihood(m.data, p);
    Vector fd(d + 1);
    for (Eigen::Index j = 0; j <= d; ++j) {
      KernelParams lo = p, hi = p;
      if (j < d) {
        hi.lengthscales[j] *= std::exp(h);
        lo.lengthscales[j] *= std::exp(-h);
      } else {
        hi.noise_variance *= std::exp(h);
        lo.noise_variance *= std::exp(-h);
      }
      fd[j] = (log_marginal_likelihood(m.data, hi, false).value - log_marginal_likelihood(m.data, lo, false).value) /
              (2 * h);
    }
    CHECK(rel_err(r.gradient, fd) < 1e-4);
    const LmlResult ref = reference::log_marginal_likelihood(m.data, p);
    CHECK(ref.value == doctest::Approx(r.value).epsilon(1e-12));
    CHECK(rel_err(r.gradient, ref.gradient, 1e-8) < 1e-10);
  }
}

TEST_CASE("duplicated training points with noise give a finite likelihood") {
  Matrix x(3, 2);
  x << 0.2, 0.2, 0.2, 0.2, 0.7, 0.1;
  Vector y(3);
  y << 1.0, 1.5, -0.5;
  const LmlResult r = log_marginal_likelihood(Dataset::make(x, y), KernelParams::isotropic(2, 0.5, 1e-3));
  CHECK(std::isfinite(r.value));
  CHECK(r.gradient.allFinite());
}

TEST_CASE("dimension-scaled lengthscale prior") {
  CHECK(LengthscalePrior::loc(1) == doctest::Approx(std::numbers::sqrt2));
  CHECK(LengthscalePrior::loc(100) == doctest::Approx(std::numbers::sqrt2 + 0.5 * std::log(100.0)));
  CHECK(LengthscalePrior::scale() == doctest::Approx(std::sqrt(3.0)));
  const double mu = LengthscalePrior::loc(5), s = LengthscalePrior::scale();
  CHECK(LengthscalePrior::mode(5) == doctest::Approx(std::exp(mu - s * s)));

  Vector ell(5);
  ell << 0.2, 0.9, 1.5, 3.0, 7.0;
  double expected = 0.0;
  for (double l : ell) {
    const double z = (std::log(l) - mu) / s;
    expected += -std::log(l) - std::log(s) - 0.5 * kLog2Pi - 0.5 * z * z;
  }
  Vector grad;
  CHECK(LengthscalePrior::log_density(ell, &grad) == doctest::Approx(expected).epsilon(1e-13));
  const double h = 1e-6;
  for (int j = 0; j < 5; ++j) {
    Vector hi = ell, lo = ell;
    hi[j] *= std::exp(h);
    lo[j] *= std::exp(-h);
    const double fd = (LengthscalePrior::log_density(hi) - LengthscalePrior::log_density(lo)) / (2 * h);
    CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("fit on a single point") {
  Matrix x(1, 3);
  x << 0.2, 0.5, 0.9;
  const GpModel m = fit(Dataset::make(x, Vector::Constant(1, 2.5)), 3);
  CHECK(m.params.lengthscales.allFinite());
  CHECK(m.params.noise_variance >= kNoiseFloor);
  const double mean = posterior_mean(m, x)[0];
  CHECK(mean == doctest::Approx(m.data.y_std[0] / (1.0 + m.params.noise_variance + m.jitter)));
}

TEST_CASE("fit on constant targets is finite") {
  Matrix x = sobol_points(8, 2, 1);
  const GpModel m = fit(Dataset::make(x, Vector::Constant(8, -3.0)), 4);
  CHECK(m.data.standardization.scale == 1.0);
  CHECK(m.params.lengthscales.allFinite());
  CHECK(std::isfinite(m.params.noise_variance));
  CHECK(std::isfinite(m.fit_objective));
}

TEST_CASE("fitted lengthscale of sin(2 pi x) agrees with a grid search") {
  const Matrix x = sobol_points(30, 1, 5);
  Vector y(30);
  for (int i = 0; i < 30; ++i) y[i] = std::sin(2.0 * std::numbers::pi * x(i, 0));
  const Dataset ds = Dataset::make(x, y);
  const GpModel m = fit(ds, 6);
  const double ell = m.params.lengthscales[0];
  CHECK(ell >= 0.05);
  CHECK(ell <= 0.5);

  // grid oracle over ell at the fitted noise level
  double best_ell = 0.0, best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 400; ++k) {
    const double l = 0.01 * std::pow(200.0, k / 400.0);
    KernelParams p = m.params;
    p.lengthscales[0] = l;
    const double v = log_marginal_likelihood(ds, p, false).value + LengthscalePrior::log_density(p.lengthscales);
    if (v > best) {
      best = v;
      best_ell = l;
    }
  }
  CHECK(best_ell >= 0.05);
  CHECK(best_ell <= 0.5);
  CHECK(std::abs(std::log(ell / best_ell)) < 0.02);
  CHECK(m.fit_objective >= best - 1e-6);
}

TEST_CASE("fit is deterministic for a seed") {
  std::mt19937_64 rng(12);
  const Matrix x = random_points(15, 3, rng);
  Vector y = (x.col(0).array() * 4.0).sin().matrix() + x.col(1);
  const GpModel a = fit(Dataset::make(x, y), 99), b = fit(Dataset::make(x, y), 99);
  CHECK(a.params.lengthscales == b.params.lengthscales);
  CHECK(a.params.noise_variance == b.params.noise_variance);
}

TEST_CASE("conditioned model invariants") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const GpModel m = random_model(12, 3, rng);
    Matrix k = gram(m.data.X, m.params);
    k.diagonal().array() += m.params.noise_variance + m.jitter;
    const Matrix l = m.chol.triangularView<Eigen::Lower>();
    CHECK((l * l.transpose() - k).norm() / k.norm() < 1e-8);
    CHECK((k * m.alpha - m.data.y_std).norm() < 1e-8);
  }
}

TEST_CASE("posterior without data is the prior") {
  std::mt19937_64 rng(14);
  const KernelParams p = random_params(2, rng);
  const GpModel m = condition(Dataset::empty(2), p);
  const Matrix q = random_points(4, 2, rng);
  const Posterior post = posterior(m, q);
  CHECK(post.mean.isZero(0.0));
  CHECK((post.cov - gram(q, p)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("posterior nearly interpolates noise-free observations") {
  std::mt19937_64 rng(15);
  const Matrix x = random_points(6, 2, rng);
  Vector y = x.col(0) - x.col(1);
  KernelParams p = KernelParams::isotropic(2, 0.4, kNoiseFloor);
  const GpModel m = condition(Dataset::make(x, y), p);
  const Posterior post = posterior(m, x);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(post.mean[i] - m.data.y_std[i]) <= 1e-3);
    CHECK(post.cov(i, i) <= 2e-6 + m.jitter);
  }
}

TEST_CASE("posterior matches a dense solve") {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 10; ++t) {
    const GpModel m = random_model(3, 2, rng);
    const Matrix q = random_points(2, 2, rng);
    Matrix k = reference::cross_gram(m.data.X, m.data.X, m.params);
    k.diagonal().array() += m.params.noise_variance + m.jitter;
    const Matrix kxq = reference::cross_gram(m.data.X, q, m.params);
    const Matrix kinv = k.inverse();
    const Vector mean = kxq.transpose() * kinv * m.data.y_std;
    const Matrix cov = reference::cross_gram(q, q, m.params) - kxq.transpose() * kinv * kxq;
    const Posterior post = posterior(m, q);
    CHECK((post.mean - mean).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((post.cov - cov).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((post.cov - post.cov.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(post.cov.diagonal().minCoeff() >= -1e-10);
  }
}

TEST_CASE("posterior collapse at a new exact observation") {
  std::mt19937_64 rng(17);
  Matrix x = random_points(5, 3, rng);
  Vector y = x.rowwise().sum();
  const GpModel m = condition(Dataset::make(x, y), KernelParams::isotropic(3, 0.6, kNoiseFloor));
  const Posterior post = posterior(m, x.row(2));
  CHECK(post.cov(0, 0) <= 2e-6 + m.jitter);
  CHECK_THROWS_AS(posterior(m, Matrix::Zero(1, 2)), DimensionError);
}

TEST_CASE("prior gradient covariance is diag(1 / ell^2)") {
  KernelParams p;
  p.lengthscales = Vector(3);
  p.lengthscales << 0.5, 1.0, 4.0;
  const GpModel m = condition(Dataset::empty(3), p);
  const GradientSample gs = gradient_posterior(m, Vector::Constant(3, 0.3));
  CHECK(gs.mean_g.isZero(0.0));
  Matrix expected = Matrix::Zero(3, 3);
  expected.diagonal() << 4.0, 1.0, 1.0 / 16.0;
  CHECK(gs.cov_g == expected);
}

TEST_CASE("gradient posterior mean matches differences of the posterior mean") {
  std::mt19937_64 rng(18);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 1 + t % 5;
    const GpModel m = random_model(4 + t % 7, d, rng);
    const Vector x0 = random_vector(d, rng, 0.1, 0.9);
    const GradientSample gs = gradient_posterior(m, x0);
    Vector fd(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      Vector e = Vector::Zero(d);
      e[j] = h;
      fd[j] = (posterior_mean_of(m, x0 + e)[0] - posterior_mean_of(m, x0 - e)[0]) / (2 * h);
    }
    CHECK(rel_err(gs.mean_g, fd) < 1e-4);
  }
}

TEST_CASE("gradient draws reproduce the analytic moments") {
  std::mt19937_64 rng(19);
  const GpModel m = random_model(5, 2, rng);
  const Vector x0 = m.data.X.row(1).transpose();
  const GradientSample ref = gradient_posterior(m, x0);
  constexpr int kDraws = 100000;
  Vector sum = Vector::Zero(2);
  Matrix outer = Matrix::Zero(2, 2);
  for (int i = 0; i < kDraws; ++i) {
    const Vector g = sample_gradient(m, x0, static_cast<std::uint64_t>(i)).g;
    sum += g;
    outer += g * g.transpose();
  }
  const Vector mean = sum / kDraws;
  const Matrix cov = outer / kDraws - mean * mean.transpose();
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(mean[i] - ref.mean_g[i]) < 5.0 * std::sqrt(ref.cov_g(i, i) / kDraws));
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((ref.cov_g(i, i) * ref.cov_g(j, j) + ref.cov_g(i, j) * ref.cov_g(i, j)) / kDraws);
      CHECK(std::abs(cov(i, j) - ref.cov_g(i, j)) < 5.0 * se);
    }
  }
}

TEST_CASE("gradient-conditioned moments equal dense joint conditioning") {
  std::mt19937_64 rng(20);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 1 + t % 5, n = 1 + t % 10, c = 1 + (3 * t) % 20;
    const GpModel m = random_model(n, d, rng);
    const Vector x0 = m.data.X.row(0).transpose();
    const GradientSample gs = sample_gradient(m, x0, static_cast<std::uint64_t>(t));
    const Matrix xc = random_points(c, d, rng);
    const Moments ours = conditional_moments(m, gs, xc);
    const Moments dense = dense_conditional(m, xc, x0, gs.g);
    CHECK((ours.mean - dense.mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ours.cov - dense.cov).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("two-stage composition recovers the one-shot posterior exactly") {
  // Cov(f|D) = E[Cov(f|g,D)] + Cov(E[f|g,D]); the conditional mean is affine in g.
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 1 + t % 5, n = 1 + t % 10, c = 1 + (7 * t) % 20;
    const GpModel m = random_model(n, d, rng);
    const Vector x0 = m.data.X.row(n - 1).transpose();
    GradientSample gs = gradient_posterior(m, x0);
    const Matrix xc = random_points(c, d, rng);
    const Moments at_mean = conditional_moments(m, gs, xc);
    Matrix a(c, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      GradientSample shifted = gs;
      shifted.g[j] += 1.0;
      a.col(j) = conditional_moments(m, shifted, xc).mean - at_mean.mean;
    }
    const Posterior post = posterior(m, xc);
    const Matrix composed = at_mean.cov + a * (gs.cov_g + gs.jitter * Matrix::Identity(d, d)) * a.transpose();
    CHECK((at_mean.mean - post.mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((composed - post.cov).cwiseAbs().maxCoeff() < 1e-8);
    // gradient information never adds variance
    CHECK((at_mean.cov.diagonal().array() <= post.cov.diagonal().array() + 1e-10).all());
  }
}

TEST_CASE("two-stage draws marginally match one-shot draws") {
  std::mt19937_64 rng(22);
  const GpModel m = random_model(4, 2, rng);
  const Vector x0 = m.data.X.row(0).transpose();
  const Matrix xc = random_points(3, 2, rng);
  const Posterior post = posterior(m, xc);
  constexpr int kDraws = 100000;
  Vector sum = Vector::Zero(3);
  Matrix outer = Matrix::Zero(3, 3);
  for (int i = 0; i < kDraws; ++i) {
    const std::uint64_t s = static_cast<std::uint64_t>(i);
    const GradientSample gs = sample_gradient(m, x0, s);
    const Vector f = sample_candidates_conditioned(m, gs, xc, s ^ 0x5555);
    sum += f;
    outer += f * f.transpose();
  }
  const Vector mean = sum / kDraws;
  const Matrix cov = outer / kDraws - mean * mean.transpose();
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean[i] - post.mean[i]) < 5.0 * std::sqrt(post.cov(i, i) / kDraws));
    for (int j = 0; j < 3; ++j) {
      const double se = std::sqrt((post.cov(i, i) * post.cov(j, j) + post.cov(i, j) * post.cov(i, j)) / kDraws);
      CHECK(std::abs(cov(i, j) - post.cov(i, j)) < 5.0 * se);
    }
  }
}

TEST_CASE("conditioning on the gradient moves the value at x0 when they are correlated") {
  std::mt19937_64 rng(23);
  const GpModel m = random_model(6, 2, rng);
  const Vector x0 = (m.data.X.row(0).transpose() + Vector::Constant(2, 0.05)).cwiseMin(1.0);
  const Matrix xc = x0.transpose();
  const GradientSample base = gradient_posterior(m, x0);
  // Cov(f(x0), grad f(x0) | D) = -B^T W for W = L^{-1} k(X, x0)
  const Vector w = m.chol.triangularView<Eigen::Lower>().solve(cross_gram(m.data.X, xc, m.params)).col(0);
  const Vector cross = -base.B.transpose() * w;
  REQUIRE(cross.norm() > 1e-6);

  GradientSample gs = sample_gradient(m, x0, 7);
  const Moments cm = conditional_moments(m, gs, xc);
  const Vector lg = gs.chol_g.triangularView<Eigen::Lower>().solve(cross);
  const Vector white = gs.chol_g.triangularView<Eigen::Lower>().solve(gs.g - gs.mean_g);
  const double expected = posterior_mean(m, xc)[0] + lg.dot(white);
  CHECK(cm.mean[0] == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(cm.mean[0] - posterior_mean(m, xc)[0]) > 1e-8);

  double acc = 0.0;
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) acc += sample_candidates_conditioned(m, gs, xc, static_cast<std::uint64_t>(i))[0];
  CHECK(std::abs(acc / kDraws - cm.mean[0]) < 5.0 * std::sqrt(std::max(cm.cov(0, 0), 1e-12) / kDraws) + 1e-6);
}

TEST_CASE("conditioned sampling rejects a gradient sample from another model or x0") {
  std::mt19937_64 rng(24);
  const GpModel m = random_model(5, 2, rng);
  const GpModel other = random_model(4, 2, rng);
  GradientSample gs = sample_gradient(m, m.data.X.row(0).transpose(), 1);
  const Matrix xc = random_points(3, 2, rng);
  CHECK_THROWS_AS(sample_candidates_conditioned(other, gs, xc, 2), Error);
  gs.x0 = Vector::Constant(2, 0.99);
  CHECK_THROWS_AS(sample_candidates_conditioned(m, gs, xc, 2), Error);
}

TEST_CASE("sampling is reproducible and pivoted sampling matches the dense moments") {
  std::mt19937_64 rng(25);
  const GpModel m = random_model(8, 2, rng);
  const Matrix xc = random_points(40, 2, rng);
  CHECK(sample_candidates(m, xc, 5) == sample_candidates(m, xc, 5));
  CHECK(sample_candidates(m, xc, 5) != sample_candidates(m, xc, 6));

  SamplerOptions piv;
  piv.method = SamplerOptions::Method::Pivoted;
  const Posterior post = posterior(m, xc.topRows(2));
  constexpr int kDraws = 40000;
  Vector sum = Vector::Zero(2);
  for (int i = 0; i < kDraws; ++i) sum += sample_candidates(m, xc, static_cast<std::uint64_t>(i), piv).head(2);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(sum[i] / kDraws - post.mean[i]) < 5.0 * std::sqrt(post.cov(i, i) / kDraws) + 1e-9);
  }
}

TEST_CASE("appending candidates keeps the draws on the original set") {
  std::mt19937_64 rng(26);
  const GpModel m = random_model(6, 3, rng);
  const Matrix xc = random_points(10, 3, rng);
  Matrix grown(15, 3);
  grown << xc, random_points(5, 3, rng);
  const Vector a = sample_candidates(m, xc, 3), b = sample_candidates(m, grown, 3);
  CHECK((a - b.head(10)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(b.maxCoeff() >= a.maxCoeff() - 1e-9);
}

TEST_CASE("incumbent rules") {
  Matrix x(3, 1);
  x << 0.1, 0.5, 0.9;
  Vector y(3);
  y << 1.0, 3.0, 2.0;
  const GpModel m = condition(Dataset::make(x, y), KernelParams::isotropic(1, 0.3));
  const Incumbent inc = incumbent(m);
  CHECK(inc.index == 1);
  CHECK(inc.x0[0] == 0.5);

  Matrix x2(2, 1);
  x2 << 0.2, 0.8;
  const GpModel tie = condition(Dataset::make(x2, Vector::Constant(2, 2.0)), KernelParams::isotropic(1, 0.3));
  CHECK(incumbent(tie).index == 0);

  std::mt19937_64 rng(27);
  const Matrix xn = random_points(12, 2, rng);
  Vector yn = xn.col(0) + 0.3 * testing::random_vector(12, rng, -1.0, 1.0);
  const GpModel noisy = condition(Dataset::make(xn, yn), KernelParams::isotropic(2, 0.5, 0.1));
  const Vector pm = posterior_mean(noisy, xn);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < 12; ++i) {
    if (pm[i] > pm[best]) best = i;
  }
  CHECK(incumbent(noisy, IncumbentRule::MaxPosteriorMean).index == best);
  CHECK_THROWS(incumbent(condition(Dataset::empty(2), KernelParams::isotropic(2, 0.5))));
}

TEST_CASE("jitter escalation") {
  Matrix singular = Matrix::Ones(4, 4);
  const CholeskyFactor f = jittered_cholesky(singular);
  CHECK(f.jitter > 0.0);
  const Matrix l = f.lower.triangularView<Eigen::Lower>();
  CHECK(((l * l.transpose()) - (singular + f.jitter * Matrix::Identity(4, 4))).cwiseAbs().maxCoeff() < 1e-12);

  Matrix indefinite = Matrix::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(jittered_cholesky(indefinite), CholeskyError);

  // needs more than the first two levels
  Matrix big = Matrix::Zero(3, 3);
  big.diagonal() << 1.0, 1.0, -5e-5;
  const CholeskyFactor g = jittered_cholesky(big);
  CHECK(g.jitter == kJitterLevels[2]);
}
