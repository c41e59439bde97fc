#include "acts/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "acts/error.hpp"
#include "acts/linalg.hpp"

namespace acts {

namespace {

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

void KernelParams::validate() const {
  if (lengthscales.size() == 0) throw std::invalid_argument("KernelParams: empty lengthscales");
  if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
    throw std::invalid_argument("KernelParams: lengthscales must be positive and finite");
  }
  if (!(outputscale > 0.0)) throw std::invalid_argument("KernelParams: outputscale must be positive");
  if (!(noise_variance >= kNoiseFloor)) {
    throw std::invalid_argument("KernelParams: noise variance below floor " + std::to_string(kNoiseFloor));
  }
}

KernelParams KernelParams::isotropic(Eigen::Index d, double lengthscale, double noise) {
  KernelParams p;
  p.lengthscales = Vector::Constant(d, lengthscale);
  p.noise_variance = noise;
  return p;
}

double eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2, const KernelParams& p) {
  check_same_dim(x.size(), p.dim(), "kernel eval");
  check_same_dim(x2.size(), p.dim(), "kernel eval");
  const double r2 = ((x - x2).array() / p.lengthscales.array()).square().sum();
  return p.outputscale * std::exp(-0.5 * r2);
}

Vector grad_first_arg(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                      const KernelParams& p) {
  const double k = eval(x, x2, p);
  return -((x - x2).array() / p.lengthscales.array().square()).matrix() * k;
}

Vector grad_second_arg(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                       const KernelParams& p) {
  const double k = eval(x, x2, p);
  return ((x - x2).array() / p.lengthscales.array().square()).matrix() * k;
}

Matrix hess_mixed(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x2,
                  const KernelParams& p) {
  const double k = eval(x, x2, p);
  const Vector inv_l2 = p.lengthscales.array().square().inverse();
  const Vector u = (x - x2).cwiseProduct(inv_l2);
  Matrix h = -u * u.transpose();
  h.diagonal() += inv_l2;
  return h * k;
}

Matrix cross_gram(const Matrix& a, const Matrix& b, const KernelParams& p) {
  check_same_dim(a.cols(), p.dim(), "cross_gram");
  check_same_dim(b.cols(), p.dim(), "cross_gram");
  const Vector inv_ell = p.lengthscales.cwiseInverse();
  const Matrix as = a * inv_ell.asDiagonal();
  const Matrix bs = b * inv_ell.asDiagonal();
  const Vector na = as.rowwise().squaredNorm();
  const Vector nb = bs.rowwise().squaredNorm();
  const Eigen::Index n = a.rows(), m = b.rows();
  // |a - b|^2 = |a|^2 + |b|^2 - 2 a.b, with the inner products from one GEMM
  Matrix out(n, m);
  out.noalias() = as * bs.transpose();
  const double s = p.outputscale;
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    out.col(j) = s * (-0.5 * (na.array() + nb[j] - 2.0 * out.col(j).array()).max(0.0)).exp();
  }
  return out;
}

Matrix gram(const Matrix& a, const KernelParams& p) {
  check_same_dim(a.cols(), p.dim(), "gram");
  const Vector inv_ell = p.lengthscales.cwiseInverse();
  const Matrix as = a * inv_ell.asDiagonal();
  const Vector na = as.rowwise().squaredNorm();
  const Eigen::Index n = a.rows();
  Matrix out = Matrix::Zero(n, n);
  out.selfadjointView<Eigen::Lower>().rankUpdate(as);
  const double s = p.outputscale;
#pragma omp parallel for schedule(dynamic, 16)
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index len = n - j - 1;
    out.col(j).tail(len) =
        s * (-0.5 * (na.tail(len).array() + na[j] - 2.0 * out.col(j).tail(len).array()).max(0.0)).exp();
    out(j, j) = s;
  }
  mirror_lower_to_upper(out);
  return out;
}

Matrix gradient_cross(const Matrix& a, const Eigen::Ref<const Vector>& x0, const KernelParams& p) {
  check_same_dim(a.cols(), p.dim(), "gradient_cross");
  check_same_dim(x0.size(), p.dim(), "gradient_cross");
  const Eigen::Index n = a.rows(), d = p.dim();
  const Vector inv_l2 = p.lengthscales.array().square().inverse();
  Matrix out(n, d);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double t = a(i, k) - x0[k];
      r2 += t * t * inv_l2[k];
    }
    const double kv = p.outputscale * std::exp(-0.5 * r2);
    for (Eigen::Index k = 0; k < d; ++k) out(i, k) = (a(i, k) - x0[k]) * inv_l2[k] * kv;
  }
  return out;
}

Matrix JointGramBlocks::assemble() const {
  const Eigen::Index n = Kyy.rows(), m = Kff.rows(), d = Kgg.rows();
  Matrix full(n + m + d, n + m + d);
  full.block(0, 0, n, n) = Kyy;
  full.block(0, n, n, m) = Kyf;
  full.block(0, n + m, n, d) = Kyg;
  full.block(n, 0, m, n) = Kyf.transpose();
  full.block(n, n, m, m) = Kff;
  full.block(n, n + m, m, d) = Kfg;
  full.block(n + m, 0, d, n) = Kyg.transpose();
  full.block(n + m, n, d, m) = Kfg.transpose();
  full.block(n + m, n + m, d, d) = Kgg;
  return full;
}

JointGramBlocks gram_blocks(const Matrix& x, const Matrix& xc, const Eigen::Ref<const Vector>& x0,
                            const KernelParams& p) {
  const Eigen::Index d = p.dim();
  if (x.rows() > 0) check_same_dim(x.cols(), d, "gram_blocks");
  if (xc.rows() > 0) check_same_dim(xc.cols(), d, "gram_blocks");
  check_same_dim(x0.size(), d, "gram_blocks");
  const Matrix xs = x.rows() > 0 ? x : Matrix(0, d);
  const Matrix xcs = xc.rows() > 0 ? xc : Matrix(0, d);
  JointGramBlocks b;
  b.Kyy = gram(xs, p);
  b.Kyy.diagonal().array() += p.noise_variance;
  b.Kyf = cross_gram(xs, xcs, p);
  b.Kyg = gradient_cross(xs, x0, p);
  b.Kff = gram(xcs, p);
  b.Kfg = gradient_cross(xcs, x0, p);
  b.Kgg = hess_mixed(x0, x0, p);
  return b;
}

namespace reference {

Matrix cross_gram(const Matrix& a, const Matrix& b, const KernelParams& p) {
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = eval(a.row(i).transpose(), b.row(j).transpose(), p);
  }
  return out;
}

Matrix gradient_cross(const Matrix& a, const Eigen::Ref<const Vector>& x0, const KernelParams& p) {
  Matrix out(a.rows(), p.dim());
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.row(i) = grad_second_arg(a.row(i).transpose(), x0, p).transpose();
  return out;
}

}  // namespace reference

}  // namespace acts
