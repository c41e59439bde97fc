#include "acts/linalg.hpp"

#include <cmath>
#include <sstream>

#include "acts/error.hpp"

namespace acts {

namespace {

bool try_factor(Matrix& work) {
  Eigen::LLT<Eigen::Ref<Matrix>, Eigen::Lower> llt(work);
  return llt.info() == Eigen::Success;
}

}  // namespace

CholeskyFactor jittered_cholesky(const Matrix& a, int first_level) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix is not square");
  Matrix work = a;
  const double jitter = jittered_cholesky_inplace(work, first_level);
  CholeskyFactor out;
  out.lower = work.triangularView<Eigen::Lower>();
  out.jitter = jitter;
  return out;
}

double jittered_cholesky_inplace(Matrix& a, int first_level) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix is not square");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  const Vector diag = a.diagonal();
  // The strict upper triangle is never touched by a lower factorization,
  // so it serves as the backup copy of the input.
  auto restore = [&]() {
    mirror_upper_to_lower(a);
    a.diagonal() = diag;
  };
  mirror_lower_to_upper(a);

  if (first_level < 0) {
    if (try_factor(a)) return 0.0;
    first_level = 0;
  }
  for (std::size_t level = static_cast<std::size_t>(first_level); level < kJitterLevels.size(); ++level) {
    restore();
    a.diagonal().array() += kJitterLevels[level];
    if (try_factor(a)) return kJitterLevels[level];
  }
  std::ostringstream msg;
  msg << "cholesky failed for " << n << "x" << n << " matrix after jitter " << kJitterLevels.back()
      << " (min diagonal " << diag.minCoeff() << ")";
  throw CholeskyError(msg.str(), kJitterLevels.back());
}

PivotedCholesky pivoted_cholesky(const Vector& diagonal,
                                 const std::function<Vector(Eigen::Index)>& column,
                                 double tolerance, Eigen::Index max_rank) {
  const Eigen::Index n = diagonal.size();
  max_rank = std::min(max_rank, n);
  PivotedCholesky out;
  out.factor.resize(n, max_rank);
  Vector residual = diagonal.cwiseMax(0.0);
  Eigen::Index rank = 0;
  while (rank < max_rank) {
    Eigen::Index pivot = 0;
    const double largest = residual.maxCoeff(&pivot);
    if (largest < tolerance) {
      out.converged = true;
      break;
    }
    Vector col = column(pivot);
    if (rank > 0) col.noalias() -= out.factor.leftCols(rank) * out.factor.row(pivot).head(rank).transpose();
    const double root = std::sqrt(largest);
    out.factor.col(rank) = col / root;
    // pivoted rows already left the residual; keep them exactly zero
    out.factor(pivot, rank) = root;
    residual -= out.factor.col(rank).cwiseAbs2();
    residual[pivot] = 0.0;
    residual = residual.cwiseMax(0.0);
    ++rank;
  }
  if (!out.converged && residual.size() > 0 && residual.maxCoeff() < tolerance) out.converged = true;
  out.factor.conservativeResize(n, rank);
  out.residual_diagonal = residual;
  return out;
}

void mirror_lower_to_upper(Matrix& a) {
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) a(i, j) = a(j, i);
  }
}

void mirror_upper_to_lower(Matrix& a) {
  const Eigen::Index n = a.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) a(i, j) = a(j, i);
  }
}

Matrix lower_solve(const Matrix& lower, const Matrix& rhs) {
  return lower.triangularView<Eigen::Lower>().solve(rhs);
}

double half_log_det(const Matrix& lower) {
  return lower.diagonal().array().log().sum();
}

}  // namespace acts
