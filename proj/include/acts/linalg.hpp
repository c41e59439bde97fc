#pragma once

#include <array>
#include <functional>

#include <Eigen/Cholesky>

#include "acts/types.hpp"

namespace acts {

/// Jitter levels tried, in order, after a plain factorization fails.
inline constexpr std::array<double, 3> kJitterLevels{1e-8, 1e-6, 1e-4};

struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;  // diagonal shift that made the factorization succeed
};

/// Factorizes a symmetric matrix, escalating the diagonal jitter through
/// kJitterLevels on failure. `first_level` = -1 tries the matrix as given
/// first; 0..2 start directly at that jitter level. Throws CholeskyError
/// when the last level still fails.
CholeskyFactor jittered_cholesky(const Matrix& a, int first_level = -1);

/// In-place variant for large matrices: only the lower triangle of `a` is
/// overwritten with the factor, and the strict upper triangle is used to
/// restore it between attempts. Returns the jitter that succeeded.
double jittered_cholesky_inplace(Matrix& a, int first_level = -1);

/// Partial pivoted Cholesky of a PSD matrix given by its diagonal and a
/// column oracle. Stops once the largest residual diagonal entry falls below
/// `tolerance` or `max_rank` columns have been taken.
struct PivotedCholesky {
  Matrix factor;              // n x rank, factor * factor^T approximates A
  Vector residual_diagonal;   // diag(A - factor * factor^T), clamped at 0
  bool converged = false;     // residual below tolerance
};

PivotedCholesky pivoted_cholesky(const Vector& diagonal,
                                 const std::function<Vector(Eigen::Index)>& column,
                                 double tolerance, Eigen::Index max_rank);

/// Copies the strict lower triangle onto the strict upper one (and back).
void mirror_lower_to_upper(Matrix& a);
void mirror_upper_to_lower(Matrix& a);

/// Solves L x = b for lower-triangular L (in place on a copy).
Matrix lower_solve(const Matrix& lower, const Matrix& rhs);

/// Sum of log of the diagonal, i.e. half of log det(L L^T).
double half_log_det(const Matrix& lower);

}  // namespace acts
