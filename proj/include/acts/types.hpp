#pragma once

#include <Eigen/Core>

namespace acts {

using Vector = Eigen::VectorXd;
/// Point sets are stored one point per row.
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace acts
