#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <optional>

namespace qspace::linalg {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

/// Smallest m <= max_order with A^m == 0 exactly, if any.
std::optional<int> nilpotency_index(const Eigen::MatrixXd& a, int max_order);

/// Matrix exponential. Nilpotent inputs use the terminating series (exact up to
/// rounding); everything else goes through scaling and squaring with Pade.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// exp(A) v by a stepped Taylor series, for sparse A whose exponential is too
/// large to form. Terms are summed until they drop below `tolerance * |v|`.
Eigen::VectorXcd expm_apply(const SparseMatrixC& a, const Eigen::VectorXcd& v, double tolerance = 1e-17);

}  // namespace qspace::linalg
