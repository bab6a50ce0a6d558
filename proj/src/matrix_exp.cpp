#include "qspace/matrix_exp.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace qspace::linalg {

std::optional<int> nilpotency_index(const Eigen::MatrixXd& a, int max_order) {
  if (a.rows() != a.cols()) throw std::invalid_argument("nilpotency check needs a square matrix");
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int m = 1; m <= max_order; ++m) {
    power = power * a;
    if ((power.array() == 0.0).all()) return m;
  }
  return std::nullopt;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm needs a square matrix");
  if (const auto m = nilpotency_index(a, static_cast<int>(a.rows()))) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd term = sum;
    for (int j = 1; j < *m; ++j) {
      term = term * a / static_cast<double>(j);
      sum += term;
    }
    return sum;
  }
  return a.exp();
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm needs a square matrix");
  return a.exp();
}

Eigen::VectorXcd expm_apply(const SparseMatrixC& a, const Eigen::VectorXcd& v, double tolerance) {
  if (a.rows() != a.cols() || a.cols() != v.size())
    throw std::invalid_argument("expm_apply: dimension mismatch");
  double norm1 = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrixC::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  // Keep each Taylor step's argument below 1/2 so every partial sum is well conditioned.
  const int steps = std::max(1, static_cast<int>(std::ceil(2.0 * norm1)));
  const double h = 1.0 / steps;
  Eigen::VectorXcd out = v;
  const double floor = tolerance * std::max(v.norm(), 1e-300);
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd term = out;
    Eigen::VectorXcd sum = out;
    for (int j = 1; j < 200; ++j) {
      term = (a * term) * (h / j);
      sum += term;
      if (term.norm() <= floor) break;
    }
    out = std::move(sum);
  }
  return out;
}

}  // namespace qspace::linalg
