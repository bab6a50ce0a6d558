#pragma once

// Matrix realizations of the two coset spaces of H_R(3):
//   phase  : 8x8 matrices acting on (p1 p2 p3, x1 x2 x3, theta, 1)
//   config : 5x5 matrices acting on (x1 x2 x3, theta, 1)

#include "qspace/weyl_label.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <optional>
#include <string_view>

namespace qspace::coset {

enum class CosetKind { phase, config };

std::string_view to_string(CosetKind kind);
CosetKind parse_coset_kind(std::string_view name);

/// Matrix size (8 or 5) and number of coset coordinates (7 or 4).
int matrix_size(CosetKind kind);
int coordinate_count(CosetKind kind);

/// Real parameters of an algebra element. `omega` holds the independent entries
/// (w23, w31, w12) of the antisymmetric rotation generator.
struct AlgebraParams {
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();
  Eigen::Vector3d pbar = Eigen::Vector3d::Zero();
  Eigen::Vector3d xbar = Eigen::Vector3d::Zero();
  double thetabar = 0.0;

  /// The antisymmetric 3x3 matrix with (1,2) = w12, (2,3) = w23, (3,1) = w31.
  Eigen::Matrix3d omega_matrix() const;
};

/// Parameters of the element whose lie_core coefficient vector (in the HR3
/// basis J23 J31 J12 X1..3 P1..3 I) is `c`. Under this map the algebra
/// matrices close with the lie_core brackets and exp_algebra of a pure Weyl
/// element reproduces W(pbar, xbar, thetabar).
AlgebraParams params_from_coefficients(const Eigen::VectorXd& c);

struct CosetMatrix {
  CosetKind kind = CosetKind::phase;
  Eigen::MatrixXd entries;
};

/// Rotation exp(Omega) about `axis` (normalized internally) by `angle`.
Eigen::Matrix3d axis_angle_rotation(const Eigen::Vector3d& axis, double angle);

/// Infinitesimal generator matrix of the coset action.
Eigen::MatrixXd algebra_matrix(CosetKind kind, const AlgebraParams& params);

/// Coordinate differentials at `point`; phase points are (p, x, theta),
/// config points are (x, theta).
Eigen::VectorXd infinitesimal_action(CosetKind kind, const AlgebraParams& params,
                                     const Eigen::VectorXd& point);

/// Weyl factor times rotation factor. Throws if `rotation` is not a proper
/// rotation to 1e-12.
CosetMatrix group_element(CosetKind kind, const WeylLabel& w,
                          const Eigen::Matrix3d& rotation = Eigen::Matrix3d::Identity());

/// Label of a pure Weyl element (rotation block equal to the identity within `tolerance`).
std::optional<WeylLabel> extract_weyl_label(const CosetMatrix& g, double tolerance = 1e-12);

struct Composition {
  CosetMatrix product;
  std::optional<WeylLabel> product_label;  ///< read off the matrix product
  std::optional<WeylLabel> formula_label;  ///< closed-form group law
  double max_abs_diff = 0.0;               ///< elementwise, product vs. formula matrix
};

Composition compose(const CosetMatrix& left, const CosetMatrix& right);

/// k for the contracted action; `infinite()` deletes the 1/k^2 terms exactly.
class ContractionScale {
 public:
  static ContractionScale finite(double k);
  static ContractionScale infinite() { return ContractionScale(); }

  bool is_infinite() const { return infinite_; }
  double k() const;
  double inverse_k_squared() const { return infinite_ ? 0.0 : 1.0 / (k_ * k_); }

 private:
  ContractionScale() = default;
  double k_ = 0.0;
  bool infinite_ = true;
};

/// Action on contracted coordinates (p_c, x_c, theta) / (x_c, theta) for
/// parameters (pbar_c, xbar_c) that stay finite as k grows.
Eigen::VectorXd contracted_action(CosetKind kind, const AlgebraParams& params_c,
                                  const Eigen::VectorXd& point_c, ContractionScale scale);

/// Matrix exponential of algebra_matrix(kind, params).
CosetMatrix exp_algebra(CosetKind kind, const AlgebraParams& params);

nlohmann::json to_json(const AlgebraParams& params);
AlgebraParams algebra_params_from_json(const nlohmann::json& j);

}  // namespace qspace::coset
