#pragma once

// Real structure-constant tables for finite-dimensional Lie algebras, with
// brackets carrying an explicit power of the contraction parameter
// eps = 1/k^2, and diagonal Inonu-Wigner contractions of such tables.
//
// Convention: [T_a, T_b] = i * sum_c coeff * eps^power * T_c, coefficients real.

#include <Eigen/Core>
#include <boost/rational.hpp>
#include <json.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qspace::lie {

enum class GeneratorRole { rotation, position, momentum, central, hamiltonian, other };

struct GeneratorLabel {
  std::string name;
  GeneratorRole role = GeneratorRole::other;
  int spatial_index = 0;  ///< 1..3 for X_i, P_i and the dual index of J; 0 otherwise
};

struct BracketTerm {
  std::size_t generator = 0;
  double coefficient = 0.0;
  int eps_power = 0;

  friend bool operator==(const BracketTerm&, const BracketTerm&) = default;
};

using Terms = std::vector<BracketTerm>;

class StructureConstantTable {
 public:
  StructureConstantTable(std::string name, std::vector<GeneratorLabel> generators);

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return generators_.size(); }
  const std::vector<GeneratorLabel>& generators() const { return generators_; }
  const GeneratorLabel& generator(std::size_t a) const { return generators_.at(a); }

  /// Index of the generator called `name`; throws std::invalid_argument if absent.
  std::size_t index_of(std::string_view name) const;

  /// Stores [T_a, T_b] = terms and the mirrored entry [T_b, T_a] = -terms.
  void set_bracket(std::size_t a, std::size_t b, Terms terms);

  /// Stores a single (a, b) entry without touching (b, a). Only meant for
  /// building deliberately defective tables.
  void set_entry_unmirrored(std::size_t a, std::size_t b, Terms terms);

  const Terms& entry(std::size_t a, std::size_t b) const;

  /// Largest eps power appearing anywhere in the table.
  int max_eps_power() const;

  /// Numeric table at a fixed eps: every coefficient multiplied by eps^power,
  /// powers reset to zero, vanishing terms dropped.
  StructureConstantTable evaluated_at(double eps) const;

  /// Dense structure constants f[a](b, c) = coefficient of T_c in [T_a, T_b] at eps.
  std::vector<Eigen::MatrixXd> dense_at(double eps) const;

  friend bool operator==(const StructureConstantTable&, const StructureConstantTable&);

 private:
  std::string name_;
  std::vector<GeneratorLabel> generators_;
  std::vector<Terms> entries_;  // row-major dimension x dimension
};

enum class StandardAlgebra { HR3, HR3_with_H };

StandardAlgebra parse_standard_algebra(std::string_view name);
std::string_view to_string(StandardAlgebra which);

/// H_R(3): J23, J31, J12, X1..X3, P1..P3, I (and H for the extended variant).
StructureConstantTable build_standard_algebra(StandardAlgebra which);
StructureConstantTable build_standard_algebra(std::string_view name);

/// Dual index bookkeeping for the antisymmetric J_ij (i != j, 1-based):
/// J_ij = sign * J_{dual}, with J23 -> 1, J31 -> 2, J12 -> 3.
struct DualRotation {
  int dual = 0;
  int sign = 0;
};
DualRotation rotation_dual(int i, int j);

/// Right-hand side of the four-index rotation bracket
///   delta_jk J_ih - delta_jh J_ik + delta_ih J_jk - delta_ik J_jh
/// expressed on the dual basis; entry d-1 is the coefficient of J_d.
Eigen::Vector3d four_index_rotation_bracket(int i, int j, int h, int k);

/// Coefficient vector of [u.T, v.T] at eps.
Eigen::VectorXd bracket(const StructureConstantTable& table, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v, double eps);

struct VerificationReport {
  double antisymmetry_max = 0.0;
  double jacobi_max = 0.0;
  std::vector<double> eps_samples;
};

VerificationReport verify_algebra(const StructureConstantTable& table,
                                  const std::vector<double>& eps_samples);

/// Largest coefficient of the Jacobi sum viewed as a polynomial in eps.
double symbolic_jacobi_max(const StructureConstantTable& table);

using Weight = boost::rational<int>;

/// Base algebra plus per-generator weights w; the rescaled generators are
/// T^c = k^(-w) T. Construction fails unless every rescaled bracket carries a
/// non-negative integer power of eps.
class ContractionFamily {
 public:
  ContractionFamily(StructureConstantTable base, std::vector<Weight> weights);

  const StructureConstantTable& base() const { return base_; }
  const std::vector<Weight>& weights() const { return weights_; }
  /// Rescaled-basis table with eps kept symbolic.
  const StructureConstantTable& symbolic() const { return symbolic_; }

 private:
  StructureConstantTable base_;
  std::vector<Weight> weights_;
  StructureConstantTable symbolic_;
};

/// X_i and P_i get weight 1; J, I and H keep weight 0.
ContractionFamily standard_contraction(const StructureConstantTable& base);

/// Numeric table of the rescaled basis at k >= 1 (eps = 1/k^2).
StructureConstantTable apply_contraction(const ContractionFamily& family, double k);

/// The k -> infinity table: every term with a positive eps power dropped.
StructureConstantTable limit_algebra(const ContractionFamily& family);

// JSON surface: {name, generators, brackets: [{a, b, terms: [{gen, coeff, eps_power}]}]},
// only a < b stored.
nlohmann::json to_json(const StructureConstantTable& table);
StructureConstantTable table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const VerificationReport& report);

}  // namespace qspace::lie
