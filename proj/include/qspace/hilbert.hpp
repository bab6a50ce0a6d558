#pragma once

// Unitary representation of H_R(3) on a truncated Fock space, with a 1D
// position-grid backend for cross-checks. Mode indices are 0-based.
//
// Conventions: X = (a + a^dag)/sqrt2, P = (a - a^dag)/(i sqrt2), fiducial
// state = Fock vacuum, coherent |p, x> = exp i(p.X - x.P)|0>, and
// J_ij = X_j P_i - X_i P_j so that the realized brackets match lie_core.

#include "qspace/lie_core.hpp"
#include "qspace/matrix_exp.hpp"
#include "qspace/weyl_label.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qspace::hilbert {

using Complex = std::complex<double>;
using SparseOperator = linalg::SparseMatrixC;

/// Raised when a coherent state would put too much weight near the cutoff.
class TruncationGuardError : public std::invalid_argument {
 public:
  TruncationGuardError(const std::string& what, int required_cutoff)
      : std::invalid_argument(what), required_cutoff_(required_cutoff) {}
  int required_cutoff() const { return required_cutoff_; }

 private:
  int required_cutoff_;
};

struct FockDiagnostics {
  double hermiticity_max = 0.0;          ///< over X_i, P_i, J_ij
  double canonical_commutator_max = 0.0; ///< [a_i, a_j^dag] - delta_ij below the top level
};

class FockSpace {
 public:
  /// modes in {1, 3}; per-mode occupations 0..cutoff, cutoff >= 2.
  FockSpace(int modes, int cutoff);

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dimension() const { return dimension_; }

  const SparseOperator& annihilation(int mode) const { return lower_.at(check_mode(mode)); }
  const SparseOperator& creation(int mode) const { return raise_.at(check_mode(mode)); }
  const SparseOperator& position(int mode) const { return position_.at(check_mode(mode)); }
  const SparseOperator& momentum(int mode) const { return momentum_.at(check_mode(mode)); }
  /// J_23, J_31, J_12 for dual = 0, 1, 2. Needs three modes.
  const SparseOperator& rotation_generator(int dual) const;
  SparseOperator identity() const;

  int occupation(Eigen::Index basis_index, int mode) const;
  Eigen::Index basis_index(const std::vector<int>& occupations) const;

  /// Basis states with every occupation <= cutoff - 2; canonical identities
  /// for operators up to quadratic order hold exactly on their span.
  const std::vector<Eigen::Index>& safe_indices() const { return safe_; }
  /// Probability on basis states with some occupation >= cutoff - 1.
  double top_level_support(const Eigen::VectorXcd& v) const;

  const FockDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  int check_mode(int mode) const;

  int modes_;
  int cutoff_;
  Eigen::Index dimension_;
  std::vector<SparseOperator> lower_, raise_, position_, momentum_, rotation_;
  std::vector<Eigen::Index> safe_;
  FockDiagnostics diagnostics_;
};

FockSpace build_fock_space(int modes, int cutoff);

enum class Backend { fock, grid };
std::string_view to_string(Backend b);
Backend parse_backend(std::string_view name);

struct StateVector {
  Backend backend = Backend::fock;
  Eigen::VectorXcd coefficients;
  std::optional<WeylLabel> label;  ///< set for constructed coherent states
  double truncation_tail = 0.0;    ///< probability lost to the cutoff or the grid edges
  int modes = 1;
  int cutoff = 0;                  ///< fock shape
  double grid_spacing = 0.0;       ///< grid quadrature weight

  double norm() const;
};

/// Mean occupation (x_i^2 + p_i^2)/2 of the most excited mode.
double mean_occupation(const WeylLabel& w);
/// Smallest cutoff admitting `w` under the guard mean occupation <= cutoff/4.
int required_cutoff(const WeylLabel& w);

/// e^{i theta}|p, x> from the closed-form Fock coefficients
///   c_n = e^{i theta} e^{-|alpha|^2/2} alpha^n / sqrt(n!),  alpha = (x + i p)/sqrt2 per mode.
/// One-mode spaces use component 0 of the label and require the rest to vanish.
StateVector coherent_state(const FockSpace& space, const WeylLabel& w);
StateVector fock_vacuum(const FockSpace& space);

/// <s1|s2>.
Complex overlap(const StateVector& s1, const StateVector& s2);

/// <p', x'; theta'|p, x; theta> in closed form.
Complex overlap_closed_form(const WeylLabel& bra, const WeylLabel& ket);

enum class ObservableKind { position, momentum };

struct Observable {
  ObservableKind kind = ObservableKind::position;
  int mode = 0;
};

/// <bra| O |ket> in closed form (coherent labels).
Complex matrix_element_closed_form(Observable o, const WeylLabel& bra, const WeylLabel& ket);

struct MatrixElement {
  Complex numeric;
  std::optional<Complex> closed_form;  ///< only when both inputs carry coherent labels
  /// |numeric - closed| / max(|closed|, |<bra|ket>|); the denominator keeps the
  /// measure finite where the label prefactor vanishes.
  std::optional<double> relative_error;
};

MatrixElement matrix_element(const FockSpace& space, Observable o, const StateVector& bra,
                             const StateVector& ket);

enum class WeylForm { factored, single_exponential };

/// Dense U(p, x, theta) on the whole Fock space. The factored form is
/// e^{i x.p/2} e^{i theta} e^{-i x.P} e^{i p.X}; both forms are built per mode.
Eigen::MatrixXcd weyl_unitary(const FockSpace& space, const WeylLabel& w, WeylForm form);

/// U(w)|v> through sparse exponential actions of the generators.
Eigen::VectorXcd apply_weyl(const FockSpace& space, const WeylLabel& w, WeylForm form,
                            const Eigen::VectorXcd& v);

/// exp(-i (w23 J23 + w31 J31 + w12 J12)) |v>; maps |p, x> to |R p, R x> with
/// R = exp(Omega(omega)) as in the coset rotation blocks.
Eigen::VectorXcd apply_rotation(const FockSpace& space, const Eigen::Vector3d& omega,
                                const Eigen::VectorXcd& v);

/// Operator realizing a named lie_core generator (J23.., X1.., P1.., I).
SparseOperator realize_generator(const FockSpace& space, const lie::GeneratorLabel& g);

struct BracketDeviation {
  std::string a, b;
  double deviation = 0.0;
};

struct OperatorCheckReport {
  double max_deviation = 0.0;
  std::vector<BracketDeviation> brackets;
};

/// Compares every realized [T_a, T_b] against i sum_c f_ab^c T_c, measured on
/// the safe subspace. Generators not realizable with the space's mode count
/// are skipped.
OperatorCheckReport operator_commutator_check(const FockSpace& space, const lie::StructureConstantTable& table);

// ---- position grid (1D) ----

class GridSpace {
 public:
  /// Points y_m = -extent + m * spacing, spacing = 2 extent / points, points even.
  GridSpace(double extent, int points);

  double extent() const { return extent_; }
  int points() const { return points_; }
  double spacing() const { return spacing_; }
  double position(int m) const;
  const Eigen::VectorXd& positions() const { return positions_; }
  /// Angular wavenumbers matching the FFT ordering.
  const Eigen::VectorXd& wavenumbers() const { return wavenumbers_; }

 private:
  double extent_;
  int points_;
  double spacing_;
  Eigen::VectorXd positions_, wavenumbers_;
};

/// Distance kept between a label and the grid edge (position and wavenumber).
inline constexpr double kGridMargin = 6.0;

/// Sampled coherent wavefunction
///   psi(y) = e^{i theta} pi^{-1/4} e^{-i p x/2} e^{i p y} e^{-(y - x)^2/2}.
StateVector grid_coherent_state(const GridSpace& grid, double p, double x, double theta = 0.0);

/// Eigenvalue phase e^{i (p y_m + theta)} of e^{i p X} e^{i theta} on the delta vector at y_m.
Complex grid_position_action(const GridSpace& grid, double p, int index, double theta = 0.0);

/// e^{i p X} applied to a grid state (diagonal).
StateVector apply_position_phase(const GridSpace& grid, const StateVector& s, double p);

/// e^{-i shift P} applied spectrally.
StateVector grid_translate(const GridSpace& grid, const StateVector& s, double shift);

struct CrossValidation {
  Complex fock, grid, closed_form;
  double difference = 0.0;  ///< |fock - grid|
  double tolerance = 0.0;   ///< truncation tails + quadrature allowance
};

CrossValidation cross_validate_backends(const FockSpace& fock, const GridSpace& grid, const WeylLabel& bra,
                                        const WeylLabel& ket);

// ---- projective Hilbert space as a Hamiltonian system ----

/// Normalization of the Hamiltonian function for coefficients c_n = q_n + i p_n:
///   h(q, p) = kHamiltonFactor * <phi|H|phi>   (hbar = 1).
inline constexpr double kHamiltonFactor = 0.5;

/// h(q, p) for H = A + iB (A symmetric, B antisymmetric).
double hamilton_function(const Eigen::MatrixXcd& h, const Eigen::VectorXd& q, const Eigen::VectorXd& p);

/// (dh/dq, dh/dp).
std::pair<Eigen::VectorXd, Eigen::VectorXd> hamilton_gradient(const Eigen::MatrixXcd& h, const Eigen::VectorXd& q,
                                                              const Eigen::VectorXd& p);

/// Least-squares factor kappa such that Hamilton's equations for
/// kappa * <phi|H|phi> reproduce the Schroedinger velocity at `state`.
double calibrate_hamilton_factor(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& state);

/// (P^2 + X^2)/2 built from the truncated single-mode operators.
Eigen::MatrixXcd harmonic_hamiltonian(const FockSpace& space);

struct FlowReport {
  double max_trajectory_deviation = 0.0;  ///< Schroedinger vs. Hamilton, over all steps
  double norm_drift = 0.0;                ///< max | |c(t)|^2 - |c(0)|^2 |
  double step_halving_error = 0.0;        ///< dt vs dt/2 at the final time
  double energy_drift = 0.0;
  double hamilton_factor = kHamiltonFactor;
  long steps = 0;
  Eigen::VectorXcd final_state;
};

/// Integrates i dc/dt = H c and Hamilton's equations for (q, p) with fixed-step RK4.
FlowReport projective_flow_check(const Eigen::MatrixXcd& hamiltonian, const Eigen::VectorXcd& initial,
                                 double t_final, double dt);

nlohmann::json to_json(const StateVector& s);

}  // namespace qspace::hilbert
