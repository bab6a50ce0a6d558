#pragma once

// Numerical contraction experiments on the Fock representation. Classical
// ("tilde") labels are the expectation values of the rescaled observables
// X/k and P/k; the underlying coherent labels are k times larger.

#include "qspace/hilbert.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qspace::contraction {

using hilbert::Complex;
using hilbert::FockSpace;
using hilbert::SparseOperator;
using hilbert::StateVector;

/// k = 1/sqrt(hbar); throws for hbar <= 0.
double k_from_hbar(double hbar);
double hbar_from_k(double k);

struct RescaledOperators {
  double k = 1.0;
  std::vector<SparseOperator> position;  ///< X_i / k
  std::vector<SparseOperator> momentum;  ///< P_i / k
};

RescaledOperators rescaled_operators(const FockSpace& space, double k);

/// max |[X^c_i, P^c_j] - (i/k^2) delta_ij| over the safe subspace.
double rescaled_commutator_deviation(const FockSpace& space, double k);

/// Underlying label (k p, k x, theta) of a classical label.
WeylLabel underlying_label(const WeylLabel& tilde, double k);

/// Coherent state with <X^c> = tilde.x and <P^c> = tilde.p.
StateVector relabel_coherent(const FockSpace& space, const WeylLabel& tilde, double k);

enum class CutoffPolicy { fixed, scale_with_k };
std::string_view to_string(CutoffPolicy policy);
CutoffPolicy parse_cutoff_policy(std::string_view name);

/// Per-mode cutoff for labels bounded by `max_label` at scale k.
/// scale_with_k: max(64, ceil(4 k^2 max_label^2)).
int policy_cutoff(CutoffPolicy policy, int fixed_cutoff, double k, double max_label);

struct LabelPair {
  std::string id;
  WeylLabel bra;  ///< classical labels, primed side
  WeylLabel ket;
};

/// Parses "dx=1,dp=0" style pair strings. Keys: x, p (ket base), dx, dp
/// (bra = base + delta), theta; all along the first axis.
LabelPair parse_label_pair(const std::string& text, const std::string& id);

/// Largest |component| over both labels of a pair.
double max_label(const LabelPair& pair);

struct ContractionRunConfig {
  std::vector<double> k_values{1, 2, 3, 4, 6, 8};
  std::vector<LabelPair> pairs;
  CutoffPolicy policy = CutoffPolicy::scale_with_k;
  int fixed_cutoff = 64;
  int modes = 1;
  /// Fock numerics run for k <= fock_k_max; larger k use the closed form only.
  double fock_k_max = 4.0;

  /// Throws std::invalid_argument for empty or non-ascending k lists, k < 1,
  /// unsupported mode counts, or labels beyond the mode count.
  void validate() const;
};

struct DecayRecord {
  double k = 1.0;
  double hbar = 1.0;
  std::string pair_id;
  std::string backend;  ///< "fock" or "closed_form"
  int cutoff = 0;       ///< 0 when no Fock space was built
  Complex closed_form;  ///< overlap from the general closed form at scaled labels
  std::optional<Complex> numeric;
  double overlap_abs = 0.0;  ///< numeric when available, otherwise closed form
  double overlap_phase = 0.0;
  double predicted_abs = 0.0;    ///< exp(-k^2 Delta^2 / 4)
  double predicted_phase = 0.0;  ///< k^2 (x'.p - p'.x)/2, wrapped to (-pi, pi]
  double abs_err = 0.0;
  double phase_err = 0.0;
  /// <s'|X^c_1|s>/<s'|s> and its closed form [(x' + x) - i(p' - p)]/2.
  Complex position_ratio;
  Complex predicted_position_ratio;
  std::optional<std::string> guard_error;
};

std::vector<DecayRecord> overlap_decay_sweep(const ContractionRunConfig& config);

/// Least-squares slope of log(value) against k^2.
double log_slope_against_k_squared(const std::vector<double>& k, const std::vector<double>& value);

struct EmergenceReport {
  double k = 1.0;
  Complex overlap;
  double suppression = 0.0;  ///< |<s'|s>|
  Complex position_ratio, predicted_position_ratio;
  Complex momentum_ratio, predicted_momentum_ratio;
  double ratio_error = 0.0;  ///< max |numeric - closed| / max(1, |closed|) over both ratios
  bool closed_form_substituted = false;
  double diagonal_position_error = 0.0;  ///< max over both states of |<X^c> - x~|
  double diagonal_momentum_error = 0.0;
};

EmergenceReport eigenvalue_emergence(const FockSpace& space, const LabelPair& pair, double k, int mode = 0);

struct ClassicalizationStep {
  double k = 1.0;
  int cutoff = 0;
  Eigen::MatrixXcd gram;             ///< numeric Gram matrix
  Eigen::MatrixXcd gram_closed_form;
  double gram_error = 0.0;           ///< max |numeric - closed| entrywise
  double max_offdiag_gram = 0.0;
  Eigen::MatrixXcd position_matrix;  ///< <s_i|X^c|s_j>
  double max_offdiag_position = 0.0;
  Eigen::VectorXd compressed_eigenvalues;  ///< eigenvalues of G^{-1} M, ascending
  double eigenvalue_error = 0.0;           ///< against the sorted labels
};

/// Relabeled coherent states at 1D positions `labels` (pairwise distinct),
/// scanned over `k_values` with the scale-with-k cutoff policy.
std::vector<ClassicalizationStep> classicalization_report(const std::vector<double>& labels,
                                                          const std::vector<double>& k_values);

struct RotationRelabelReport {
  double k = 1.0;
  double state_deviation = 0.0;  ///< |R|p~,x~>_k - |Rp~,Rx~>_k|_inf
  Complex gram_with_rotated;     ///< <s|R s> numerically
  Complex gram_closed_form;
  /// Rotation generator on the relabeled state, reported only.
  double rotation_expectation = 0.0;
  double rotation_spread = 0.0;  ///< standard deviation of J_12
};

/// Three-mode check that rotating a relabeled coherent state gives the
/// relabeled state with rotated labels.
RotationRelabelReport rotation_relabel_check(const FockSpace& space, const WeylLabel& tilde, double k,
                                             const Eigen::Vector3d& omega);

}  // namespace qspace::contraction
