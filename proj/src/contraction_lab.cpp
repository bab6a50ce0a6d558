#include "qspace/contraction_lab.hpp"

#include "qspace/coset_rep.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qspace::contraction {

namespace {

constexpr Complex kI(0.0, 1.0);

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

void require_k(double k) {
  if (!(k >= 1.0) || std::isinf(k)) throw std::invalid_argument("contraction parameter k must be finite and >= 1");
}

double safe_max_abs(const SparseOperator& m, const std::vector<Eigen::Index>& safe) {
  double worst = 0.0;
  for (Eigen::Index c : safe)
    for (SparseOperator::InnerIterator it(m, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

int pair_cutoff(const ContractionRunConfig& config, const LabelPair& pair, double k) {
  return policy_cutoff(config.policy, config.fixed_cutoff, k, max_label(pair));
}

}  // namespace

double k_from_hbar(double hbar) {
  if (!(hbar > 0.0) || std::isinf(hbar)) throw std::invalid_argument("hbar must be positive and finite");
  return 1.0 / std::sqrt(hbar);
}

double hbar_from_k(double k) {
  require_k(k);
  return 1.0 / (k * k);
}

RescaledOperators rescaled_operators(const FockSpace& space, double k) {
  require_k(k);
  RescaledOperators out;
  out.k = k;
  for (int m = 0; m < space.modes(); ++m) {
    out.position.push_back(space.position(m) / k);
    out.momentum.push_back(space.momentum(m) / k);
  }
  return out;
}

double rescaled_commutator_deviation(const FockSpace& space, double k) {
  const RescaledOperators ops = rescaled_operators(space, k);
  double worst = 0.0;
  for (int a = 0; a < space.modes(); ++a)
    for (int b = 0; b < space.modes(); ++b) {
      SparseOperator c = ops.position[a] * ops.momentum[b] - ops.momentum[b] * ops.position[a];
      if (a == b) c -= (kI / (k * k)) * space.identity();
      worst = std::max(worst, safe_max_abs(c, space.safe_indices()));
    }
  return worst;
}

WeylLabel underlying_label(const WeylLabel& tilde, double k) {
  require_k(k);
  return {k * tilde.p, k * tilde.x, tilde.theta};
}

StateVector relabel_coherent(const FockSpace& space, const WeylLabel& tilde, double k) {
  return hilbert::coherent_state(space, underlying_label(tilde, k));
}

std::string_view to_string(CutoffPolicy policy) {
  return policy == CutoffPolicy::fixed ? "fixed" : "scale-with-k";
}

CutoffPolicy parse_cutoff_policy(std::string_view name) {
  if (name == "fixed") return CutoffPolicy::fixed;
  if (name == "scale-with-k") return CutoffPolicy::scale_with_k;
  throw std::invalid_argument("unknown cutoff policy '" + std::string(name) + "' (expected fixed or scale-with-k)");
}

int policy_cutoff(CutoffPolicy policy, int fixed_cutoff, double k, double max_label) {
  if (policy == CutoffPolicy::fixed) return fixed_cutoff;
  return std::max(64, static_cast<int>(std::ceil(4.0 * k * k * max_label * max_label)));
}

LabelPair parse_label_pair(const std::string& text, const std::string& id) {
  double x = 0, p = 0, dx = 0, dp = 0, theta = 0;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("pair entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("pair entry '" + item + "' has a malformed number");
    }
    if (key == "x") x = value;
    else if (key == "p") p = value;
    else if (key == "dx") dx = value;
    else if (key == "dp") dp = value;
    else if (key == "theta") theta = value;
    else throw std::invalid_argument("unknown pair key '" + key + "' (expected x, p, dx, dp, theta)");
  }
  return {id, WeylLabel::one_d(p + dp, x + dx, theta), WeylLabel::one_d(p, x, 0.0)};
}

double max_label(const LabelPair& pair) {
  return std::max({pair.bra.p.cwiseAbs().maxCoeff(), pair.bra.x.cwiseAbs().maxCoeff(),
                   pair.ket.p.cwiseAbs().maxCoeff(), pair.ket.x.cwiseAbs().maxCoeff()});
}

void ContractionRunConfig::validate() const {
  if (k_values.empty()) throw std::invalid_argument("k list is empty");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    require_k(k_values[i]);
    if (i > 0 && !(k_values[i] > k_values[i - 1])) throw std::invalid_argument("k list must be strictly ascending");
  }
  if (modes != 1 && modes != 3) throw std::invalid_argument("modes must be 1 or 3");
  if (fixed_cutoff < 2) throw std::invalid_argument("fixed cutoff must be at least 2");
  for (const auto& pair : pairs)
    for (const WeylLabel* w : {&pair.bra, &pair.ket})
      for (int m = modes; m < 3; ++m)
        if (w->p[m] != 0.0 || w->x[m] != 0.0)
          throw std::invalid_argument("pair '" + pair.id + "' has components beyond " + std::to_string(modes) + " mode(s)");
}

std::vector<DecayRecord> overlap_decay_sweep(const ContractionRunConfig& config) {
  config.validate();
  std::vector<DecayRecord> records;
  for (const auto& pair : config.pairs) {
    const double delta2 = (pair.bra.x - pair.ket.x).squaredNorm() + (pair.bra.p - pair.ket.p).squaredNorm();
    const double symplectic = pair.bra.x.dot(pair.ket.p) - pair.bra.p.dot(pair.ket.x);
    for (double k : config.k_values) {
      DecayRecord r;
      r.k = k;
      r.hbar = hbar_from_k(k);
      r.pair_id = pair.id;
      const WeylLabel bra = underlying_label(pair.bra, k);
      const WeylLabel ket = underlying_label(pair.ket, k);
      r.closed_form = hilbert::overlap_closed_form(bra, ket);
      r.predicted_abs = std::exp(-0.25 * k * k * delta2);
      r.predicted_phase = wrap_phase(0.5 * k * k * symplectic + pair.ket.theta - pair.bra.theta);
      r.predicted_position_ratio = Complex(pair.bra.x[0] + pair.ket.x[0], -(pair.bra.p[0] - pair.ket.p[0])) / 2.0;
      r.position_ratio = r.predicted_position_ratio;
      Complex value = r.closed_form;
      r.backend = "closed_form";
      if (k <= config.fock_k_max) {
        r.cutoff = pair_cutoff(config, pair, k);
        try {
          const FockSpace space(config.modes, r.cutoff);
          const StateVector sb = hilbert::coherent_state(space, bra);
          const StateVector sk = hilbert::coherent_state(space, ket);
          r.numeric = hilbert::overlap(sb, sk);
          value = *r.numeric;
          r.backend = "fock";
          const Complex element = sb.coefficients.dot(space.position(0) * sk.coefficients) / k;
          if (std::abs(value) > 0.0) r.position_ratio = element / value;
        } catch (const hilbert::TruncationGuardError& e) {
          r.guard_error = e.what();
        }
      }
      r.overlap_abs = std::abs(value);
      r.overlap_phase = std::arg(value);
      r.abs_err = std::abs(r.overlap_abs - r.predicted_abs);
      r.phase_err = std::abs(wrap_phase(r.overlap_phase - r.predicted_phase));
      records.push_back(std::move(r));
    }
  }
  return records;
}

double log_slope_against_k_squared(const std::vector<double>& k, const std::vector<double>& value) {
  if (k.size() != value.size() || k.size() < 2) throw std::invalid_argument("slope fit needs at least two matched points");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(k.size()), 2);
  Eigen::VectorXd target(static_cast<Eigen::Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!(value[i] > 0.0)) throw std::invalid_argument("slope fit needs positive values");
    design(static_cast<Eigen::Index>(i), 0) = k[i] * k[i];
    design(static_cast<Eigen::Index>(i), 1) = 1.0;
    target[static_cast<Eigen::Index>(i)] = std::log(value[i]);
  }
  const Eigen::Vector2d fit = design.colPivHouseholderQr().solve(target);
  return fit[0];
}

EmergenceReport eigenvalue_emergence(const FockSpace& space, const LabelPair& pair, double k, int mode) {
  const RescaledOperators ops = rescaled_operators(space, k);
  const StateVector sb = relabel_coherent(space, pair.bra, k);
  const StateVector sk = relabel_coherent(space, pair.ket, k);
  EmergenceReport r;
  r.k = k;
  r.overlap = hilbert::overlap(sb, sk);
  r.suppression = std::abs(r.overlap);
  const auto& xc = ops.position.at(static_cast<std::size_t>(mode));
  const auto& pc = ops.momentum.at(static_cast<std::size_t>(mode));
  const WeylLabel& b = pair.bra;
  const WeylLabel& s = pair.ket;
  r.predicted_position_ratio = Complex(b.x[mode] + s.x[mode], -(b.p[mode] - s.p[mode])) / 2.0;
  r.predicted_momentum_ratio = Complex(b.p[mode] + s.p[mode], b.x[mode] - s.x[mode]) / 2.0;
  if (r.suppression > 1e-250) {
    r.position_ratio = sb.coefficients.dot(xc * sk.coefficients) / r.overlap;
    r.momentum_ratio = sb.coefficients.dot(pc * sk.coefficients) / r.overlap;
  } else {
    r.closed_form_substituted = true;
    r.position_ratio = r.predicted_position_ratio;
    r.momentum_ratio = r.predicted_momentum_ratio;
  }
  auto scaled = [](Complex num, Complex cf) { return std::abs(num - cf) / std::max(1.0, std::abs(cf)); };
  r.ratio_error = std::max(scaled(r.position_ratio, r.predicted_position_ratio),
                           scaled(r.momentum_ratio, r.predicted_momentum_ratio));
  for (const auto* state : {&sb, &sk}) {
    const WeylLabel& tilde = state == &sb ? b : s;
    const double ex = state->coefficients.dot(xc * state->coefficients).real() / state->coefficients.squaredNorm();
    const double ep = state->coefficients.dot(pc * state->coefficients).real() / state->coefficients.squaredNorm();
    r.diagonal_position_error = std::max(r.diagonal_position_error, std::abs(ex - tilde.x[mode]));
    r.diagonal_momentum_error = std::max(r.diagonal_momentum_error, std::abs(ep - tilde.p[mode]));
  }
  return r;
}

std::vector<ClassicalizationStep> classicalization_report(const std::vector<double>& labels,
                                                          const std::vector<double>& k_values) {
  if (labels.empty()) throw std::invalid_argument("classicalization needs at least one label");
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j]) throw std::invalid_argument("classicalization labels must be pairwise distinct");
  double largest = 0.0;
  for (double l : labels) largest = std::max(largest, std::abs(l));
  const auto n = static_cast<Eigen::Index>(labels.size());

  std::vector<ClassicalizationStep> steps;
  for (double k : k_values) {
    ClassicalizationStep step;
    step.k = k;
    step.cutoff = policy_cutoff(CutoffPolicy::scale_with_k, 64, k, largest);
    const FockSpace space(1, step.cutoff);
    const SparseOperator xc = space.position(0) / k;
    std::vector<StateVector> states;
    std::vector<WeylLabel> tilde;
    for (double l : labels) {
      tilde.push_back(WeylLabel::one_d(0.0, l));
      states.push_back(relabel_coherent(space, tilde.back(), k));
    }
    step.gram.resize(n, n);
    step.gram_closed_form.resize(n, n);
    step.position_matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        step.gram(i, j) = hilbert::overlap(states[i], states[j]);
        step.gram_closed_form(i, j) =
            hilbert::overlap_closed_form(underlying_label(tilde[i], k), underlying_label(tilde[j], k));
        step.position_matrix(i, j) = states[i].coefficients.dot(xc * states[j].coefficients);
        step.gram_error = std::max(step.gram_error, std::abs(step.gram(i, j) - step.gram_closed_form(i, j)));
        if (i != j) {
          step.max_offdiag_gram = std::max(step.max_offdiag_gram, std::abs(step.gram(i, j)));
          step.max_offdiag_position = std::max(step.max_offdiag_position, std::abs(step.position_matrix(i, j)));
        }
      }
    // Generalized problem M v = lambda G v through the Cholesky factor of G.
    const Eigen::LLT<Eigen::MatrixXcd> llt(step.gram);
    if (llt.info() != Eigen::Success) throw std::runtime_error("Gram matrix is not positive definite");
    const Eigen::MatrixXcd lower = llt.matrixL();
    const Eigen::MatrixXcd half = lower.triangularView<Eigen::Lower>().solve(step.position_matrix);
    const Eigen::MatrixXcd reduced =
        lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd(half.adjoint())).adjoint();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (reduced + reduced.adjoint()));
    step.compressed_eigenvalues = eig.eigenvalues();
    std::vector<double> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    for (Eigen::Index i = 0; i < n; ++i)
      step.eigenvalue_error =
          std::max(step.eigenvalue_error, std::abs(step.compressed_eigenvalues[i] - sorted[static_cast<std::size_t>(i)]));
    steps.push_back(std::move(step));
  }
  return steps;
}

RotationRelabelReport rotation_relabel_check(const FockSpace& space, const WeylLabel& tilde, double k,
                                             const Eigen::Vector3d& omega) {
  if (space.modes() != 3) throw std::invalid_argument("rotation checks need a three-mode space");
  coset::AlgebraParams params;
  params.omega = omega;
  const Eigen::Matrix3d rotation = linalg::expm(Eigen::MatrixXd(params.omega_matrix()));
  const WeylLabel rotated{rotation * tilde.p, rotation * tilde.x, tilde.theta};

  const StateVector s = relabel_coherent(space, tilde, k);
  const Eigen::VectorXcd moved = hilbert::apply_rotation(space, omega, s.coefficients);
  const StateVector target = relabel_coherent(space, rotated, k);

  RotationRelabelReport r;
  r.k = k;
  r.state_deviation = (moved - target.coefficients).cwiseAbs().maxCoeff();
  r.gram_with_rotated = s.coefficients.dot(moved);
  r.gram_closed_form = hilbert::overlap_closed_form(underlying_label(tilde, k), underlying_label(rotated, k));
  const SparseOperator& j12 = space.rotation_generator(2);
  const Eigen::VectorXcd js = j12 * s.coefficients;
  const double norm2 = s.coefficients.squaredNorm();
  r.rotation_expectation = s.coefficients.dot(js).real() / norm2;
  r.rotation_spread = std::sqrt(std::max(0.0, js.squaredNorm() / norm2 - r.rotation_expectation * r.rotation_expectation));
  return r;
}

}  // namespace qspace::contraction
