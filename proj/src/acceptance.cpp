#include "qspace/acceptance.hpp"

#include "qspace/contraction_lab.hpp"
#include "qspace/coset_rep.hpp"
#include "qspace/hilbert.hpp"
#include "qspace/lie_core.hpp"
#include "qspace/star_product.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <random>

namespace qspace::acceptance {

using report::make_check;

bool CriterionResult::checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

using hilbert::Complex;
using hilbert::FockSpace;

std::vector<double> label_grid_1d() { return {-3.0, -1.5, 0.0, 1.5, 3.0}; }

WeylLabel random_label(std::mt19937_64& rng, int modes, double bound, double theta_bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  std::uniform_real_distribution<double> t(-theta_bound, theta_bound);
  WeylLabel w;
  for (int m = 0; m < modes; ++m) {
    w.p[m] = u(rng);
    w.x[m] = u(rng);
  }
  w.theta = t(rng);
  return w;
}

star::PhasePolynomial random_polynomial(std::mt19937_64& rng, int max_degree, int max_terms) {
  std::uniform_int_distribution<int> terms(1, max_terms);
  std::uniform_int_distribution<int> exponent(0, max_degree);
  std::uniform_int_distribution<int> numerator(-3, 3);
  std::uniform_int_distribution<int> denominator(1, 3);
  std::uniform_int_distribution<int> coin(0, 3);
  star::PhasePolynomial f(1);
  const int n = terms(rng);
  for (int t = 0; t < n; ++t) {
    star::Monomial m;
    m.x[0] = exponent(rng);
    std::uniform_int_distribution<int> rest(0, max_degree - m.x[0]);
    m.p[0] = rest(rng);
    star::Rational re(numerator(rng), denominator(rng));
    star::Rational im = coin(rng) == 0 ? star::Rational(numerator(rng), denominator(rng)) : star::Rational(0);
    f.add_term(m, star::QComplex(re, im));
  }
  if (f.is_zero()) f = star::PhasePolynomial::position(1);
  return f;
}

double relative(Complex numeric, Complex closed) { return std::abs(numeric - closed) / std::abs(closed); }

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

// 1
CriterionResult algebra_axioms(const SuiteOptions&) {
  CriterionResult r;
  r.id = 1;
  r.title = "algebra axioms";
  r.time_limit = 1.0;
  const std::vector<double> eps{0.0, 1.0 / 64, 1.0 / 16, 0.25, 1.0};
  for (auto which : {lie::StandardAlgebra::HR3, lie::StandardAlgebra::HR3_with_H}) {
    const auto table = lie::build_standard_algebra(which);
    const std::string name(lie::to_string(which));
    const auto contracted = lie::standard_contraction(table).symbolic();
    const auto v = lie::verify_algebra(contracted, eps);
    r.checks.push_back(make_check(name + ".antisymmetry", "algebra-brackets", v.antisymmetry_max, 0.0, 0.0));
    r.checks.push_back(make_check(name + ".jacobi", "algebra-brackets", v.jacobi_max, 0.0, 1e-12));
    const auto base = lie::verify_algebra(table, {1.0});
    r.checks.push_back(make_check(name + ".jacobi_unscaled", "algebra-brackets", base.jacobi_max, 0.0, 1e-12));
    r.details[name] = lie::to_json(v);
  }
  return r;
}

// 2
CriterionResult contraction_limit(const SuiteOptions&) {
  CriterionResult r;
  r.id = 2;
  r.title = "contraction limit";
  const auto base = lie::build_standard_algebra(lie::StandardAlgebra::HR3);
  const auto family = lie::standard_contraction(base);
  const auto limit = lie::limit_algebra(family);

  double xp = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      for (const auto& t : limit.entry(limit.index_of("X" + std::to_string(i) + "^c"),
                                       limit.index_of("P" + std::to_string(j) + "^c")))
        xp = std::max(xp, std::abs(t.coefficient));
  r.checks.push_back(make_check("limit.position_momentum_bracket", "contraction-limit", xp, 0.0, 0.0));

  const auto fl = limit.dense_at(0.0);
  const auto fb = base.dense_at(0.0);
  double rotation_change = 0.0;
  for (const char* name : {"J23", "J31", "J12"}) {
    const auto a = limit.index_of(name);
    rotation_change = std::max(rotation_change, (fl[a] - fb[a]).cwiseAbs().maxCoeff());
  }
  r.checks.push_back(make_check("limit.rotation_brackets_unchanged", "contraction-limit", rotation_change, 0.0, 0.0));

  const auto central = limit.index_of("I");
  double central_terms = 0.0;
  for (std::size_t a = 0; a < limit.dimension(); ++a)
    for (std::size_t b = 0; b < limit.dimension(); ++b)
      for (const auto& t : limit.entry(a, b))
        if (t.generator == central) central_terms += 1.0;
  r.checks.push_back(make_check("limit.central_absent", "contraction-limit", central_terms, 0.0, 0.0));

  r.checks.push_back(make_check("limit.jacobi_symbolic", "contraction-limit", lie::symbolic_jacobi_max(limit), 0.0, 0.0));
  r.checks.push_back(
      make_check("limit.jacobi_numeric", "contraction-limit", lie::verify_algebra(limit, {0.0}).jacobi_max, 0.0, 0.0));

  const auto at10 = lie::apply_contraction(family, 10.0);
  double coupling = 0.0;
  for (const auto& t : at10.entry(at10.index_of("X1^c"), at10.index_of("P1^c")))
    if (t.generator == at10.index_of("I")) coupling = t.coefficient;
  r.checks.push_back(make_check("k10.position_momentum_coupling", "contraction-limit", coupling, 0.01, 1e-15));
  r.details["limit"] = lie::to_json(limit);
  return r;
}

// 3
CriterionResult group_law(const SuiteOptions& options) {
  CriterionResult r;
  r.id = 3;
  r.title = "group law";
  r.time_limit = 5.0;
  std::mt19937_64 rng(options.seed);
  double worst_phase = 0.0, worst_config = 0.0, worst_label = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const WeylLabel a = random_label(rng, 3, 2.0, std::numbers::pi);
    const WeylLabel b = random_label(rng, 3, 2.0, std::numbers::pi);
    for (auto kind : {coset::CosetKind::phase, coset::CosetKind::config}) {
      const auto c = coset::compose(coset::group_element(kind, a), coset::group_element(kind, b));
      double& worst = kind == coset::CosetKind::phase ? worst_phase : worst_config;
      worst = std::max(worst, c.max_abs_diff);
      if (c.product_label && c.formula_label)
        worst_label = std::max(worst_label, max_abs_diff(*c.product_label, *c.formula_label));
      else
        worst_label = std::numeric_limits<double>::infinity();
    }
  }
  r.checks.push_back(make_check("phase_matrix_product_vs_law", "weyl-group-law", worst_phase, 0.0, 1e-10));
  r.checks.push_back(make_check("config_matrix_product_vs_law", "weyl-group-law", worst_config, 0.0, 1e-10));
  r.checks.push_back(make_check("product_label_vs_law", "weyl-group-law", worst_label, 0.0, 1e-10));
  r.details["samples"] = 1000;
  return r;
}

// 4
CriterionResult overlap_formula(const SuiteOptions& options) {
  CriterionResult r;
  r.id = 4;
  r.title = "overlap formula";
  const FockSpace one(1, 64);
  const auto grid = label_grid_1d();
  std::vector<hilbert::StateVector> states;
  std::vector<WeylLabel> labels;
  for (double p : grid)
    for (double x : grid) {
      labels.push_back(WeylLabel::one_d(p, x));
      states.push_back(hilbert::coherent_state(one, labels.back()));
    }
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j)
      worst = std::max(worst, relative(hilbert::overlap(states[i], states[j]),
                                       hilbert::overlap_closed_form(labels[i], labels[j])));
  r.checks.push_back(make_check("1d.cutoff64.max_relative_error", "coherent-overlap", worst, 0.0, 1e-8));

  const FockSpace three(3, 16);
  std::mt19937_64 rng(options.seed + 4);
  double worst3 = 0.0;
  for (int s = 0; s < 12; ++s) {
    const WeylLabel a = random_label(rng, 3, 1.5, std::numbers::pi);
    const WeylLabel b = random_label(rng, 3, 1.5, std::numbers::pi);
    const auto sa = hilbert::coherent_state(three, a);
    const auto sb = hilbert::coherent_state(three, b);
    worst3 = std::max(worst3, relative(hilbert::overlap(sa, sb), hilbert::overlap_closed_form(a, b)));
  }
  r.checks.push_back(make_check("3d.cutoff16.max_relative_error", "coherent-overlap", worst3, 0.0, 1e-6));

  const auto spot = hilbert::overlap(hilbert::coherent_state(one, WeylLabel::one_d(0, 0)),
                                     hilbert::coherent_state(one, WeylLabel::one_d(0, 2)));
  r.checks.push_back(make_check("spot.real", "coherent-overlap", spot.real(), std::exp(-1.0), 1e-10));
  r.checks.push_back(make_check("spot.imag", "coherent-overlap", spot.imag(), 0.0, 1e-10));
  r.details["grid_pairs"] = states.size() * states.size();
  return r;
}

// 5
CriterionResult matrix_elements(const SuiteOptions&) {
  CriterionResult r;
  r.id = 5;
  r.title = "matrix elements";
  const FockSpace one(1, 64);
  const auto grid = label_grid_1d();
  std::vector<hilbert::StateVector> states;
  for (double p : grid)
    for (double x : grid) states.push_back(hilbert::coherent_state(one, WeylLabel::one_d(p, x)));
  double worst = 0.0, diag_x = 0.0, diag_p = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < states.size(); ++j)
      for (auto kind : {hilbert::ObservableKind::position, hilbert::ObservableKind::momentum}) {
        const auto me = hilbert::matrix_element(one, {kind, 0}, states[i], states[j]);
        worst = std::max(worst, *me.relative_error);
        if (i == j) {
          const double label = kind == hilbert::ObservableKind::position ? states[i].label->x[0] : states[i].label->p[0];
          double& slot = kind == hilbert::ObservableKind::position ? diag_x : diag_p;
          slot = std::max(slot, std::abs(me.numeric - Complex(label, 0.0)));
        }
      }
  r.checks.push_back(make_check("1d.max_relative_error", "coherent-matrix-elements", worst, 0.0, 1e-8));
  r.checks.push_back(make_check("diagonal.position", "coherent-matrix-elements", diag_x, 0.0, 1e-10));
  r.checks.push_back(make_check("diagonal.momentum", "coherent-matrix-elements", diag_p, 0.0, 1e-10));
  return r;
}

// 6
CriterionResult representation_consistency(const SuiteOptions& options) {
  CriterionResult r;
  r.id = 6;
  r.title = "BCH and representation consistency";
  std::mt19937_64 rng(options.seed + 6);
  double bch = 0.0, coherent = 0.0, law = 0.0;
  auto run = [&](const FockSpace& space, int modes, double bound, int samples) {
    const Eigen::VectorXcd vacuum = hilbert::fock_vacuum(space).coefficients;
    for (int s = 0; s < samples; ++s) {
      const WeylLabel w = random_label(rng, modes, bound, std::numbers::pi);
      const auto factored = hilbert::apply_weyl(space, w, hilbert::WeylForm::factored, vacuum);
      const auto single = hilbert::apply_weyl(space, w, hilbert::WeylForm::single_exponential, vacuum);
      bch = std::max(bch, (factored - single).cwiseAbs().maxCoeff());
      coherent = std::max(coherent, (single - hilbert::coherent_state(space, w).coefficients).cwiseAbs().maxCoeff());
      const WeylLabel a = random_label(rng, modes, 0.5 * bound, std::numbers::pi);
      const WeylLabel b = random_label(rng, modes, 0.5 * bound, std::numbers::pi);
      const auto two = hilbert::apply_weyl(space, a, hilbert::WeylForm::single_exponential,
                                           hilbert::apply_weyl(space, b, hilbert::WeylForm::single_exponential, vacuum));
      const auto one = hilbert::apply_weyl(space, compose_labels(a, b), hilbert::WeylForm::single_exponential, vacuum);
      law = std::max(law, (two - one).cwiseAbs().maxCoeff());
    }
  };
  run(FockSpace(1, 64), 1, 2.0, 20);
  run(FockSpace(3, 16), 3, 1.0, 4);
  r.checks.push_back(make_check("factored_vs_single_on_vacuum", "weyl-factorization", bch, 0.0, 1e-8));
  r.checks.push_back(make_check("single_on_vacuum_vs_coherent", "weyl-factorization", coherent, 0.0, 1e-8));
  r.checks.push_back(make_check("product_vs_composite_on_vacuum", "weyl-group-law", law, 0.0, 1e-8));
  return r;
}

// 7
CriterionResult operator_realization(const SuiteOptions&) {
  CriterionResult r;
  r.id = 7;
  r.title = "operator realization";
  const FockSpace space(3, 10);
  const auto report = hilbert::operator_commutator_check(space, lie::build_standard_algebra(lie::StandardAlgebra::HR3));
  r.checks.push_back(make_check("fock.max_bracket_deviation", "algebra-brackets", report.max_deviation, 0.0, 1e-10));
  r.checks.push_back(make_check("fock.brackets_checked", "plumbing", static_cast<double>(report.brackets.size()), 45.0, 0.0));
  r.checks.push_back(make_check("fock.hermiticity", "plumbing", space.diagnostics().hermiticity_max, 0.0, 1e-14));
  return r;
}

// 8
CriterionResult contraction_sweep(const SuiteOptions&) {
  CriterionResult r;
  r.id = 8;
  r.title = "contraction sweep";
  r.time_limit = 60.0;
  contraction::ContractionRunConfig config;
  config.pairs = {contraction::parse_label_pair("dx=1,dp=0", "dx1")};
  const auto records = contraction::overlap_decay_sweep(config);
  std::vector<double> ks, closed;
  for (const auto& rec : records) {
    const std::string k = short_number(rec.k);
    r.checks.push_back(make_check("closed_form.k" + k, "contraction-overlap-decay", std::abs(rec.closed_form),
                                  std::exp(-rec.k * rec.k / 4.0), 1e-12));
    if (rec.k <= 4.0) {
      const double numeric = rec.numeric ? std::abs(*rec.numeric) : std::numeric_limits<double>::quiet_NaN();
      r.checks.push_back(make_check("fock.k" + k, "contraction-overlap-decay", numeric, rec.predicted_abs, 1e-4));
    }
    ks.push_back(rec.k);
    closed.push_back(std::abs(rec.closed_form));
  }
  const double slope = contraction::log_slope_against_k_squared(ks, closed);
  r.checks.push_back(make_check("log_slope", "contraction-overlap-decay", slope, -0.25, 0.0025));
  return r;
}

// 9
CriterionResult eigenvalue_emergence(const SuiteOptions&) {
  CriterionResult r;
  r.id = 9;
  r.title = "eigenvalue emergence";
  const std::vector<contraction::LabelPair> pairs{contraction::parse_label_pair("dx=1,dp=0", "dx1"),
                                                  contraction::parse_label_pair("x=-0.5,p=0.25,dx=1,dp=0.5", "mixed")};
  double ratio = 0.0, diag = 0.0;
  for (const auto& pair : pairs)
    for (double k : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0}) {
      const int cutoff = contraction::policy_cutoff(contraction::CutoffPolicy::scale_with_k, 64, k,
                                                    contraction::max_label(pair));
      const FockSpace space(1, cutoff);
      const auto e = contraction::eigenvalue_emergence(space, pair, k);
      if (k <= 4.0) ratio = std::max(ratio, e.ratio_error);
      diag = std::max({diag, e.diagonal_position_error, e.diagonal_momentum_error});
    }
  r.checks.push_back(make_check("ratio_vs_closed_form", "rescaled-matrix-elements", ratio, 0.0, 1e-8));
  r.checks.push_back(make_check("diagonal_expectations", "rescaled-matrix-elements", diag, 0.0, 1e-10));

  const auto steps = contraction::classicalization_report({-1.5, -0.5, 0.5, 1.5}, {1.0, 6.0});
  r.checks.push_back(make_check("gram.k1.max_offdiag", "gram-classicalization", steps[0].max_offdiag_gram,
                                std::exp(-0.25), 1e-10));
  r.checks.push_back(make_check("gram.k6.max_offdiag_relative", "gram-classicalization",
                                steps[1].max_offdiag_gram / std::exp(-9.0), 1.0, 1e-6));
  r.details["gram_k6_max_offdiag"] = steps[1].max_offdiag_gram;
  r.details["compressed_eigenvalue_error_k6"] = steps[1].eigenvalue_error;
  return r;
}

// 10
CriterionResult star_algebra(const SuiteOptions& options) {
  CriterionResult r;
  r.id = 10;
  r.title = "star algebra";
  std::mt19937_64 rng(options.seed + 10);
  double associativity_failures = 0.0, jacobi_failures = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto f = random_polynomial(rng, 4, 3);
    const auto g = random_polynomial(rng, 4, 3);
    const auto h = random_polynomial(rng, 4, 3);
    if (!(star::star_series(star::star_series(f, g), h) == star::star_series(f, star::star_series(g, h))))
      associativity_failures += 1.0;
    const auto jac = star::moyal_bracket_series(f, star::moyal_bracket_series(g, h)) +
                     star::moyal_bracket_series(g, star::moyal_bracket_series(h, f)) +
                     star::moyal_bracket_series(h, star::moyal_bracket_series(f, g));
    if (!jac.is_zero()) jacobi_failures += 1.0;
  }
  r.checks.push_back(make_check("associativity_failures", "moyal-star-product", associativity_failures, 0.0, 0.0));
  r.checks.push_back(make_check("bracket_jacobi_failures", "moyal-star-product", jacobi_failures, 0.0, 0.0));

  const auto x = star::PhasePolynomial::position(1);
  const auto p = star::PhasePolynomial::momentum(1);
  const auto commutator = star::star_series(x, p) - star::star_series(p, x);
  const auto expected = star::PhasePolynomial::hbar(1).scaled(star::QComplex::i());
  r.checks.push_back(make_check("x_star_p_commutator_exact", "moyal-star-product", commutator == expected ? 1.0 : 0.0, 1.0, 0.0));

  const std::vector<star::Rational> hbars{star::Rational(1, 10), star::Rational(1, 100), star::Rational(1, 1000)};
  std::vector<std::pair<star::PhasePolynomial, star::PhasePolynomial>> pairs{
      {star::parse_polynomial("x^3"), star::parse_polynomial("p^3")}};
  while (pairs.size() < 11) {
    auto f = random_polynomial(rng, 4, 3);
    auto g = random_polynomial(rng, 4, 3);
    if (!(star::moyal_bracket_series(f, g) - star::poisson_bracket(f, g)).is_zero()) pairs.emplace_back(f, g);
  }
  // Report the slope farthest from 2; a missing slope poisons the check.
  double worst_slope = 2.0;
  bool missing = false;
  for (const auto& [f, g] : pairs) {
    const auto sweep = star::classical_limit_sweep(f, g, hbars);
    if (!sweep.bracket_slope) missing = true;
    else if (std::abs(*sweep.bracket_slope - 2.0) > std::abs(worst_slope - 2.0)) worst_slope = *sweep.bracket_slope;
  }
  if (missing) worst_slope = std::numeric_limits<double>::quiet_NaN();
  r.checks.push_back(make_check("bracket_deviation_log_log_slope", "moyal-bracket-limit", worst_slope, 2.0, 0.05));

  const auto flow = star::harmonic_evolution_check(star::StarContext{1, star::Rational(1, 10)},
                                                   {std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi});
  r.checks.push_back(make_check("harmonic.generators_equal", "moyal-harmonic-flow", flow.generators_equal ? 1.0 : 0.0, 1.0, 0.0));
  for (const auto& s : flow.samples) {
    const std::string t = short_number(s.t);
    r.checks.push_back(make_check("harmonic.moyal_vs_poisson.t" + t, "moyal-harmonic-flow", s.moyal_poisson_difference, 0.0, 0.0));
    r.checks.push_back(make_check("harmonic.rotation.t" + t, "moyal-harmonic-flow", s.analytic_error, 0.0, 1e-12));
  }
  return r;
}

// 11
CriterionResult projective_flow(const SuiteOptions&) {
  CriterionResult r;
  r.id = 11;
  r.title = "projective flow";
  const FockSpace space(1, 32);
  const Eigen::MatrixXcd h = hilbert::harmonic_hamiltonian(space);
  const auto initial = hilbert::coherent_state(space, WeylLabel::one_d(0.5, 1.0)).coefficients;
  const double t_final = 10.0;
  const auto flow = hilbert::projective_flow_check(h, initial, t_final, 1e-3);
  r.checks.push_back(make_check("trajectory_deviation", "projective-hamilton-flow", flow.max_trajectory_deviation, 0.0, 1e-6));
  r.checks.push_back(make_check("norm_drift", "projective-hamilton-flow", flow.norm_drift, 0.0, 1e-8));
  r.checks.push_back(make_check("step_halving", "projective-hamilton-flow", flow.step_halving_error, 0.0, 1e-6));

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * Complex(0.0, -t_final)).array().exp().matrix();
  const Eigen::VectorXcd exact = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * initial;
  r.checks.push_back(make_check("final_state_vs_spectral_propagator", "projective-hamilton-flow",
                                (flow.final_state - exact).cwiseAbs().maxCoeff(), 0.0, 1e-6));
  r.checks.push_back(make_check("hamilton_factor", "projective-hamilton-flow",
                                hilbert::calibrate_hamilton_factor(h, initial), hilbert::kHamiltonFactor, 1e-12));
  r.details["steps"] = flow.steps;
  r.details["energy_drift"] = flow.energy_drift;
  return r;
}

const std::vector<CriterionEntry>& criteria() {
  static const std::vector<CriterionEntry> list{
      {1, algebra_axioms},       {2, contraction_limit},         {3, group_law},
      {4, overlap_formula},      {5, matrix_elements},           {6, representation_consistency},
      {7, operator_realization}, {8, contraction_sweep},         {9, eigenvalue_emergence},
      {10, star_algebra},        {11, projective_flow}};
  return list;
}

CriterionResult run_timed(const CriterionEntry& entry, const SuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r = entry.run(options);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace qspace::acceptance
