#include "qspace/contraction_lab.hpp"

#include <doctest.h>

#include <cmath>

using namespace qspace;
using namespace qspace::contraction;

TEST_SUITE("contraction_lab") {

TEST_CASE("hbar and k") {
  CHECK(k_from_hbar(1.0) == 1.0);
  CHECK(k_from_hbar(0.01) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(k_from_hbar(0.25) == 2.0);
  CHECK(hbar_from_k(4.0) == 0.0625);
  CHECK_THROWS_AS(k_from_hbar(0.0), std::invalid_argument);
  CHECK_THROWS_AS(k_from_hbar(-1.0), std::invalid_argument);
}

TEST_CASE("rescaled observables") {
  const FockSpace s(1, 40);
  const auto one = rescaled_operators(s, 1.0);
  CHECK(Eigen::MatrixXcd(one.position[0] - s.position(0)).norm() == 0.0);
  CHECK(Eigen::MatrixXcd(one.momentum[0] - s.momentum(0)).norm() == 0.0);
  CHECK(rescaled_commutator_deviation(s, 10.0) < 1e-12);
  CHECK(rescaled_commutator_deviation(FockSpace(3, 6), 3.0) < 1e-12);

  const auto ops = rescaled_operators(s, 4.0);
  const auto st = hilbert::coherent_state(s, WeylLabel::one_d(0.8, 2.0));
  const double ex = st.coefficients.dot(ops.position[0] * st.coefficients).real();
  CHECK(ex == doctest::Approx(2.0 / 4.0).epsilon(1e-12));
}

TEST_CASE("relabeled coherent states") {
  const FockSpace s(1, 64);
  CHECK((relabel_coherent(s, WeylLabel{}, 5.0).coefficients - hilbert::fock_vacuum(s).coefficients).norm() == 0.0);
  const WeylLabel tilde = WeylLabel::one_d(0.0, 1.0);
  CHECK(underlying_label(tilde, 4.0).x[0] == 4.0);
  const auto st = relabel_coherent(s, tilde, 4.0);
  const double ex = st.coefficients.dot(rescaled_operators(s, 4.0).position[0] * st.coefficients).real();
  CHECK(ex == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(relabel_coherent(FockSpace(1, 16), tilde, 4.0), hilbert::TruncationGuardError);
}

TEST_CASE("cutoff policy and pair specs") {
  CHECK(policy_cutoff(CutoffPolicy::fixed, 48, 8.0, 1.0) == 48);
  CHECK(policy_cutoff(CutoffPolicy::scale_with_k, 64, 2.0, 1.0) == 64);
  CHECK(policy_cutoff(CutoffPolicy::scale_with_k, 64, 8.0, 1.0) == 256);
  CHECK(parse_cutoff_policy("scale-with-k") == CutoffPolicy::scale_with_k);
  CHECK(to_string(CutoffPolicy::fixed) == "fixed");
  CHECK_THROWS_AS(parse_cutoff_policy("adaptive"), std::invalid_argument);

  const auto pair = parse_label_pair("x=-0.5,p=0.25,dx=1,dp=0.5,theta=0.1", "mixed");
  CHECK(pair.id == "mixed");
  CHECK(pair.ket.x[0] == -0.5);
  CHECK(pair.ket.p[0] == 0.25);
  CHECK(pair.bra.x[0] == 0.5);
  CHECK(pair.bra.p[0] == 0.75);
  CHECK(pair.bra.theta == 0.1);
  CHECK(max_label(pair) == 0.75);
  CHECK_THROWS_AS(parse_label_pair("dz=1", "bad"), std::invalid_argument);
  CHECK_THROWS_AS(parse_label_pair("dx=one", "bad"), std::invalid_argument);
}

TEST_CASE("overlap decay sweep") {
  ContractionRunConfig config;
  config.pairs = {parse_label_pair("dx=1,dp=0", "dx1"), parse_label_pair("dx=0,dp=0", "same")};
  const auto records = overlap_decay_sweep(config);
  CHECK(records.size() == config.pairs.size() * config.k_values.size());
  for (const auto& r : records) {
    if (r.pair_id == "same") {
      CHECK(std::abs(r.closed_form - 1.0) < 1e-15);
      if (r.numeric) CHECK(std::abs(*r.numeric - 1.0) < 1e-12);
      continue;
    }
    CHECK(std::abs(std::abs(r.closed_form) - std::exp(-r.k * r.k / 4.0)) < 1e-12);
    CHECK(r.backend == (r.k <= 4.0 ? "fock" : "closed_form"));
    if (r.numeric) CHECK(r.abs_err < 1e-4);
    CHECK(!r.guard_error);
  }
  std::vector<double> ks, values;
  for (const auto& r : records)
    if (r.pair_id == "dx1") {
      ks.push_back(r.k);
      values.push_back(r.overlap_abs);
    }
  CHECK(log_slope_against_k_squared(ks, values) == doctest::Approx(-0.25).epsilon(1e-6));

  // Independent oracle at a generous fixed cutoff.
  ContractionRunConfig wide;
  wide.k_values = {2.0, 4.0};
  wide.policy = CutoffPolicy::fixed;
  wide.fixed_cutoff = 256;
  wide.pairs = {parse_label_pair("dx=1,dp=0", "dx1")};
  const auto fixed = overlap_decay_sweep(wide);
  REQUIRE(fixed.size() == 2);
  REQUIRE(fixed[0].numeric);
  CHECK(std::abs(std::abs(*fixed[0].numeric) - std::exp(-1.0)) < 1e-10);
  REQUIRE(fixed[1].numeric);
  CHECK(std::abs(std::abs(*fixed[1].numeric) - std::exp(-4.0)) < 1e-10);

  ContractionRunConfig bad;
  bad.pairs = config.pairs;
  bad.k_values = {2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.k_values = {0.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("guard violations are recorded per row") {
  ContractionRunConfig config;
  config.k_values = {1.0, 4.0};
  config.policy = CutoffPolicy::fixed;
  config.fixed_cutoff = 16;
  config.pairs = {parse_label_pair("dx=1,dp=0", "dx1")};
  const auto records = overlap_decay_sweep(config);
  REQUIRE(records.size() == 2);
  CHECK(!records[0].guard_error);
  CHECK(records[1].guard_error);
  CHECK(!records[1].numeric);
}

TEST_CASE("eigenvalue emergence") {
  const auto unit = parse_label_pair("dx=1,dp=0", "dx1");
  const FockSpace s(1, 64);
  const auto e = eigenvalue_emergence(s, unit, 4.0);
  CHECK(e.suppression == doctest::Approx(std::exp(-4.0)).epsilon(1e-10));
  CHECK(e.ratio_error < 1e-8);
  CHECK(e.diagonal_position_error < 1e-10);

  const auto mixed = parse_label_pair("x=-0.5,p=0.25,dx=1,dp=0.5", "mixed");
  const auto m = eigenvalue_emergence(s, mixed, 2.0);
  const double xb = 0.5, x = -0.5, pb = 0.75, p = 0.25;
  CHECK(std::abs(m.momentum_ratio - Complex(pb + p, xb - x) / 2.0) < 1e-8);
  CHECK(std::abs(m.position_ratio - Complex(xb + x, -(pb - p)) / 2.0) < 1e-8);

  const auto diag = eigenvalue_emergence(s, parse_label_pair("x=0.7,p=-0.3,dx=0,dp=0", "diag"), 3.0);
  CHECK(std::abs(diag.position_ratio - 0.7) < 1e-10);
  CHECK(std::abs(diag.momentum_ratio + 0.3) < 1e-10);
}

TEST_CASE("Gram matrices become diagonal") {
  const auto steps = classicalization_report({-1.5, -0.5, 0.5, 1.5}, {1.0, 6.0});
  REQUIRE(steps.size() == 2);
  CHECK(steps[0].max_offdiag_gram == doctest::Approx(std::exp(-0.25)).epsilon(1e-10));
  CHECK(steps[1].max_offdiag_gram / std::exp(-9.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(steps[1].gram_error < 1e-10);
  CHECK(steps[1].eigenvalue_error < 1e-6);
  CHECK(steps[0].eigenvalue_error > 0.1);  // overlapping states at k = 1 blur the spectrum

  const auto single = classicalization_report({0.5}, {3.0});
  CHECK(single[0].gram.rows() == 1);
  CHECK(single[0].max_offdiag_gram == 0.0);
  CHECK_THROWS_AS(classicalization_report({1.0, 1.0}, {2.0}), std::invalid_argument);
}

TEST_CASE("rotating a relabeled state relabels it") {
  const FockSpace s(3, 12);
  const WeylLabel tilde{Eigen::Vector3d(0.2, -0.1, 0.3), Eigen::Vector3d(0.4, 0.1, -0.2), 0.0};
  const auto r = rotation_relabel_check(s, tilde, 2.0, Eigen::Vector3d(0.1, 0.5, -0.3));
  CHECK(r.state_deviation < 1e-8);
  CHECK(std::abs(r.gram_with_rotated - r.gram_closed_form) < 1e-8);
}

TEST_CASE("slope fit") {
  std::vector<double> k{1, 2, 3}, v;
  for (double kk : k) v.push_back(3.0 * std::exp(-0.7 * kk * kk));
  CHECK(log_slope_against_k_squared(k, v) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK_THROWS_AS(log_slope_against_k_squared({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(log_slope_against_k_squared({1.0, 2.0}, {1.0, 0.0}), std::invalid_argument);
}

}  // TEST_SUITE
