#include "qspace/coset_rep.hpp"
#include "qspace/hilbert.hpp"
#include "qspace/matrix_exp.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>
#include <random>

using namespace qspace;
using namespace qspace::hilbert;

namespace {

constexpr Complex I{0.0, 1.0};

Eigen::MatrixXcd dense(const SparseOperator& op) { return Eigen::MatrixXcd(op); }

/// Restriction of a dense matrix to the safe basis states.
double safe_max(const FockSpace& space, const Eigen::MatrixXcd& m) {
  double worst = 0.0;
  for (auto r : space.safe_indices())
    for (auto c : space.safe_indices()) worst = std::max(worst, std::abs(m(r, c)));
  return worst;
}

/// Coherent wavefunction integrated on a fine trapezoid grid, independent of
/// both the Fock backend and GridSpace.
Complex quadrature_overlap(const WeylLabel& bra, const WeylLabel& ket) {
  auto psi = [](const WeylLabel& w, double y) {
    const double p = w.p[0], x = w.x[0];
    return std::pow(std::numbers::pi, -0.25) * std::exp(I * (w.theta - p * x / 2 + p * y)) *
           std::exp(-(y - x) * (y - x) / 2);
  };
  const double h = 1e-3;
  Complex sum = 0.0;
  for (double y = -20.0; y <= 20.0; y += h) sum += std::conj(psi(bra, y)) * psi(ket, y);
  return sum * h;
}

WeylLabel random_1d(std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> d(-bound, bound);
  return WeylLabel::one_d(d(rng), d(rng), d(rng));
}

}  // namespace

TEST_SUITE("hilbert") {

TEST_CASE("ladder construction") {
  const FockSpace s = build_fock_space(1, 2);
  Eigen::Matrix3cd x = Eigen::Matrix3cd::Zero();
  x(0, 1) = x(1, 0) = 1.0 / std::sqrt(2.0);
  x(1, 2) = x(2, 1) = 1.0;  // sqrt(2)/sqrt(2)
  CHECK((dense(s.position(0)) - x).cwiseAbs().maxCoeff() < 1e-16);

  const FockSpace f = build_fock_space(1, 12);
  const auto vac = fock_vacuum(f).coefficients;
  CHECK(std::abs(vac.dot(f.position(0) * vac)) == 0.0);
  const Eigen::MatrixXcd xm = dense(f.position(0)), pm = dense(f.momentum(0));
  const Eigen::MatrixXcd c = xm * pm - pm * xm - I * Eigen::MatrixXcd::Identity(13, 13);
  CHECK(safe_max(f, c) < 1e-14);
  CHECK(std::abs(c(12, 12)) > 1.0);  // the top level is where truncation shows
  CHECK(f.diagnostics().hermiticity_max < 1e-15);
  CHECK(f.diagnostics().canonical_commutator_max < 1e-14);

  CHECK_THROWS_AS(FockSpace(2, 8), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace(1, 1), std::invalid_argument);
  const FockSpace three(3, 4);
  CHECK(three.dimension() == 125);
  CHECK(three.basis_index({1, 2, 3}) == 1 * 25 + 2 * 5 + 3);
  CHECK(three.occupation(three.basis_index({1, 2, 3}), 2) == 3);
}

TEST_CASE("coherent states") {
  const FockSpace s(1, 64);
  const auto vac = coherent_state(s, WeylLabel{});
  CHECK((vac.coefficients - fock_vacuum(s).coefficients).norm() == 0.0);

  const auto c = coherent_state(s, WeylLabel::one_d(0.0, 2.0));
  CHECK(std::abs(c.norm() - 1.0) <= c.truncation_tail + 1e-15);
  CHECK(matrix_element(s, {ObservableKind::position, 0}, c, c).numeric.real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(matrix_element(s, {ObservableKind::momentum, 0}, c, c).numeric) < 1e-12);

  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto st = coherent_state(s, random_1d(rng, 3.0));
    CHECK(std::abs(st.norm() - 1.0) <= st.truncation_tail + 1e-14);
  }

  SUBCASE("guard") {
    const FockSpace small(1, 8);
    try {
      coherent_state(small, WeylLabel::one_d(0.0, 3.0));
      FAIL("guard did not trigger");
    } catch (const TruncationGuardError& e) {
      CHECK(e.required_cutoff() == 18);
    }
    CHECK(required_cutoff(WeylLabel::one_d(0.0, 3.0)) == 18);
    CHECK(mean_occupation(WeylLabel::one_d(1.0, 1.0)) == 1.0);
    CHECK_THROWS_AS(coherent_state(small, WeylLabel{Eigen::Vector3d(0, 1, 0), Eigen::Vector3d::Zero(), 0.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("overlap closed form against numerics") {
  const FockSpace s(1, 64);
  const auto o = WeylLabel::one_d(0.0, 0.0), shifted_x = WeylLabel::one_d(0.0, 2.0), shifted_p = WeylLabel::one_d(2.0, 0.0);

  CHECK(std::abs(overlap_closed_form(shifted_x, shifted_x) - 1.0) < 1e-16);
  const Complex a = overlap(coherent_state(s, o), coherent_state(s, shifted_x));
  CHECK(std::abs(a - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(std::arg(a)) < 1e-12);
  const Complex b = overlap(coherent_state(s, shifted_p), coherent_state(s, o));
  CHECK(std::abs(std::abs(b) - std::exp(-1.0)) < 1e-10);
  CHECK(std::abs(std::arg(b)) < 1e-12);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 40; ++i) {
    const WeylLabel bra = random_1d(rng, 2.0), ket = random_1d(rng, 2.0);
    const Complex cf = overlap_closed_form(bra, ket);
    CHECK(std::abs(quadrature_overlap(bra, ket) - cf) < 1e-10);
    CHECK(std::abs(overlap(coherent_state(s, bra), coherent_state(s, ket)) - cf) < 1e-10);
  }

  const FockSpace three(3, 16);
  const WeylLabel bra{Eigen::Vector3d(0.5, -1.0, 0.2), Eigen::Vector3d(1.0, 0.3, -0.4), 0.1};
  const WeylLabel ket{Eigen::Vector3d(-0.3, 0.2, 0.9), Eigen::Vector3d(0.0, -1.2, 0.5), -0.6};
  const Complex cf = overlap_closed_form(bra, ket);
  CHECK(std::abs(overlap(coherent_state(three, bra), coherent_state(three, ket)) - cf) / std::abs(cf) < 1e-6);
}

TEST_CASE("matrix elements") {
  const FockSpace s(1, 64);
  const auto o = coherent_state(s, WeylLabel::one_d(0.0, 0.0));
  const auto two = coherent_state(s, WeylLabel::one_d(0.0, 2.0));
  const auto me = matrix_element(s, {ObservableKind::position, 0}, two, o);
  CHECK(std::abs(me.numeric - std::exp(-1.0)) < 1e-10);
  REQUIRE(me.closed_form);
  CHECK(std::abs(*me.closed_form - std::exp(-1.0)) < 1e-15);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 40; ++i) {
    const WeylLabel bra = random_1d(rng, 2.5), ket = random_1d(rng, 2.5);
    for (auto kind : {ObservableKind::position, ObservableKind::momentum}) {
      const auto m = matrix_element(s, {kind, 0}, coherent_state(s, bra), coherent_state(s, ket));
      CHECK(*m.relative_error < 1e-8);
    }
    // The closed forms factor as (label prefactor) x overlap.
    const Complex ov = overlap_closed_form(bra, ket);
    const Complex xf = 0.5 * Complex(bra.x[0] + ket.x[0], -(bra.p[0] - ket.p[0]));
    CHECK(std::abs(matrix_element_closed_form({ObservableKind::position, 0}, bra, ket) - xf * ov) < 1e-14);
  }
}

TEST_CASE("Weyl operators") {
  const FockSpace s(3, 16);
  const WeylLabel w{Eigen::Vector3d(0.3, -0.5, 0.2), Eigen::Vector3d(0.1, 0.4, -0.3), 0.7};
  const auto vac = fock_vacuum(s).coefficients;
  const auto target = coherent_state(s, w).coefficients;
  CHECK((apply_weyl(s, w, WeylForm::factored, vac) - target).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((apply_weyl(s, w, WeylForm::single_exponential, vac) - target).cwiseAbs().maxCoeff() < 1e-8);

  const WeylLabel w2{Eigen::Vector3d(-0.2, 0.1, 0.3), Eigen::Vector3d(0.2, -0.1, 0.25), -0.4};
  const auto twice = apply_weyl(s, w, WeylForm::single_exponential, apply_weyl(s, w2, WeylForm::single_exponential, vac));
  CHECK((twice - coherent_state(s, compose_labels(w, w2)).coefficients).cwiseAbs().maxCoeff() < 1e-8);

  const FockSpace one(1, 30);
  CHECK(weyl_unitary(one, WeylLabel{}, WeylForm::factored).isIdentity(1e-15));
  for (auto form : {WeylForm::factored, WeylForm::single_exponential}) {
    const auto u = weyl_unitary(one, WeylLabel::one_d(0.5, -0.7, 0.2), form);
    CHECK(safe_max(one, u * u.adjoint() - Eigen::MatrixXcd::Identity(31, 31)) < 1e-10);
  }
  // Dense expm oracle for the single exponential.
  const Eigen::MatrixXcd gen = I * (0.5 * dense(one.position(0)) + 0.7 * dense(one.momentum(0)) + 0.2 * Eigen::MatrixXcd::Identity(31, 31));
  CHECK((weyl_unitary(one, WeylLabel::one_d(0.5, -0.7, 0.2), WeylForm::single_exponential) - linalg::expm(gen))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("realized brackets") {
  const FockSpace s(3, 10);
  const auto table = lie::build_standard_algebra(lie::StandardAlgebra::HR3);
  const auto report = operator_commutator_check(s, table);
  CHECK(report.max_deviation < 1e-10);
  CHECK(report.brackets.size() == 45);

  const SparseOperator& j12 = s.rotation_generator(2);
  const SparseOperator& j23 = s.rotation_generator(0);
  const SparseOperator& j31 = s.rotation_generator(1);
  const SparseOperator& x3 = s.position(2);
  CHECK(safe_max(s, dense(SparseOperator(j12 * x3 - x3 * j12))) < 1e-12);
  // [J12, J23] = -i J31, the table's coefficient.
  CHECK(safe_max(s, dense(SparseOperator(j12 * j23 - j23 * j12 + I * j31))) < 1e-10);
  const SparseOperator& x1 = s.position(0);
  const SparseOperator& p1 = s.momentum(0);
  CHECK(safe_max(s, dense(SparseOperator(x1 * p1 - p1 * x1 - I * s.identity()))) < 1e-10);

  CHECK_THROWS_AS(FockSpace(1, 8).rotation_generator(0), std::invalid_argument);
}

TEST_CASE("rotations relabel coherent states") {
  const FockSpace s(3, 16);
  const WeylLabel w{Eigen::Vector3d(0.3, -0.5, 0.2), Eigen::Vector3d(0.1, 0.4, -0.3), 0.7};
  const Eigen::Vector3d omega(0.3, -0.2, 0.5);
  coset::AlgebraParams a;
  a.omega = omega;
  const Eigen::Matrix3d r = linalg::expm(Eigen::MatrixXd(a.omega_matrix()));
  const auto rotated = apply_rotation(s, omega, coherent_state(s, w).coefficients);
  CHECK((rotated - coherent_state(s, {r * w.p, r * w.x, w.theta}).coefficients).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("position grid") {
  const GridSpace g(4.0, 8);
  CHECK(g.spacing() == 1.0);
  CHECK(g.position(5) == 1.0);
  CHECK(std::abs(grid_position_action(g, 0.0, 5) - 1.0) == 0.0);
  CHECK(std::abs(grid_position_action(g, std::numbers::pi, 5) + 1.0) < 1e-15);
  CHECK_THROWS_AS(GridSpace(4.0, 7), std::invalid_argument);

  const GridSpace fine(12.0, 256);
  const auto s = grid_coherent_state(fine, 0.5, 1.0);
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  const auto moved = grid_translate(fine, s, 1.5);
  const auto expected = grid_coherent_state(fine, 0.5, 2.5);
  // e^{-i x0 P} |p, x> = e^{-i x0 p/2} |p, x + x0>.
  CHECK(std::abs(overlap(expected, moved) - std::exp(-I * 0.75 * 0.5)) < 1e-10);
  const auto kicked = apply_position_phase(fine, s, 0.75);
  CHECK(std::abs(std::abs(overlap(grid_coherent_state(fine, 1.25, 1.0), kicked)) - 1.0) < 1e-10);
  CHECK_THROWS_AS(grid_coherent_state(fine, 0.0, 7.0), std::invalid_argument);
}

TEST_CASE("Fock and grid backends agree") {
  const FockSpace f(1, 64);
  const GridSpace g(12.0, 256);
  const auto spot = cross_validate_backends(f, g, WeylLabel::one_d(0, 2), WeylLabel::one_d(0, 0));
  CHECK(std::abs(spot.fock - std::exp(-1.0)) < 1e-8);
  CHECK(std::abs(spot.grid - std::exp(-1.0)) < 1e-8);
  CHECK(spot.difference < 1e-8);
  const auto same = cross_validate_backends(f, g, WeylLabel::one_d(1, -1, 0.3), WeylLabel::one_d(1, -1, 0.3));
  CHECK(std::abs(same.fock - 1.0) < 1e-10);
  CHECK(std::abs(same.grid - 1.0) < 1e-10);

  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto cv = cross_validate_backends(f, g, random_1d(rng, 2.0), random_1d(rng, 2.0));
    worst = std::max(worst, cv.difference);
    CHECK(cv.difference <= cv.tolerance);
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("projective flow") {
  const FockSpace s(1, 32);
  const Eigen::MatrixXcd h = harmonic_hamiltonian(s);
  const auto c0 = coherent_state(s, WeylLabel::one_d(0.5, 1.0)).coefficients;
  const auto flow = projective_flow_check(h, c0, 10.0, 1e-3);
  CHECK(flow.max_trajectory_deviation < 1e-6);
  CHECK(flow.norm_drift < 1e-8);
  CHECK(flow.steps == 10000);
  CHECK(calibrate_hamilton_factor(h, c0) == doctest::Approx(kHamiltonFactor).epsilon(1e-12));

  // Identity generator: a global phase only.
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(33, 33);
  const auto phase = projective_flow_check(id, c0, 2.0, 1e-3);
  CHECK((phase.final_state - std::exp(-2.0 * I) * c0).cwiseAbs().maxCoeff() < 1e-10);

  // A generic Hermitian generator with complex entries exercises the antisymmetric part.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) m(i, j) = Complex(n(rng), n(rng));
  const Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(6);
  start[0] = 1.0;
  const auto generic = projective_flow_check(herm, start, 3.0, 1e-3);
  CHECK(generic.max_trajectory_deviation < 1e-6);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  const Eigen::VectorXcd exact = eig.eigenvectors() *
                                 (eig.eigenvalues().cast<Complex>() * Complex(0, -3.0)).array().exp().matrix().asDiagonal() *
                                 eig.eigenvectors().adjoint() * start;
  CHECK((generic.final_state - exact).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(calibrate_hamilton_factor(herm, exact) == doctest::Approx(kHamiltonFactor).epsilon(1e-12));

  // h(q, p) for a diagonal generator.
  const Eigen::VectorXd q = Eigen::VectorXd::LinSpaced(3, 0.1, 0.3), p = Eigen::VectorXd::LinSpaced(3, -0.2, 0.4);
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
  diag.diagonal() << 1.0, 2.0, 3.0;
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) expected += 0.5 * (i + 1) * (q[i] * q[i] + p[i] * p[i]);
  CHECK(hamilton_function(diag, q, p) == doctest::Approx(expected));

  Eigen::MatrixXcd bad = herm;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(projective_flow_check(bad, start, 1.0, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(projective_flow_check(herm, 2.0 * start, 1.0, 1e-2), std::invalid_argument);
}

}  // TEST_SUITE
