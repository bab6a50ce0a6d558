#include "qspace/phase_polynomial.hpp"
#include "qspace/star_product.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace qspace::star;

namespace {

PhasePolynomial P(const std::string& text) { return parse_polynomial(text); }
const PhasePolynomial hbar1 = PhasePolynomial::hbar(1);

Rational factorial(int n) {
  Rational r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

PhasePolynomial derivative(PhasePolynomial f, int dx, int dp) {
  for (int i = 0; i < dx; ++i) f = f.d_position(0);
  for (int i = 0; i < dp; ++i) f = f.d_momentum(0);
  return f;
}

// One-dimensional star product from repeated derivatives and the binomial
// expansion of the bidifferential exponent; shares no code with star_series.
PhasePolynomial derivative_series_star(const PhasePolynomial& f, const PhasePolynomial& g) {
  PhasePolynomial sum(1);
  PhasePolynomial hbar_power = PhasePolynomial::constant(1, QComplex(1));
  QComplex half_i(0, Rational(1, 2)), weight(1);
  const int order = std::max(f.degree(), g.degree());
  for (int n = 0; n <= order; ++n) {
    for (int k = 0; k <= n; ++k) {
      const Rational binom = factorial(n) / (factorial(k) * factorial(n - k));
      const QComplex c = weight * QComplex(binom / factorial(n) * (k % 2 ? -1 : 1));
      sum += (derivative(f, n - k, k) * derivative(g, k, n - k) * hbar_power).scaled(c);
    }
    weight *= half_i;
    hbar_power = hbar_power * hbar1;
  }
  return sum;
}

PhasePolynomial random_polynomial(std::mt19937_64& rng, int dimension, int max_degree, int terms) {
  std::uniform_int_distribution<int> coeff(-5, 5), den(1, 4), exponent(0, max_degree), axis(0, dimension - 1);
  PhasePolynomial f(dimension);
  for (int t = 0; t < terms; ++t) {
    Monomial m;
    int budget = max_degree;
    for (int step = 0; step < 2 && budget > 0; ++step) {
      const int e = std::min(budget, exponent(rng));
      (step == 0 ? m.x : m.p)[static_cast<std::size_t>(axis(rng))] += e;
      budget -= e;
    }
    f.add_term(m, QComplex(Rational(coeff(rng), den(rng)), Rational(coeff(rng), den(rng))));
  }
  return f;
}

}  // namespace

TEST_SUITE("star_product") {

TEST_CASE("exact rationals") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1/10") == Rational(-1, 10));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("2.5e2") == Rational(250));
  CHECK(to_string(Rational(-3, 200)) == "-3/200");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK(to_string(QComplex(Rational(1, 2), Rational(-3))) == "(1/2 - 3*i)");
  CHECK((QComplex(1, 2) / QComplex(1, 2)) == QComplex(1));
}

TEST_CASE("parsing and printing") {
  CHECK(P("x^3").degree() == 3);
  CHECK(P("3 x p - x*p*2") == P("x p"));
  CHECK(P("(x + p)^2") == P("x^2 + 2 x p + p^2"));
  CHECK(P("x/2") == P("1/2 x"));
  CHECK(P("i hbar").max_hbar() == 1);
  CHECK(P("x2 p3").dimension() == 3);
  CHECK(P("x1 p1").dimension() == 1);
  CHECK(P("9*x^2*p^2 - 3/2*hbar^2").to_string() == "9*x^2*p^2 - 3/2*hbar^2");
  CHECK_THROWS_AS(P("x^"), std::invalid_argument);
  CHECK_THROWS_AS(P("x/p"), std::invalid_argument);
  CHECK_THROWS_AS(P("x^-1"), std::invalid_argument);
  CHECK_THROWS_AS(P("q"), std::invalid_argument);

  std::mt19937_64 rng(1);
  for (int s = 0; s < 50; ++s) {
    const int dim = s % 2 ? 3 : 1;
    const auto f = random_polynomial(rng, dim, 4, 3) * (s % 3 ? PhasePolynomial::hbar(dim) : PhasePolynomial::constant(dim, 1));
    CHECK(parse_polynomial(f.to_string(), dim) == f);
  }
}

TEST_CASE("star product basics") {
  CHECK(star_series(P("x"), P("p")) == P("x p + i/2 hbar"));
  CHECK(star_series(P("x"), P("p")) - star_series(P("p"), P("x")) == P("i hbar"));
  CHECK(star_series(P("x^2 p - 3 p^4"), P("1")) == P("x^2 p - 3 p^4"));
  CHECK(star_series(P("1"), P("x^2 p - 3 p^4")) == P("x^2 p - 3 p^4"));

  const StarContext ctx{1, Rational(1, 10)};
  CHECK(star(ctx, P("x"), P("p")) == P("x p + i/20"));

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const auto xi = PhasePolynomial::position(3, i), pj = PhasePolynomial::momentum(3, j);
      const auto c = star_series(xi, pj) - star_series(pj, xi);
      CHECK(c == (i == j ? PhasePolynomial::hbar(3).scaled(QComplex::i()) : PhasePolynomial(3)));
    }
}

TEST_CASE("star product matches the derivative expansion") {
  std::mt19937_64 rng(13);
  for (int s = 0; s < 60; ++s) {
    const auto f = random_polynomial(rng, 1, 4, 3), g = random_polynomial(rng, 1, 4, 3);
    CHECK(star_series(f, g) == derivative_series_star(f, g));
  }
}

TEST_CASE("associativity and bracket Jacobi identity, exact") {
  std::mt19937_64 rng(29);
  for (int s = 0; s < 25; ++s) {
    const int dim = s % 5 == 4 ? 3 : 1;
    const auto f = random_polynomial(rng, dim, 3, 2), g = random_polynomial(rng, dim, 3, 2),
               h = random_polynomial(rng, dim, 3, 2);
    CHECK(star_series(star_series(f, g), h) == star_series(f, star_series(g, h)));
    const auto jacobi = moyal_bracket_series(f, moyal_bracket_series(g, h)) +
                        moyal_bracket_series(g, moyal_bracket_series(h, f)) +
                        moyal_bracket_series(h, moyal_bracket_series(f, g));
    CHECK(jacobi.is_zero());
  }
}

TEST_CASE("Moyal and Poisson brackets") {
  CHECK(moyal_bracket_series(P("x"), P("p")) == P("1"));
  CHECK(moyal_bracket_series(P("x^2"), P("p^2")) == P("4 x p"));
  const auto cubic = moyal_bracket_series(P("x^3"), P("p^3"));
  CHECK(cubic == P("9 x^2 p^2 - 3/2 hbar^2"));
  CHECK(cubic - poisson_bracket(P("x^3"), P("p^3")) == P("-3/2 hbar^2"));

  CHECK(poisson_bracket(P("x"), P("p")) == P("1"));
  CHECK(poisson_bracket(P("x^3"), P("p^3")) == P("9 x^2 p^2"));
  const auto f = P("x^3 p - 2 x p^2 + 7");
  CHECK(poisson_bracket(f, f).is_zero());
  CHECK(moyal_bracket_series(f, f).is_zero());

  const StarContext at{1, Rational(1, 10)};
  CHECK(moyal_bracket(at, P("x^3"), P("p^3")) == P("9 x^2 p^2 - 3/200"));
  CHECK_THROWS_AS(moyal_bracket(StarContext{1, Rational(0)}, P("x"), P("p")), std::domain_error);
}

TEST_CASE("classical limit sweep") {
  const std::vector<Rational> hbars{Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
  const auto quadratic = classical_limit_sweep(P("x^2 + x p"), P("p^2 - 3 x"), hbars);
  for (const auto& r : quadratic.records) CHECK(r.bracket_deviation == 0.0);
  CHECK(!quadratic.bracket_slope);

  const auto cubic = classical_limit_sweep(P("x^3"), P("p^3"), hbars);
  const double first = cubic.records[0].bracket_deviation / 1e-2;
  const double second = cubic.records[1].bracket_deviation / 1e-4;
  CHECK(first == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(second == doctest::Approx(first).epsilon(1e-12));
  REQUIRE(cubic.bracket_slope);
  CHECK(*cubic.bracket_slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cubic.correction_powers == std::vector<int>{2});

  const auto canonical = classical_limit_sweep(P("x"), P("p"), hbars);
  for (const auto& r : canonical.records) CHECK(r.product_deviation == doctest::Approx(r.hbar.convert_to<double>() / 2).epsilon(1e-15));

  CHECK_THROWS_AS(classical_limit_sweep(P("x"), P("p"), {Rational(1, 100), Rational(1, 10)}), std::invalid_argument);
  CHECK_THROWS_AS(classical_limit_sweep(P("x"), P("p"), {Rational(0)}), std::invalid_argument);
}

TEST_CASE("left and right star actions") {
  const StarContext ctx{1, Rational(1, 3)};
  CHECK(left_star_action(ctx, P("1"), 3) == DegreeBoundedOperator::identity(1, 3));
  CHECK(monomial_basis(1, 3).size() == 10);
  CHECK(monomial_basis(3, 2).size() == 28);

  const auto lx = left_star_action(ctx, P("x"), 5), lp = left_star_action(ctx, P("p"), 5);
  const QComplex i_hbar(0, Rational(1, 3));
  CHECK((lx * lp - lp * lx).is_scalar_on(3, i_hbar));
  CHECK(lx.truncated());

  // L_x - R_x = i hbar {x, .}_*.
  const auto rx = right_star_action(ctx, P("x"), 5);
  CHECK(lx - rx == moyal_action(ctx, P("x"), 5).scaled(i_hbar));
  const auto f = P("x^2 p - p^3");
  CHECK(left_star_action(ctx, f, 6) - right_star_action(ctx, f, 6) == moyal_action(ctx, f, 6).scaled(i_hbar));

  const auto g = P("x p^2 + 2");
  CHECK(left_star_action(ctx, f, 6).apply(g) == star(ctx, f, g).truncated(6));
  CHECK(poisson_action(P("x"), 3).apply(P("p^2")) == P("2 p"));
  CHECK_THROWS(left_star_action(StarContext{1, std::nullopt}, f, 3));
}

TEST_CASE("harmonic flow of observables") {
  const StarContext ctx{1, Rational(1, 7)};
  const auto r = harmonic_evolution_check(ctx, {0.0, std::numbers::pi / 4, std::numbers::pi / 2, std::numbers::pi}, 3);
  CHECK(r.generators_equal);
  CHECK(!r.truncated);
  REQUIRE(r.samples.size() == 4);
  CHECK(r.samples[0].analytic_error == 0.0);
  for (const auto& s : r.samples) {
    CHECK(s.moyal_poisson_difference == 0.0);
    CHECK(s.analytic_error < 1e-12);
  }

  // Quadratic generators: the two brackets agree term by term.
  const auto h = P("(p^2 + x^2)/2");
  CHECK(moyal_action(ctx, h, 4) == poisson_action(h, 4));
  CHECK(!(moyal_action(ctx, P("x^3"), 4) == poisson_action(P("x^3"), 4)));
}

}  // TEST_SUITE
