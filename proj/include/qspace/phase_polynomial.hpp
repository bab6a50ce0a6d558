#pragma once

// Exact polynomials in phase-space variables x_i, p_i and a formal hbar,
// with Gaussian-rational coefficients.

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <complex>
#include <compare>
#include <map>
#include <optional>
#include <string>

namespace qspace::star {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-1/10", "0.25", "1e-3", "2.5e2" exactly.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

struct QComplex {
  Rational re{0};
  Rational im{0};

  QComplex() = default;
  QComplex(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  QComplex(int r) : re(r) {}

  static QComplex i() { return {0, 1}; }

  bool is_zero() const { return re == 0 && im == 0; }
  QComplex conj() const { return {re, -im}; }
  std::complex<double> to_complex() const;

  QComplex& operator+=(const QComplex& o);
  QComplex& operator-=(const QComplex& o);
  QComplex& operator*=(const QComplex& o);
  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
  QComplex operator/(const QComplex& o) const;
};

std::string to_string(const QComplex& c);

/// x^x p^p hbar^hbar. Unused axes stay zero.
struct Monomial {
  std::array<int, 3> x{0, 0, 0};
  std::array<int, 3> p{0, 0, 0};
  int hbar = 0;

  int degree() const;  ///< phase-space degree, hbar excluded
  Monomial operator*(const Monomial& o) const;
  bool operator==(const Monomial&) const = default;
};

/// Term order: hbar power ascending, then degree descending, then exponents
/// (x1 x2 x3 p1 p2 p3) descending.
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class PhasePolynomial {
 public:
  using Terms = std::map<Monomial, QComplex, MonomialOrder>;

  explicit PhasePolynomial(int dimension = 1);

  static PhasePolynomial constant(int dimension, const QComplex& c);
  /// Coordinate x_index or p_index (index 0-based).
  static PhasePolynomial position(int dimension, int index = 0);
  static PhasePolynomial momentum(int dimension, int index = 0);
  static PhasePolynomial hbar(int dimension);
  static PhasePolynomial monomial(int dimension, const Monomial& m, const QComplex& c = QComplex(1));

  int dimension() const { return dimension_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;      ///< -1 for the zero polynomial
  int max_hbar() const;    ///< -1 for the zero polynomial
  int min_hbar() const;
  bool has_real_coefficients() const;
  QComplex coefficient(const Monomial& m) const;

  void add_term(const Monomial& m, const QComplex& c);

  PhasePolynomial& operator+=(const PhasePolynomial& o);
  PhasePolynomial& operator-=(const PhasePolynomial& o);
  friend PhasePolynomial operator+(PhasePolynomial a, const PhasePolynomial& b) { return a += b; }
  friend PhasePolynomial operator-(PhasePolynomial a, const PhasePolynomial& b) { return a -= b; }
  friend PhasePolynomial operator*(const PhasePolynomial& a, const PhasePolynomial& b);  ///< pointwise
  PhasePolynomial scaled(const QComplex& c) const;
  PhasePolynomial operator-() const { return scaled(QComplex(-1)); }
  bool operator==(const PhasePolynomial& o) const { return dimension_ == o.dimension_ && terms_ == o.terms_; }

  /// d/dx_index or d/dp_index.
  PhasePolynomial d_position(int index) const;
  PhasePolynomial d_momentum(int index) const;

  /// Multiplies every term by hbar^shift (shift may be negative if all powers allow it).
  PhasePolynomial shift_hbar(int shift) const;
  /// Substitutes a numeric hbar, leaving hbar-free terms.
  PhasePolynomial substitute_hbar(const Rational& hbar) const;
  /// Terms of phase-space degree <= bound; `dropped` reports whether anything was removed.
  PhasePolynomial truncated(int bound, bool* dropped = nullptr) const;

  /// Euclidean norm of the coefficient vector after substituting `hbar`.
  double coefficient_norm(double hbar) const;

  std::string to_string() const;

 private:
  void require_same_dimension(const PhasePolynomial& o) const;

  int dimension_;
  Terms terms_;
};

/// Parses sums of products over x, p (dimension 1) or x1..x3, p1..p3,
/// hbar, i, rational or decimal numbers, ^ with non-negative integer
/// exponents, *, / by constants, parentheses and unary minus. Juxtaposition
/// multiplies. Without `dimension`, 3 is chosen iff an indexed variable other
/// than x1/p1 appears.
PhasePolynomial parse_polynomial(const std::string& text, std::optional<int> dimension = std::nullopt);

}  // namespace qspace::star
