#pragma once

// Moyal star product on polynomial phase-space functions,
//   f * g = f exp[(i hbar/2) sum_i (<-d/dx_i ->d/dp_i - <-d/dp_i ->d/dx_i)] g,
// evaluated exactly. The series terminates on polynomials.

#include "qspace/phase_polynomial.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace qspace::star {

struct StarContext {
  int dimension = 1;
  /// Numeric hbar >= 0; nullopt keeps hbar as a formal variable.
  std::optional<Rational> hbar;
};

/// f * g with hbar symbolic.
PhasePolynomial star_series(const PhasePolynomial& f, const PhasePolynomial& g);
PhasePolynomial star(const StarContext& ctx, const PhasePolynomial& f, const PhasePolynomial& g);

/// (f*g - g*f)/(i hbar) with hbar symbolic.
PhasePolynomial moyal_bracket_series(const PhasePolynomial& f, const PhasePolynomial& g);
/// Throws std::domain_error at hbar = 0; use poisson_bracket there.
PhasePolynomial moyal_bracket(const StarContext& ctx, const PhasePolynomial& f, const PhasePolynomial& g);

PhasePolynomial poisson_bracket(const PhasePolynomial& f, const PhasePolynomial& g);

struct LimitRecord {
  Rational hbar;
  double bracket_deviation = 0.0;  ///< |moyal - poisson| in coefficient space
  double product_deviation = 0.0;  ///< |f*g - f g|
};

struct LimitSweep {
  std::vector<LimitRecord> records;
  /// Least-squares log-log slopes; empty when a deviation vanishes.
  std::optional<double> bracket_slope;
  std::optional<double> product_slope;
  /// hbar powers carried by moyal - poisson (symbolic); all even and >= 2 in theory.
  std::vector<int> correction_powers;
};

/// `hbar_values` must be positive and strictly descending.
LimitSweep classical_limit_sweep(const PhasePolynomial& f, const PhasePolynomial& g,
                                 const std::vector<Rational>& hbar_values);

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Monomials of phase-space degree <= bound, in term order.
std::vector<Monomial> monomial_basis(int dimension, int bound);

/// Linear map on polynomials of degree <= bound, as an exact matrix.
class DegreeBoundedOperator {
 public:
  DegreeBoundedOperator(int dimension, int bound);

  int dimension() const { return dimension_; }
  int bound() const { return bound_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<Monomial>& basis() const { return basis_; }
  /// True if some image had terms above the bound that were dropped.
  bool truncated() const { return truncated_; }

  const QComplex& at(std::size_t row, std::size_t col) const { return entries_[row * size() + col]; }
  QComplex& at(std::size_t row, std::size_t col) { return entries_[row * size() + col]; }

  /// Fills column `col` from `image`, truncating and flagging terms above the bound.
  void set_column(std::size_t col, const PhasePolynomial& image);
  PhasePolynomial apply(const PhasePolynomial& g) const;

  DegreeBoundedOperator operator*(const DegreeBoundedOperator& o) const;
  DegreeBoundedOperator operator-(const DegreeBoundedOperator& o) const;
  DegreeBoundedOperator scaled(const QComplex& c) const;
  bool operator==(const DegreeBoundedOperator& o) const;

  /// Whether the columns of basis monomials with degree <= `degree` equal
  /// `value` times the matching unit vectors.
  bool is_scalar_on(int degree, const QComplex& value) const;

  Eigen::MatrixXcd to_dense() const;

  static DegreeBoundedOperator identity(int dimension, int bound);

 private:
  void require_compatible(const DegreeBoundedOperator& o) const;

  int dimension_;
  int bound_;
  std::vector<Monomial> basis_;
  std::vector<QComplex> entries_;
  bool truncated_ = false;
};

/// g -> f * g, g -> g * f, g -> {f, g}_* and g -> {f, g} on degree <= bound.
/// The star actions need a numeric hbar; the bracket action needs hbar > 0.
DegreeBoundedOperator left_star_action(const StarContext& ctx, const PhasePolynomial& f, int bound);
DegreeBoundedOperator right_star_action(const StarContext& ctx, const PhasePolynomial& f, int bound);
DegreeBoundedOperator moyal_action(const StarContext& ctx, const PhasePolynomial& f, int bound);
DegreeBoundedOperator poisson_action(const PhasePolynomial& f, int bound);

struct HarmonicSample {
  double t = 0.0;
  double moyal_poisson_difference = 0.0;  ///< max entry of exp(t G_moyal) - exp(t G_poisson)
  double analytic_error = 0.0;            ///< x, p images vs. the phase-space rotation
};

struct HarmonicEvolutionReport {
  int bound = 0;
  bool generators_equal = false;  ///< exact comparison of g -> {g, H} under both brackets
  bool truncated = false;
  std::vector<HarmonicSample> samples;
};

/// Heisenberg flow dg/dt = {g, H} of observables for H = (p^2 + x^2)/2 in one dimension.
HarmonicEvolutionReport harmonic_evolution_check(const StarContext& ctx, const std::vector<double>& t_values,
                                                 int bound = 3);

}  // namespace qspace::star
