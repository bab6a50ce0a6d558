#include "qspace/star_product.hpp"

#include "qspace/matrix_exp.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qspace::star {

namespace {

struct AxisTerm {
  Rational factor;
  int x = 0;
  int p = 0;
  int order = 0;  // alpha + beta
};

Rational falling(int n, int k) {
  Rational r = 1;
  for (int j = 0; j < k; ++j) r *= n - j;
  return r;
}

Rational factorial(int n) { return falling(n, n); }

// Expansion of x^a p^b * x^c p^d along one axis.
std::vector<AxisTerm> axis_expansion(int a, int b, int c, int d) {
  std::vector<AxisTerm> out;
  for (int alpha = 0; alpha <= std::min(a, d); ++alpha)
    for (int beta = 0; beta <= std::min(b, c); ++beta) {
      Rational f = falling(a, alpha) * falling(d, alpha) * falling(b, beta) * falling(c, beta) /
                   (factorial(alpha) * factorial(beta));
      if (beta % 2 == 1) f = -f;
      out.push_back({f, a - alpha + c - beta, b - beta + d - alpha, alpha + beta});
    }
  return out;
}

// (i/2)^n
QComplex half_i_power(int n) {
  Rational mag = 1;
  for (int k = 0; k < n; ++k) mag /= 2;
  switch (n % 4) {
    case 0: return {mag, 0};
    case 1: return {0, mag};
    case 2: return {-mag, 0};
    default: return {0, -mag};
  }
}

void require_same_dimension(const PhasePolynomial& f, const PhasePolynomial& g) {
  if (f.dimension() != g.dimension())
    throw std::invalid_argument("phase-space dimensions differ (" + std::to_string(f.dimension()) + " vs " +
                                std::to_string(g.dimension()) + ")");
}

void require_context(const StarContext& ctx, const PhasePolynomial& f) {
  if (ctx.dimension != f.dimension()) throw std::invalid_argument("polynomial dimension differs from the star context");
  if (ctx.hbar && *ctx.hbar < 0) throw std::invalid_argument("hbar must be non-negative");
}

void add_pair(PhasePolynomial& out, const Monomial& m1, const QComplex& c1, const Monomial& m2, const QComplex& c2) {
  const int dim = out.dimension();
  std::vector<std::vector<AxisTerm>> axes;
  for (int i = 0; i < dim; ++i) axes.push_back(axis_expansion(m1.x[i], m1.p[i], m2.x[i], m2.p[i]));
  const QComplex base = c1 * c2;
  std::vector<std::size_t> choice(static_cast<std::size_t>(dim), 0);
  for (;;) {
    Monomial m;
    m.hbar = m1.hbar + m2.hbar;
    Rational factor = 1;
    int order = 0;
    for (int i = 0; i < dim; ++i) {
      const AxisTerm& t = axes[static_cast<std::size_t>(i)][choice[static_cast<std::size_t>(i)]];
      factor *= t.factor;
      m.x[i] = t.x;
      m.p[i] = t.p;
      order += t.order;
    }
    m.hbar += order;
    out.add_term(m, base * half_i_power(order) * QComplex(factor));
    int axis = 0;
    while (axis < dim) {
      auto& c = choice[static_cast<std::size_t>(axis)];
      if (++c < axes[static_cast<std::size_t>(axis)].size()) break;
      c = 0;
      ++axis;
    }
    if (axis == dim) return;
  }
}

}  // namespace

PhasePolynomial star_series(const PhasePolynomial& f, const PhasePolynomial& g) {
  require_same_dimension(f, g);
  PhasePolynomial out(f.dimension());
  for (const auto& [m1, c1] : f.terms())
    for (const auto& [m2, c2] : g.terms()) add_pair(out, m1, c1, m2, c2);
  return out;
}

PhasePolynomial star(const StarContext& ctx, const PhasePolynomial& f, const PhasePolynomial& g) {
  require_context(ctx, f);
  const PhasePolynomial s = star_series(f, g);
  return ctx.hbar ? s.substitute_hbar(*ctx.hbar) : s;
}

PhasePolynomial moyal_bracket_series(const PhasePolynomial& f, const PhasePolynomial& g) {
  const PhasePolynomial commutator = star_series(f, g) - star_series(g, f);
  return commutator.shift_hbar(-1).scaled(QComplex(0, -1));
}

PhasePolynomial moyal_bracket(const StarContext& ctx, const PhasePolynomial& f, const PhasePolynomial& g) {
  require_context(ctx, f);
  if (ctx.hbar && *ctx.hbar == 0) throw std::domain_error("Moyal bracket needs hbar > 0; use the Poisson bracket");
  const PhasePolynomial b = moyal_bracket_series(f, g);
  return ctx.hbar ? b.substitute_hbar(*ctx.hbar) : b;
}

PhasePolynomial poisson_bracket(const PhasePolynomial& f, const PhasePolynomial& g) {
  require_same_dimension(f, g);
  PhasePolynomial out(f.dimension());
  for (int i = 0; i < f.dimension(); ++i) {
    out += f.d_position(i) * g.d_momentum(i);
    out -= f.d_momentum(i) * g.d_position(i);
  }
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs at least two matched points");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(x.size()), 2);
  Eigen::VectorXd target(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log-log fit needs positive values");
    design(static_cast<Eigen::Index>(i), 0) = std::log(x[i]);
    design(static_cast<Eigen::Index>(i), 1) = 1.0;
    target[static_cast<Eigen::Index>(i)] = std::log(y[i]);
  }
  return design.colPivHouseholderQr().solve(target)[0];
}

LimitSweep classical_limit_sweep(const PhasePolynomial& f, const PhasePolynomial& g,
                                 const std::vector<Rational>& hbar_values) {
  require_same_dimension(f, g);
  for (std::size_t i = 0; i < hbar_values.size(); ++i) {
    if (hbar_values[i] <= 0) throw std::invalid_argument("hbar values must be positive");
    if (i > 0 && !(hbar_values[i] < hbar_values[i - 1]))
      throw std::invalid_argument("hbar values must be strictly descending");
  }
  const PhasePolynomial correction = moyal_bracket_series(f, g) - poisson_bracket(f, g);
  const PhasePolynomial product_shift = star_series(f, g) - f * g;

  LimitSweep sweep;
  for (const auto& [m, c] : correction.terms())
    if (sweep.correction_powers.empty() || sweep.correction_powers.back() != m.hbar) sweep.correction_powers.push_back(m.hbar);

  std::vector<double> h, bracket, product;
  bool bracket_positive = true;
  bool product_positive = true;
  for (const Rational& value : hbar_values) {
    LimitRecord r;
    r.hbar = value;
    r.bracket_deviation = correction.substitute_hbar(value).coefficient_norm(0.0);
    r.product_deviation = product_shift.substitute_hbar(value).coefficient_norm(0.0);
    h.push_back(value.convert_to<double>());
    bracket.push_back(r.bracket_deviation);
    product.push_back(r.product_deviation);
    bracket_positive = bracket_positive && r.bracket_deviation > 0.0;
    product_positive = product_positive && r.product_deviation > 0.0;
    sweep.records.push_back(std::move(r));
  }
  if (h.size() >= 2 && bracket_positive) sweep.bracket_slope = log_log_slope(h, bracket);
  if (h.size() >= 2 && product_positive) sweep.product_slope = log_log_slope(h, product);
  return sweep;
}

std::vector<Monomial> monomial_basis(int dimension, int bound) {
  if (dimension != 1 && dimension != 3) throw std::invalid_argument("phase-space dimension must be 1 or 3");
  if (bound < 0) throw std::invalid_argument("degree bound must be non-negative");
  std::vector<Monomial> out;
  const int vars = 2 * dimension;
  std::vector<int> e(static_cast<std::size_t>(vars), 0);
  for (;;) {
    int total = 0;
    for (int v : e) total += v;
    if (total <= bound) {
      Monomial m;
      for (int i = 0; i < dimension; ++i) {
        m.x[i] = e[static_cast<std::size_t>(i)];
        m.p[i] = e[static_cast<std::size_t>(dimension + i)];
      }
      out.push_back(m);
    }
    int v = 0;
    while (v < vars) {
      if (++e[static_cast<std::size_t>(v)] <= bound) break;
      e[static_cast<std::size_t>(v)] = 0;
      ++v;
    }
    if (v == vars) break;
  }
  std::sort(out.begin(), out.end(), MonomialOrder{});
  return out;
}

DegreeBoundedOperator::DegreeBoundedOperator(int dimension, int bound)
    : dimension_(dimension), bound_(bound), basis_(monomial_basis(dimension, bound)) {
  entries_.assign(basis_.size() * basis_.size(), QComplex());
}

DegreeBoundedOperator DegreeBoundedOperator::identity(int dimension, int bound) {
  DegreeBoundedOperator id(dimension, bound);
  for (std::size_t i = 0; i < id.size(); ++i) id.at(i, i) = QComplex(1);
  return id;
}

void DegreeBoundedOperator::set_column(std::size_t col, const PhasePolynomial& image) {
  if (image.dimension() != dimension_) throw std::invalid_argument("image dimension differs from the operator");
  for (std::size_t row = 0; row < size(); ++row) at(row, col) = QComplex();
  for (const auto& [m, c] : image.terms()) {
    if (m.hbar != 0) throw std::invalid_argument("operator images must be hbar-free; fix a numeric hbar");
    if (m.degree() > bound_) {
      truncated_ = true;
      continue;
    }
    const auto it = std::lower_bound(basis_.begin(), basis_.end(), m, MonomialOrder{});
    at(static_cast<std::size_t>(it - basis_.begin()), col) = c;
  }
}

PhasePolynomial DegreeBoundedOperator::apply(const PhasePolynomial& g) const {
  if (g.dimension() != dimension_) throw std::invalid_argument("polynomial dimension differs from the operator");
  PhasePolynomial out(dimension_);
  for (const auto& [m, c] : g.terms()) {
    if (m.hbar != 0 || m.degree() > bound_) throw std::invalid_argument("argument lies outside the operator's domain");
    const auto col = static_cast<std::size_t>(std::lower_bound(basis_.begin(), basis_.end(), m, MonomialOrder{}) - basis_.begin());
    for (std::size_t row = 0; row < size(); ++row)
      if (!at(row, col).is_zero()) out.add_term(basis_[row], at(row, col) * c);
  }
  return out;
}

void DegreeBoundedOperator::require_compatible(const DegreeBoundedOperator& o) const {
  if (dimension_ != o.dimension_ || bound_ != o.bound_) throw std::invalid_argument("operators act on different spaces");
}

DegreeBoundedOperator DegreeBoundedOperator::operator*(const DegreeBoundedOperator& o) const {
  require_compatible(o);
  DegreeBoundedOperator out(dimension_, bound_);
  out.truncated_ = truncated_ || o.truncated_;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!o.at(k, j).is_zero()) out.at(i, j) += at(i, k) * o.at(k, j);
    }
  return out;
}

DegreeBoundedOperator DegreeBoundedOperator::operator-(const DegreeBoundedOperator& o) const {
  require_compatible(o);
  DegreeBoundedOperator out = *this;
  out.truncated_ = truncated_ || o.truncated_;
  for (std::size_t e = 0; e < entries_.size(); ++e) out.entries_[e] -= o.entries_[e];
  return out;
}

DegreeBoundedOperator DegreeBoundedOperator::scaled(const QComplex& c) const {
  DegreeBoundedOperator out = *this;
  for (auto& e : out.entries_) e *= c;
  return out;
}

bool DegreeBoundedOperator::operator==(const DegreeBoundedOperator& o) const {
  return dimension_ == o.dimension_ && bound_ == o.bound_ && entries_ == o.entries_;
}

bool DegreeBoundedOperator::is_scalar_on(int degree, const QComplex& value) const {
  for (std::size_t col = 0; col < size(); ++col) {
    if (basis_[col].degree() > degree) continue;
    for (std::size_t row = 0; row < size(); ++row)
      if (!(at(row, col) == (row == col ? value : QComplex()))) return false;
  }
  return true;
}

Eigen::MatrixXcd DegreeBoundedOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).to_complex();
  return m;
}

namespace {

template <typename Image>
DegreeBoundedOperator build_action(int dimension, const PhasePolynomial& f, int bound, Image image) {
  if (f.degree() > bound)
    throw std::invalid_argument("degree bound " + std::to_string(bound) + " is below the generator degree " +
                                std::to_string(f.degree()));
  DegreeBoundedOperator op(dimension, bound);
  for (std::size_t col = 0; col < op.size(); ++col)
    op.set_column(col, image(PhasePolynomial::monomial(dimension, op.basis()[col])));
  return op;
}

void require_numeric(const StarContext& ctx) {
  if (!ctx.hbar) throw std::invalid_argument("star actions need a numeric hbar");
}

}  // namespace

DegreeBoundedOperator left_star_action(const StarContext& ctx, const PhasePolynomial& f, int bound) {
  require_context(ctx, f);
  require_numeric(ctx);
  return build_action(ctx.dimension, f, bound, [&](const PhasePolynomial& g) { return star(ctx, f, g); });
}

DegreeBoundedOperator right_star_action(const StarContext& ctx, const PhasePolynomial& f, int bound) {
  require_context(ctx, f);
  require_numeric(ctx);
  return build_action(ctx.dimension, f, bound, [&](const PhasePolynomial& g) { return star(ctx, g, f); });
}

DegreeBoundedOperator moyal_action(const StarContext& ctx, const PhasePolynomial& f, int bound) {
  require_context(ctx, f);
  return build_action(ctx.dimension, f, bound, [&](const PhasePolynomial& g) { return moyal_bracket(ctx, f, g); });
}

DegreeBoundedOperator poisson_action(const PhasePolynomial& f, int bound) {
  return build_action(f.dimension(), f, bound, [&](const PhasePolynomial& g) { return poisson_bracket(f, g); });
}

HarmonicEvolutionReport harmonic_evolution_check(const StarContext& ctx, const std::vector<double>& t_values,
                                                 int bound) {
  if (ctx.dimension != 1) throw std::invalid_argument("the harmonic evolution check runs in one dimension");
  if (bound < 1) throw std::invalid_argument("the observable space must contain x and p");
  const PhasePolynomial x = PhasePolynomial::position(1);
  const PhasePolynomial p = PhasePolynomial::momentum(1);
  const PhasePolynomial h = (p * p + x * x).scaled(QComplex(Rational(1, 2)));

  // Heisenberg generator g -> {g, H} = -{H, g}.
  const DegreeBoundedOperator moyal = moyal_action(ctx, h, std::max(bound, 2)).scaled(QComplex(-1));
  const DegreeBoundedOperator poisson = poisson_action(h, std::max(bound, 2)).scaled(QComplex(-1));

  HarmonicEvolutionReport report;
  report.bound = moyal.bound();
  report.generators_equal = moyal == poisson;
  report.truncated = moyal.truncated() || poisson.truncated();

  const auto& basis = moyal.basis();
  auto index_of = [&basis](const PhasePolynomial& v) {
    const Monomial& m = v.terms().begin()->first;
    return static_cast<Eigen::Index>(std::lower_bound(basis.begin(), basis.end(), m, MonomialOrder{}) - basis.begin());
  };
  const Eigen::Index ix = index_of(x);
  const Eigen::Index ip = index_of(p);
  const Eigen::MatrixXcd gm = moyal.to_dense();
  const Eigen::MatrixXcd gp = poisson.to_dense();
  for (double t : t_values) {
    const Eigen::MatrixXcd em = linalg::expm(Eigen::MatrixXcd(t * gm));
    const Eigen::MatrixXcd ep = linalg::expm(Eigen::MatrixXcd(t * gp));
    HarmonicSample s;
    s.t = t;
    s.moyal_poisson_difference = (em - ep).cwiseAbs().maxCoeff();
    Eigen::VectorXcd x_expected = Eigen::VectorXcd::Zero(gm.rows());
    Eigen::VectorXcd p_expected = Eigen::VectorXcd::Zero(gm.rows());
    x_expected[ix] = std::cos(t);
    x_expected[ip] = std::sin(t);
    p_expected[ip] = std::cos(t);
    p_expected[ix] = -std::sin(t);
    s.analytic_error = std::max((em.col(ix) - x_expected).cwiseAbs().maxCoeff(),
                                (em.col(ip) - p_expected).cwiseAbs().maxCoeff());
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace qspace::star
