#include "qspace/phase_polynomial.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qspace::star {

// ---- numbers ----

Rational parse_rational(const std::string& text) {
  std::size_t pos = 0;
  const std::size_t n = text.size();
  auto fail = [&text]() -> Rational { throw std::invalid_argument("malformed number '" + text + "'"); };
  if (n == 0) return fail();
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  const auto slash = text.find('/', pos);
  if (slash != std::string::npos) {
    const Rational num = parse_rational(text.substr(pos, slash - pos));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return negative ? Rational(-num / den) : Rational(num / den);
  }
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool any = false;
  while (pos < n && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits = digits * 10 + (text[pos++] - '0');
    any = true;
  }
  if (pos < n && text[pos] == '.') {
    ++pos;
    while (pos < n && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits = digits * 10 + (text[pos++] - '0');
      --scale;
      any = true;
    }
  }
  if (!any) return fail();
  if (pos < n && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_negative = false;
    if (pos < n && (text[pos] == '+' || text[pos] == '-')) exp_negative = text[pos++] == '-';
    if (pos == n) return fail();
    int exponent = 0;
    while (pos < n && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      exponent = exponent * 10 + (text[pos++] - '0');
      if (exponent > 4000) return fail();
    }
    scale += exp_negative ? -exponent : exponent;
  }
  if (pos != n) return fail();
  Rational value(digits);
  const boost::multiprecision::cpp_int ten_power = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), std::abs(scale));
  value = scale >= 0 ? Rational(value * ten_power) : Rational(value / ten_power);
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
  std::ostringstream out;
  out << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) out << '/' << boost::multiprecision::denominator(q);
  return out.str();
}

std::complex<double> QComplex::to_complex() const {
  return {re.convert_to<double>(), im.convert_to<double>()};
}

QComplex& QComplex::operator+=(const QComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

QComplex& QComplex::operator-=(const QComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

QComplex& QComplex::operator*=(const QComplex& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

QComplex QComplex::operator/(const QComplex& o) const {
  const Rational d = o.re * o.re + o.im * o.im;
  if (d == 0) throw std::domain_error("division by zero");
  return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
}

std::string to_string(const QComplex& c) {
  if (c.im == 0) return to_string(c.re);
  const Rational mag = boost::multiprecision::abs(c.im);
  const std::string imag = mag == 1 ? "i" : to_string(mag) + "*i";
  if (c.re == 0) return (c.im < 0 ? "-" : "") + imag;
  return "(" + to_string(c.re) + (c.im < 0 ? " - " : " + ") + imag + ")";
}

// ---- monomials ----

int Monomial::degree() const {
  int d = 0;
  for (int i = 0; i < 3; ++i) d += x[i] + p[i];
  return d;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial m;
  for (int i = 0; i < 3; ++i) {
    m.x[i] = x[i] + o.x[i];
    m.p[i] = p[i] + o.p[i];
  }
  m.hbar = hbar + o.hbar;
  return m;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  if (a.hbar != b.hbar) return a.hbar < b.hbar;
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da > db;
  if (a.x != b.x) return a.x > b.x;
  return a.p > b.p;
}

// ---- polynomials ----

PhasePolynomial::PhasePolynomial(int dimension) : dimension_(dimension) {
  if (dimension != 1 && dimension != 3) throw std::invalid_argument("phase-space dimension must be 1 or 3");
}

PhasePolynomial PhasePolynomial::constant(int dimension, const QComplex& c) {
  return monomial(dimension, Monomial{}, c);
}

PhasePolynomial PhasePolynomial::position(int dimension, int index) {
  if (index < 0 || index >= dimension) throw std::out_of_range("coordinate index out of range");
  Monomial m;
  m.x[index] = 1;
  return monomial(dimension, m);
}

PhasePolynomial PhasePolynomial::momentum(int dimension, int index) {
  if (index < 0 || index >= dimension) throw std::out_of_range("coordinate index out of range");
  Monomial m;
  m.p[index] = 1;
  return monomial(dimension, m);
}

PhasePolynomial PhasePolynomial::hbar(int dimension) {
  Monomial m;
  m.hbar = 1;
  return monomial(dimension, m);
}

PhasePolynomial PhasePolynomial::monomial(int dimension, const Monomial& m, const QComplex& c) {
  PhasePolynomial out(dimension);
  out.add_term(m, c);
  return out;
}

int PhasePolynomial::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int PhasePolynomial::max_hbar() const { return terms_.empty() ? -1 : terms_.rbegin()->first.hbar; }
int PhasePolynomial::min_hbar() const { return terms_.empty() ? -1 : terms_.begin()->first.hbar; }

bool PhasePolynomial::has_real_coefficients() const {
  for (const auto& [m, c] : terms_)
    if (c.im != 0) return false;
  return true;
}

QComplex PhasePolynomial::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? QComplex() : it->second;
}

void PhasePolynomial::add_term(const Monomial& m, const QComplex& c) {
  for (int i = dimension_; i < 3; ++i)
    if (m.x[i] != 0 || m.p[i] != 0) throw std::invalid_argument("monomial uses an axis beyond the dimension");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void PhasePolynomial::require_same_dimension(const PhasePolynomial& o) const {
  if (dimension_ != o.dimension_)
    throw std::invalid_argument("phase-space dimensions differ (" + std::to_string(dimension_) + " vs " +
                                std::to_string(o.dimension_) + ")");
}

PhasePolynomial& PhasePolynomial::operator+=(const PhasePolynomial& o) {
  require_same_dimension(o);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

PhasePolynomial& PhasePolynomial::operator-=(const PhasePolynomial& o) {
  require_same_dimension(o);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

PhasePolynomial operator*(const PhasePolynomial& a, const PhasePolynomial& b) {
  a.require_same_dimension(b);
  PhasePolynomial out(a.dimension_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

PhasePolynomial PhasePolynomial::scaled(const QComplex& c) const {
  PhasePolynomial out(dimension_);
  if (c.is_zero()) return out;
  for (const auto& [m, v] : terms_) out.terms_.emplace(m, v * c);
  return out;
}

PhasePolynomial PhasePolynomial::d_position(int index) const {
  if (index < 0 || index >= dimension_) throw std::out_of_range("coordinate index out of range");
  PhasePolynomial out(dimension_);
  for (const auto& [m, c] : terms_) {
    if (m.x[index] == 0) continue;
    Monomial d = m;
    --d.x[index];
    out.add_term(d, c * QComplex(m.x[index]));
  }
  return out;
}

PhasePolynomial PhasePolynomial::d_momentum(int index) const {
  if (index < 0 || index >= dimension_) throw std::out_of_range("coordinate index out of range");
  PhasePolynomial out(dimension_);
  for (const auto& [m, c] : terms_) {
    if (m.p[index] == 0) continue;
    Monomial d = m;
    --d.p[index];
    out.add_term(d, c * QComplex(m.p[index]));
  }
  return out;
}

PhasePolynomial PhasePolynomial::shift_hbar(int shift) const {
  PhasePolynomial out(dimension_);
  for (const auto& [m, c] : terms_) {
    Monomial s = m;
    s.hbar += shift;
    if (s.hbar < 0) throw std::domain_error("negative hbar power after shift");
    out.terms_.emplace(s, c);
  }
  return out;
}

PhasePolynomial PhasePolynomial::substitute_hbar(const Rational& hbar) const {
  PhasePolynomial out(dimension_);
  for (const auto& [m, c] : terms_) {
    Monomial s = m;
    s.hbar = 0;
    Rational factor = 1;
    for (int k = 0; k < m.hbar; ++k) factor *= hbar;
    out.add_term(s, c * QComplex(factor));
  }
  return out;
}

PhasePolynomial PhasePolynomial::truncated(int bound, bool* dropped) const {
  PhasePolynomial out(dimension_);
  bool any = false;
  for (const auto& [m, c] : terms_) {
    if (m.degree() <= bound) out.terms_.emplace(m, c);
    else any = true;
  }
  if (dropped) *dropped = any;
  return out;
}

double PhasePolynomial::coefficient_norm(double hbar) const {
  std::map<Monomial, std::complex<double>, MonomialOrder> folded;
  for (const auto& [m, c] : terms_) {
    Monomial s = m;
    s.hbar = 0;
    folded[s] += c.to_complex() * std::pow(hbar, m.hbar);
  }
  double sum = 0.0;
  for (const auto& [m, c] : folded) sum += std::norm(c);
  return std::sqrt(sum);
}

std::string PhasePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string vars;
    auto append = [&vars](const std::string& name, int power) {
      if (power == 0) return;
      if (!vars.empty()) vars += '*';
      vars += name;
      if (power > 1) vars += '^' + std::to_string(power);
    };
    for (int i = 0; i < dimension_; ++i) append(dimension_ == 1 ? "x" : "x" + std::to_string(i + 1), m.x[i]);
    for (int i = 0; i < dimension_; ++i) append(dimension_ == 1 ? "p" : "p" + std::to_string(i + 1), m.p[i]);
    append("hbar", m.hbar);

    // Pull a leading sign out of purely real or purely imaginary coefficients.
    QComplex mag = c;
    bool negative = false;
    if ((c.im == 0 && c.re < 0) || (c.re == 0 && c.im < 0)) {
      negative = true;
      mag = -c;
    }
    std::string coef;
    if (mag.im == 0) {
      if (mag.re != 1 || vars.empty()) coef = star::to_string(mag.re);
    } else if (mag.re == 0) {
      coef = mag.im == 1 ? "i" : star::to_string(mag.im) + "*i";
    } else {
      coef = star::to_string(mag);
    }
    std::string term = coef.empty() ? vars : vars.empty() ? coef : coef + "*" + vars;
    if (first) out += negative ? "-" + term : term;
    else out += (negative ? " - " : " + ") + term;
    first = false;
  }
  return out;
}

// ---- parser ----

namespace {

class Parser {
 public:
  Parser(const std::string& text, int dimension) : text_(text), dimension_(dimension) {}

  PhasePolynomial parse() {
    PhasePolynomial result = expression();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return result;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    throw std::invalid_argument("polynomial '" + text_ + "' at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_primary() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'x' || c == 'p' || c == 'h' ||
           c == 'i';
  }

  PhasePolynomial expression() {
    PhasePolynomial acc = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        acc += term();
      } else if (c == '-') {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  PhasePolynomial term() {
    PhasePolynomial acc = factor();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (c == '/') {
        ++pos_;
        const PhasePolynomial divisor = factor();
        if (divisor.is_zero()) error("division by zero");
        if (divisor.terms().size() != 1 || !(divisor.terms().begin()->first == Monomial{}))
          error("division only by non-zero constants");
        acc = acc.scaled(QComplex(1) / divisor.terms().begin()->second);
      } else if (starts_primary()) {
        acc = acc * factor();
      } else {
        return acc;
      }
    }
  }

  PhasePolynomial factor() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (c == '+') {
      ++pos_;
      return factor();
    }
    PhasePolynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) error("exponent must be a non-negative integer");
      const int exponent = std::stoi(text_.substr(start, pos_ - start));
      if (exponent > 64) error("exponent too large");
      PhasePolynomial out = PhasePolynomial::constant(dimension_, QComplex(1));
      for (int k = 0; k < exponent; ++k) out = out * base;
      return out;
    }
    return base;
  }

  PhasePolynomial primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      PhasePolynomial inner = expression();
      if (peek() != ')') error("missing ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (text_.compare(pos_, 4, "hbar") == 0) {
      pos_ += 4;
      return PhasePolynomial::hbar(dimension_);
    }
    if (c == 'i') {
      ++pos_;
      return PhasePolynomial::constant(dimension_, QComplex::i());
    }
    if (c == 'x' || c == 'p') {
      ++pos_;
      int index = 0;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        index = text_[pos_++] - '1';
        if (index < 0 || index >= dimension_) error("coordinate index out of range for dimension " + std::to_string(dimension_));
      } else if (dimension_ != 1) {
        error("use indexed coordinates x1..x3, p1..p3 in three dimensions");
      }
      return c == 'x' ? PhasePolynomial::position(dimension_, index) : PhasePolynomial::momentum(dimension_, index);
    }
    error(c == '\0' ? "unexpected end of input" : "unexpected '" + std::string(1, c) + "'");
  }

  PhasePolynomial number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    try {
      return PhasePolynomial::constant(dimension_, QComplex(parse_rational(text_.substr(start, pos_ - start))));
    } catch (const std::invalid_argument& e) {
      error(e.what());
    }
  }

  const std::string& text_;
  int dimension_;
  std::size_t pos_ = 0;
};

int infer_dimension(const std::string& text) {
  for (std::size_t i = 0; i + 1 < text.size(); ++i)
    if ((text[i] == 'x' || text[i] == 'p') && (text[i + 1] == '2' || text[i + 1] == '3')) return 3;
  return 1;
}

}  // namespace

PhasePolynomial parse_polynomial(const std::string& text, std::optional<int> dimension) {
  const int dim = dimension.value_or(infer_dimension(text));
  if (dim != 1 && dim != 3) throw std::invalid_argument("phase-space dimension must be 1 or 3");
  return Parser(text, dim).parse();
}

}  // namespace qspace::star
