#include "qspace/lie_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qspace::lie {

namespace {

int delta(int a, int b) { return a == b ? 1 : 0; }

void accumulate(Terms& terms, std::size_t generator, double coefficient, int eps_power) {
  for (auto& t : terms) {
    if (t.generator == generator && t.eps_power == eps_power) {
      t.coefficient += coefficient;
      return;
    }
  }
  terms.push_back({generator, coefficient, eps_power});
}

Terms canonical(Terms terms) {
  std::erase_if(terms, [](const BracketTerm& t) { return t.coefficient == 0.0; });
  std::sort(terms.begin(), terms.end(), [](const BracketTerm& l, const BracketTerm& r) {
    return l.generator != r.generator ? l.generator < r.generator : l.eps_power < r.eps_power;
  });
  return terms;
}

Terms negated(Terms terms) {
  for (auto& t : terms) t.coefficient = -t.coefficient;
  return terms;
}

GeneratorRole role_from_name(std::string_view name, int& index) {
  index = 0;
  if (name.empty()) return GeneratorRole::other;
  auto digits = name.substr(1);
  auto all_digits = !digits.empty() &&
                    std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '1' && c <= '3'; });
  switch (name.front()) {
    case 'J':
      if (digits.size() == 2 && all_digits && digits[0] != digits[1]) {
        index = rotation_dual(digits[0] - '0', digits[1] - '0').dual;
        return GeneratorRole::rotation;
      }
      break;
    case 'X':
      if (digits.size() == 1 && all_digits) {
        index = digits[0] - '0';
        return GeneratorRole::position;
      }
      break;
    case 'P':
      if (digits.size() == 1 && all_digits) {
        index = digits[0] - '0';
        return GeneratorRole::momentum;
      }
      break;
    case 'I':
      if (digits.empty()) return GeneratorRole::central;
      break;
    case 'H':
      if (digits.empty()) return GeneratorRole::hamiltonian;
      break;
  }
  return GeneratorRole::other;
}

}  // namespace

StructureConstantTable::StructureConstantTable(std::string name, std::vector<GeneratorLabel> generators)
    : name_(std::move(name)), generators_(std::move(generators)) {
  if (generators_.empty()) throw std::invalid_argument("algebra needs at least one generator");
  for (std::size_t a = 0; a < generators_.size(); ++a)
    for (std::size_t b = a + 1; b < generators_.size(); ++b)
      if (generators_[a].name == generators_[b].name)
        throw std::invalid_argument("duplicate generator name '" + generators_[a].name + "'");
  entries_.resize(generators_.size() * generators_.size());
}

std::size_t StructureConstantTable::index_of(std::string_view name) const {
  for (std::size_t a = 0; a < generators_.size(); ++a)
    if (generators_[a].name == name) return a;
  throw std::invalid_argument("unknown generator '" + std::string(name) + "' in algebra " + name_);
}

void StructureConstantTable::set_bracket(std::size_t a, std::size_t b, Terms terms) {
  if (a == b && !canonical(terms).empty())
    throw std::invalid_argument("[T, T] must vanish");
  set_entry_unmirrored(a, b, terms);
  if (a != b) set_entry_unmirrored(b, a, negated(std::move(terms)));
}

void StructureConstantTable::set_entry_unmirrored(std::size_t a, std::size_t b, Terms terms) {
  const auto n = dimension();
  if (a >= n || b >= n) throw std::out_of_range("bracket index out of range");
  for (const auto& t : terms) {
    if (t.generator >= n) throw std::out_of_range("bracket image index out of range");
    if (t.eps_power < 0) throw std::invalid_argument("eps powers must be non-negative");
  }
  entries_[a * n + b] = canonical(std::move(terms));
}

const Terms& StructureConstantTable::entry(std::size_t a, std::size_t b) const {
  const auto n = dimension();
  if (a >= n || b >= n) throw std::out_of_range("bracket index out of range");
  return entries_[a * n + b];
}

int StructureConstantTable::max_eps_power() const {
  int m = 0;
  for (const auto& e : entries_)
    for (const auto& t : e) m = std::max(m, t.eps_power);
  return m;
}

StructureConstantTable StructureConstantTable::evaluated_at(double eps) const {
  if (eps < 0.0) throw std::invalid_argument("eps must be non-negative");
  StructureConstantTable out(name_, generators_);
  const auto n = dimension();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      Terms terms;
      for (const auto& t : entry(a, b)) {
        // eps^0 is 1 even at eps = 0.
        const double scale = t.eps_power == 0 ? 1.0 : std::pow(eps, t.eps_power);
        accumulate(terms, t.generator, t.coefficient * scale, 0);
      }
      out.entries_[a * n + b] = canonical(std::move(terms));
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> StructureConstantTable::dense_at(double eps) const {
  const auto n = static_cast<Eigen::Index>(dimension());
  std::vector<Eigen::MatrixXd> f(dimension(), Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (const auto& t : entry(a, b))
        f[a](b, static_cast<Eigen::Index>(t.generator)) +=
            t.coefficient * (t.eps_power == 0 ? 1.0 : std::pow(eps, t.eps_power));
  return f;
}

bool operator==(const StructureConstantTable& l, const StructureConstantTable& r) {
  if (l.dimension() != r.dimension()) return false;
  for (std::size_t a = 0; a < l.dimension(); ++a)
    if (l.generators_[a].name != r.generators_[a].name) return false;
  return l.entries_ == r.entries_;
}

StandardAlgebra parse_standard_algebra(std::string_view name) {
  if (name == "HR3") return StandardAlgebra::HR3;
  if (name == "HR3_with_H") return StandardAlgebra::HR3_with_H;
  throw std::invalid_argument("unknown builtin algebra '" + std::string(name) +
                              "' (expected HR3 or HR3_with_H)");
}

std::string_view to_string(StandardAlgebra which) {
  return which == StandardAlgebra::HR3 ? "HR3" : "HR3_with_H";
}

DualRotation rotation_dual(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) throw std::out_of_range("rotation indices run over 1..3");
  if (i == j) return {0, 0};
  // (i, j, dual) cyclic -> +1
  const int dual = 6 - i - j;
  const bool cyclic = (j - i + 3) % 3 == 1;
  return {dual, cyclic ? 1 : -1};
}

Eigen::Vector3d four_index_rotation_bracket(int i, int j, int h, int k) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  auto add = [&out](int coefficient, int u, int v) {
    if (coefficient == 0) return;
    const auto d = rotation_dual(u, v);
    if (d.sign != 0) out[d.dual - 1] += coefficient * d.sign;
  };
  add(delta(j, k), i, h);
  add(-delta(j, h), i, k);
  add(delta(i, h), j, k);
  add(-delta(i, k), j, h);
  return out;
}

StructureConstantTable build_standard_algebra(StandardAlgebra which) {
  std::vector<GeneratorLabel> gens = {
      {"J23", GeneratorRole::rotation, 1}, {"J31", GeneratorRole::rotation, 2},
      {"J12", GeneratorRole::rotation, 3}, {"X1", GeneratorRole::position, 1},
      {"X2", GeneratorRole::position, 2},  {"X3", GeneratorRole::position, 3},
      {"P1", GeneratorRole::momentum, 1},  {"P2", GeneratorRole::momentum, 2},
      {"P3", GeneratorRole::momentum, 3},  {"I", GeneratorRole::central, 0},
  };
  if (which == StandardAlgebra::HR3_with_H) gens.push_back({"H", GeneratorRole::hamiltonian, 0});
  StructureConstantTable table(std::string(to_string(which)), std::move(gens));

  constexpr int pairs[3][2] = {{2, 3}, {3, 1}, {1, 2}};
  const auto J = [](int dual) { return static_cast<std::size_t>(dual - 1); };
  const auto X = [](int i) { return static_cast<std::size_t>(2 + i); };
  const auto P = [](int i) { return static_cast<std::size_t>(5 + i); };
  const std::size_t I = 9;

  for (int a = 1; a <= 3; ++a) {
    const int i = pairs[a - 1][0];
    const int j = pairs[a - 1][1];
    // The printed four-index J-J bracket, taken with the J-X and J-P brackets
    // as printed, violates the Jacobi identity; its overall sign is reversed
    // here so that all three hold together.
    for (int b = a + 1; b <= 3; ++b) {
      const Eigen::Vector3d rhs = -four_index_rotation_bracket(i, j, pairs[b - 1][0], pairs[b - 1][1]);
      Terms terms;
      for (int d = 1; d <= 3; ++d)
        if (rhs[d - 1] != 0.0) terms.push_back({J(d), rhs[d - 1], 0});
      table.set_bracket(J(a), J(b), terms);
    }
    // [J_ij, T_k] = i (delta_jk T_i - delta_ik T_j) for T = X, P
    for (int k = 1; k <= 3; ++k) {
      Terms xs, ps;
      if (delta(j, k)) {
        xs.push_back({X(i), 1.0, 0});
        ps.push_back({P(i), 1.0, 0});
      }
      if (delta(i, k)) {
        xs.push_back({X(j), -1.0, 0});
        ps.push_back({P(j), -1.0, 0});
      }
      table.set_bracket(J(a), X(k), xs);
      table.set_bracket(J(a), P(k), ps);
    }
  }
  for (int i = 1; i <= 3; ++i) table.set_bracket(X(i), P(i), {{I, 1.0, 0}});
  if (which == StandardAlgebra::HR3_with_H) {
    const std::size_t H = 10;
    for (int i = 1; i <= 3; ++i) table.set_bracket(X(i), H, {{P(i), -1.0, 0}});
  }
  return table;
}

StructureConstantTable build_standard_algebra(std::string_view name) {
  return build_standard_algebra(parse_standard_algebra(name));
}

Eigen::VectorXd bracket(const StructureConstantTable& table, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& v, double eps) {
  const auto n = static_cast<Eigen::Index>(table.dimension());
  if (u.size() != n || v.size() != n)
    throw std::invalid_argument("coefficient vectors must have the algebra dimension");
  if (eps < 0.0) throw std::invalid_argument("eps must be non-negative");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (u[a] == 0.0) continue;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (v[b] == 0.0) continue;
      for (const auto& t : table.entry(a, b)) {
        const double scale = t.eps_power == 0 ? 1.0 : std::pow(eps, t.eps_power);
        out[static_cast<Eigen::Index>(t.generator)] += u[a] * v[b] * t.coefficient * scale;
      }
    }
  }
  return out;
}

VerificationReport verify_algebra(const StructureConstantTable& table,
                                  const std::vector<double>& eps_samples) {
  if (eps_samples.empty()) throw std::invalid_argument("need at least one eps sample");
  VerificationReport report;
  report.eps_samples = eps_samples;
  const auto n = static_cast<Eigen::Index>(table.dimension());
  for (double eps : eps_samples) {
    if (eps < 0.0) throw std::invalid_argument("eps samples must be non-negative");
    const auto f = table.dense_at(eps);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        report.antisymmetry_max =
            std::max(report.antisymmetry_max, (f[a].row(b) + f[b].row(a)).cwiseAbs().maxCoeff());
    // [T_a, [T_b, T_c]] = i^2 f_bc^d f_ad^e T_e; summing the cyclic triple must vanish.
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        for (Eigen::Index c = 0; c < n; ++c) {
          const Eigen::RowVectorXd s =
              f[b].row(c) * f[a] + f[c].row(a) * f[b] + f[a].row(b) * f[c];
          report.jacobi_max = std::max(report.jacobi_max, s.cwiseAbs().maxCoeff());
        }
  }
  return report;
}

double symbolic_jacobi_max(const StructureConstantTable& table) {
  const auto n = table.dimension();
  double worst = 0.0;
  // (image generator, eps power) -> coefficient
  std::map<std::pair<std::size_t, int>, double> sum;
  auto nested = [&](std::size_t a, std::size_t b, std::size_t c) {
    for (const auto& inner : table.entry(b, c))
      for (const auto& outer : table.entry(a, inner.generator))
        sum[{outer.generator, inner.eps_power + outer.eps_power}] += inner.coefficient * outer.coefficient;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        sum.clear();
        nested(a, b, c);
        nested(b, c, a);
        nested(c, a, b);
        for (const auto& [key, value] : sum) worst = std::max(worst, std::abs(value));
      }
  return worst;
}

ContractionFamily::ContractionFamily(StructureConstantTable base, std::vector<Weight> weights)
    : base_(std::move(base)), weights_(std::move(weights)), symbolic_(base_) {
  const auto n = base_.dimension();
  if (weights_.size() != n) throw std::invalid_argument("one weight per generator required");
  std::vector<GeneratorLabel> rescaled = base_.generators();
  for (std::size_t a = 0; a < n; ++a) {
    if (weights_[a] < Weight(0)) throw std::invalid_argument("contraction weights must be non-negative");
    if (weights_[a] != Weight(0)) rescaled[a].name += "^c";
  }
  StructureConstantTable table(base_.name() + "_contracted", rescaled);
  // [T_a^c, T_b^c] = k^-(w_a + w_b - w_c) [..] T_c^c, i.e. eps^((w_a + w_b - w_c)/2).
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      Terms terms;
      for (const auto& t : base_.entry(a, b)) {
        const Weight shift = (weights_[a] + weights_[b] - weights_[t.generator]) / 2;
        if (shift.denominator() != 1 || shift < Weight(0))
          throw std::invalid_argument("family is not contractible: bracket [" + base_.generator(a).name +
                                      ", " + base_.generator(b).name + "] picks up eps^" +
                                      std::to_string(shift.numerator()) + "/" +
                                      std::to_string(shift.denominator()));
        terms.push_back({t.generator, t.coefficient, t.eps_power + shift.numerator()});
      }
      table.set_entry_unmirrored(a, b, std::move(terms));
    }
  }
  symbolic_ = std::move(table);
}

ContractionFamily standard_contraction(const StructureConstantTable& base) {
  std::vector<Weight> weights;
  for (const auto& g : base.generators()) {
    const bool scaled = g.role == GeneratorRole::position || g.role == GeneratorRole::momentum;
    weights.emplace_back(scaled ? 1 : 0);
  }
  return ContractionFamily(base, std::move(weights));
}

StructureConstantTable apply_contraction(const ContractionFamily& family, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("contraction parameter k must be >= 1");
  if (std::isinf(k)) return limit_algebra(family);
  return family.symbolic().evaluated_at(1.0 / (k * k));
}

StructureConstantTable limit_algebra(const ContractionFamily& family) {
  return family.symbolic().evaluated_at(0.0);
}

nlohmann::json to_json(const StructureConstantTable& table) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : table.generators()) gens.push_back(g.name);
  nlohmann::json brackets = nlohmann::json::array();
  const auto n = table.dimension();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& e = table.entry(a, b);
      if (e.empty()) continue;
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : e)
        terms.push_back({{"gen", table.generator(t.generator).name},
                         {"coeff", t.coefficient},
                         {"eps_power", t.eps_power}});
      brackets.push_back({{"a", table.generator(a).name}, {"b", table.generator(b).name}, {"terms", terms}});
    }
  return {{"name", table.name()}, {"generators", gens}, {"brackets", brackets}};
}

StructureConstantTable table_from_json(const nlohmann::json& j) {
  try {
    std::vector<GeneratorLabel> gens;
    for (const auto& g : j.at("generators")) {
      GeneratorLabel label;
      label.name = g.get<std::string>();
      label.role = role_from_name(label.name, label.spatial_index);
      gens.push_back(std::move(label));
    }
    StructureConstantTable table(j.value("name", std::string("custom")), std::move(gens));
    for (const auto& br : j.at("brackets")) {
      const auto a = table.index_of(br.at("a").get<std::string>());
      const auto b = table.index_of(br.at("b").get<std::string>());
      if (a >= b) throw std::invalid_argument("bracket entries must list the a < b half only");
      Terms terms;
      for (const auto& t : br.at("terms"))
        terms.push_back({table.index_of(t.at("gen").get<std::string>()), t.at("coeff").get<double>(),
                         t.value("eps_power", 0)});
      table.set_bracket(a, b, std::move(terms));
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed algebra file: ") + e.what());
  }
}

nlohmann::json to_json(const VerificationReport& report) {
  return {{"antisymmetry_max", report.antisymmetry_max},
          {"jacobi_max", report.jacobi_max},
          {"eps_samples", report.eps_samples}};
}

}  // namespace qspace::lie
