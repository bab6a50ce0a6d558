#include "qspace/hilbert.hpp"

#include <cmath>
#include <vector>

namespace qspace::hilbert {

namespace {

using Triplet = Eigen::Triplet<Complex>;

double max_abs(const SparseOperator& m) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(m, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

}  // namespace

FockSpace::FockSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
  if (modes != 1 && modes != 3) throw std::invalid_argument("Fock space supports 1 or 3 modes");
  if (cutoff < 2) throw std::invalid_argument("Fock cutoff must be at least 2");
  dimension_ = 1;
  for (int m = 0; m < modes; ++m) dimension_ *= cutoff + 1;

  const Complex i(0.0, 1.0);
  const double r2 = std::sqrt(2.0);
  for (int m = 0; m < modes; ++m) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(dimension_));
    for (Eigen::Index b = 0; b < dimension_; ++b) {
      const int n = occupation(b, m);
      if (n == 0) continue;
      std::vector<int> occ(static_cast<std::size_t>(modes));
      for (int q = 0; q < modes; ++q) occ[static_cast<std::size_t>(q)] = occupation(b, q);
      occ[static_cast<std::size_t>(m)] = n - 1;
      t.emplace_back(basis_index(occ), b, std::sqrt(static_cast<double>(n)));
    }
    SparseOperator a(dimension_, dimension_);
    a.setFromTriplets(t.begin(), t.end());
    SparseOperator ad = a.adjoint();
    lower_.push_back(a);
    raise_.push_back(ad);
    position_.push_back(SparseOperator((a + ad) / r2));
    momentum_.push_back(SparseOperator((a - ad) / (i * r2)));
  }
  if (modes == 3) {
    // (i, j) for J23, J31, J12; J_ij = X_j P_i - X_i P_j.
    constexpr int pairs[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (const auto& pr : pairs) {
      const int a = pr[0];
      const int b = pr[1];
      rotation_.push_back(SparseOperator(position_[b] * momentum_[a] - position_[a] * momentum_[b]));
    }
  }

  for (Eigen::Index b = 0; b < dimension_; ++b) {
    bool safe = true;
    for (int m = 0; m < modes; ++m) safe = safe && occupation(b, m) <= cutoff - 2;
    if (safe) safe_.push_back(b);
  }

  auto herm = [](const SparseOperator& o) { return max_abs(SparseOperator(o - SparseOperator(o.adjoint()))); };
  for (int m = 0; m < modes; ++m)
    diagnostics_.hermiticity_max =
        std::max({diagnostics_.hermiticity_max, herm(position_[m]), herm(momentum_[m])});
  for (const auto& j : rotation_) diagnostics_.hermiticity_max = std::max(diagnostics_.hermiticity_max, herm(j));

  auto below_top = [this](Eigen::Index b) {
    for (int m = 0; m < modes_; ++m)
      if (occupation(b, m) == cutoff_) return false;
    return true;
  };
  for (int p = 0; p < modes; ++p)
    for (int q = 0; q < modes; ++q) {
      SparseOperator c = lower_[p] * raise_[q] - raise_[q] * lower_[p];
      if (p == q) c -= identity();
      for (Eigen::Index k = 0; k < c.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(c, k); it; ++it)
          if (below_top(it.row()) && below_top(it.col()))
            diagnostics_.canonical_commutator_max =
                std::max(diagnostics_.canonical_commutator_max, std::abs(it.value()));
    }
}

int FockSpace::check_mode(int mode) const {
  if (mode < 0 || mode >= modes_) throw std::out_of_range("mode index out of range");
  return mode;
}

const SparseOperator& FockSpace::rotation_generator(int dual) const {
  if (modes_ != 3) throw std::invalid_argument("rotation generators need a three-mode space");
  return rotation_.at(static_cast<std::size_t>(dual));
}

SparseOperator FockSpace::identity() const {
  SparseOperator id(dimension_, dimension_);
  id.setIdentity();
  return id;
}

int FockSpace::occupation(Eigen::Index basis_index, int mode) const {
  Eigen::Index stride = 1;
  for (int m = modes_ - 1; m > mode; --m) stride *= cutoff_ + 1;
  return static_cast<int>((basis_index / stride) % (cutoff_ + 1));
}

Eigen::Index FockSpace::basis_index(const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != modes_) throw std::invalid_argument("one occupation per mode");
  Eigen::Index index = 0;
  for (int n : occupations) {
    if (n < 0 || n > cutoff_) throw std::out_of_range("occupation outside the truncated space");
    index = index * (cutoff_ + 1) + n;
  }
  return index;
}

double FockSpace::top_level_support(const Eigen::VectorXcd& v) const {
  if (v.size() != dimension_) throw std::invalid_argument("state dimension does not match the Fock space");
  double weight = 0.0;
  for (Eigen::Index b = 0; b < dimension_; ++b) {
    bool top = false;
    for (int m = 0; m < modes_; ++m) top = top || occupation(b, m) >= cutoff_ - 1;
    if (top) weight += std::norm(v[b]);
  }
  return weight;
}

FockSpace build_fock_space(int modes, int cutoff) { return FockSpace(modes, cutoff); }

SparseOperator realize_generator(const FockSpace& space, const lie::GeneratorLabel& g) {
  switch (g.role) {
    case lie::GeneratorRole::rotation:
      return space.rotation_generator(g.spatial_index - 1);
    case lie::GeneratorRole::position:
      return space.position(g.spatial_index - 1);
    case lie::GeneratorRole::momentum:
      return space.momentum(g.spatial_index - 1);
    case lie::GeneratorRole::central:
      return space.identity();
    default:
      throw std::invalid_argument("generator '" + g.name + "' has no Fock realization");
  }
}

OperatorCheckReport operator_commutator_check(const FockSpace& space, const lie::StructureConstantTable& table) {
  const Complex i(0.0, 1.0);
  const auto n = table.dimension();
  std::vector<std::optional<SparseOperator>> ops(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto& g = table.generator(a);
    const bool realizable = g.role == lie::GeneratorRole::central ||
                            (g.role == lie::GeneratorRole::rotation && space.modes() == 3) ||
                            ((g.role == lie::GeneratorRole::position || g.role == lie::GeneratorRole::momentum) &&
                             g.spatial_index <= space.modes());
    if (realizable) ops[a] = realize_generator(space, g);
  }
  // Column selector onto the safe subspace.
  const auto& safe = space.safe_indices();
  SparseOperator select(space.dimension(), static_cast<Eigen::Index>(safe.size()));
  {
    std::vector<Eigen::Triplet<Complex>> t;
    for (std::size_t c = 0; c < safe.size(); ++c) t.emplace_back(safe[c], static_cast<Eigen::Index>(c), 1.0);
    select.setFromTriplets(t.begin(), t.end());
  }
  OperatorCheckReport report;
  for (std::size_t a = 0; a < n; ++a) {
    if (!ops[a]) continue;
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!ops[b]) continue;
      SparseOperator d = (*ops[a]) * (*ops[b]) - (*ops[b]) * (*ops[a]);
      bool predictable = true;
      for (const auto& t : table.entry(a, b)) {
        if (!ops[t.generator]) {
          predictable = false;
          break;
        }
        if (t.eps_power != 0) throw std::invalid_argument("evaluate eps-dependent tables before realizing them");
        d -= (i * t.coefficient) * (*ops[t.generator]);
      }
      if (!predictable) continue;
      const double dev = max_abs(SparseOperator(d * select));
      report.brackets.push_back({table.generator(a).name, table.generator(b).name, dev});
      report.max_deviation = std::max(report.max_deviation, dev);
    }
  }
  return report;
}

}  // namespace qspace::hilbert
