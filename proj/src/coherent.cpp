#include "qspace/hilbert.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace qspace::hilbert {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_label_fits(const FockSpace& space, const WeylLabel& w) {
  for (int m = space.modes(); m < 3; ++m)
    if (w.p[m] != 0.0 || w.x[m] != 0.0)
      throw std::invalid_argument("label has components beyond the space's " + std::to_string(space.modes()) +
                                  " mode(s)");
}

Eigen::VectorXcd single_mode_coherent(int cutoff, double p, double x) {
  const Complex alpha = Complex(x, p) / std::sqrt(2.0);
  Eigen::VectorXcd c(cutoff + 1);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

void require_same_shape(const StateVector& a, const StateVector& b) {
  if (a.backend != b.backend) throw std::invalid_argument("states live on different backends");
  if (a.coefficients.size() != b.coefficients.size())
    throw std::invalid_argument("states have different dimensions");
  if (a.backend == Backend::fock && (a.modes != b.modes || a.cutoff != b.cutoff))
    throw std::invalid_argument("states belong to different Fock spaces");
  if (a.backend == Backend::grid && a.grid_spacing != b.grid_spacing)
    throw std::invalid_argument("states belong to different grids");
}

Eigen::MatrixXcd kron_modes(const std::vector<Eigen::MatrixXcd>& factors) {
  Eigen::MatrixXcd out = factors.front();
  for (std::size_t m = 1; m < factors.size(); ++m) {
    Eigen::MatrixXcd next = Eigen::kroneckerProduct(out, factors[m]);
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::string_view to_string(Backend b) { return b == Backend::fock ? "fock" : "grid"; }

Backend parse_backend(std::string_view name) {
  if (name == "fock") return Backend::fock;
  if (name == "grid") return Backend::grid;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected fock or grid)");
}

double StateVector::norm() const {
  const double sq = coefficients.squaredNorm();
  return std::sqrt(backend == Backend::grid ? sq * grid_spacing : sq);
}

double mean_occupation(const WeylLabel& w) {
  double worst = 0.0;
  for (int m = 0; m < 3; ++m) worst = std::max(worst, 0.5 * (w.x[m] * w.x[m] + w.p[m] * w.p[m]));
  return worst;
}

int required_cutoff(const WeylLabel& w) {
  return std::max(2, static_cast<int>(std::ceil(4.0 * mean_occupation(w))));
}

StateVector coherent_state(const FockSpace& space, const WeylLabel& w) {
  require_label_fits(space, w);
  const double occupation = mean_occupation(w);
  if (occupation > 0.25 * space.cutoff()) {
    const int need = required_cutoff(w);
    throw TruncationGuardError("coherent label with mean occupation " + std::to_string(occupation) +
                                   " exceeds cutoff/4; use cutoff >= " + std::to_string(need),
                               need);
  }
  std::vector<Eigen::MatrixXcd> factors;
  for (int m = 0; m < space.modes(); ++m) factors.emplace_back(single_mode_coherent(space.cutoff(), w.p[m], w.x[m]));
  StateVector s;
  s.backend = Backend::fock;
  s.coefficients = std::exp(kI * w.theta) * kron_modes(factors).col(0);
  s.label = w;
  s.truncation_tail = std::max(0.0, 1.0 - s.coefficients.squaredNorm());
  s.modes = space.modes();
  s.cutoff = space.cutoff();
  return s;
}

StateVector fock_vacuum(const FockSpace& space) { return coherent_state(space, WeylLabel{}); }

Complex overlap(const StateVector& s1, const StateVector& s2) {
  require_same_shape(s1, s2);
  const Complex raw = s1.coefficients.dot(s2.coefficients);
  return s1.backend == Backend::grid ? raw * s1.grid_spacing : raw;
}

Complex overlap_closed_form(const WeylLabel& bra, const WeylLabel& ket) {
  const double symplectic = bra.x.dot(ket.p) - bra.p.dot(ket.x);
  const double distance = (bra.x - ket.x).squaredNorm() + (bra.p - ket.p).squaredNorm();
  return std::exp(kI * (0.5 * symplectic + ket.theta - bra.theta)) * std::exp(-0.25 * distance);
}

Complex matrix_element_closed_form(Observable o, const WeylLabel& bra, const WeylLabel& ket) {
  const int m = o.mode;
  if (m < 0 || m > 2) throw std::out_of_range("observable index out of range");
  const Complex prefactor = o.kind == ObservableKind::position
                                ? Complex(bra.x[m] + ket.x[m], -(bra.p[m] - ket.p[m])) / 2.0
                                : Complex(bra.p[m] + ket.p[m], bra.x[m] - ket.x[m]) / 2.0;
  return prefactor * overlap_closed_form(bra, ket);
}

MatrixElement matrix_element(const FockSpace& space, Observable o, const StateVector& bra, const StateVector& ket) {
  require_same_shape(bra, ket);
  if (bra.backend != Backend::fock || bra.coefficients.size() != space.dimension())
    throw std::invalid_argument("matrix elements are evaluated on Fock states of this space");
  const auto& op = o.kind == ObservableKind::position ? space.position(o.mode) : space.momentum(o.mode);
  MatrixElement out;
  out.numeric = bra.coefficients.dot(op * ket.coefficients);
  if (bra.label && ket.label) {
    out.closed_form = matrix_element_closed_form(o, *bra.label, *ket.label);
    const double scale = std::max(std::abs(*out.closed_form), std::abs(overlap_closed_form(*bra.label, *ket.label)));
    out.relative_error = std::abs(out.numeric - *out.closed_form) / scale;
  }
  return out;
}

Eigen::MatrixXcd weyl_unitary(const FockSpace& space, const WeylLabel& w, WeylForm form) {
  require_label_fits(space, w);
  const FockSpace mode(1, space.cutoff());
  const Eigen::MatrixXcd x = Eigen::MatrixXcd(mode.position(0));
  const Eigen::MatrixXcd p = Eigen::MatrixXcd(mode.momentum(0));
  std::vector<Eigen::MatrixXcd> factors;
  for (int m = 0; m < space.modes(); ++m) {
    if (form == WeylForm::single_exponential) {
      factors.push_back(linalg::expm(Eigen::MatrixXcd(kI * (w.p[m] * x - w.x[m] * p))));
    } else {
      factors.push_back(linalg::expm(Eigen::MatrixXcd(-kI * w.x[m] * p)) *
                        linalg::expm(Eigen::MatrixXcd(kI * w.p[m] * x)));
    }
  }
  const Complex phase = form == WeylForm::single_exponential
                            ? std::exp(kI * w.theta)
                            : std::exp(kI * (0.5 * w.x.dot(w.p))) * std::exp(kI * w.theta);
  return phase * kron_modes(factors);
}

Eigen::VectorXcd apply_weyl(const FockSpace& space, const WeylLabel& w, WeylForm form, const Eigen::VectorXcd& v) {
  require_label_fits(space, w);
  if (v.size() != space.dimension()) throw std::invalid_argument("state dimension does not match the Fock space");
  SparseOperator px(space.dimension(), space.dimension());
  SparseOperator xp(space.dimension(), space.dimension());
  for (int m = 0; m < space.modes(); ++m) {
    px += w.p[m] * space.position(m);
    xp += w.x[m] * space.momentum(m);
  }
  if (form == WeylForm::single_exponential) {
    const SparseOperator g = kI * (px - xp);
    return std::exp(kI * w.theta) * linalg::expm_apply(g, v);
  }
  const SparseOperator gx = kI * px;
  const SparseOperator gp = -kI * xp;
  const Complex phase = std::exp(kI * (0.5 * w.x.dot(w.p) + w.theta));
  return phase * linalg::expm_apply(gp, linalg::expm_apply(gx, v));
}

Eigen::VectorXcd apply_rotation(const FockSpace& space, const Eigen::Vector3d& omega, const Eigen::VectorXcd& v) {
  if (v.size() != space.dimension()) throw std::invalid_argument("state dimension does not match the Fock space");
  SparseOperator g(space.dimension(), space.dimension());
  for (int d = 0; d < 3; ++d) g += omega[d] * space.rotation_generator(d);
  const SparseOperator generator = -kI * g;
  return linalg::expm_apply(generator, v);
}

nlohmann::json to_json(const StateVector& s) {
  nlohmann::json coefficients = nlohmann::json::array();
  for (Eigen::Index n = 0; n < s.coefficients.size(); ++n)
    coefficients.push_back({s.coefficients[n].real(), s.coefficients[n].imag()});
  nlohmann::json j = {{"backend", std::string(to_string(s.backend))},
                      {"labels", s.label ? to_json(*s.label) : nlohmann::json(nullptr)},
                      {"truncation_tail", s.truncation_tail},
                      {"coefficients", coefficients}};
  if (s.backend == Backend::fock) {
    j["modes"] = s.modes;
    j["cutoff"] = s.cutoff;
  } else {
    j["grid_spacing"] = s.grid_spacing;
  }
  return j;
}

}  // namespace qspace::hilbert
