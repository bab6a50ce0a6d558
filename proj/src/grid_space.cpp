#include "qspace/hilbert.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <vector>

namespace qspace::hilbert {

namespace {

constexpr Complex kI(0.0, 1.0);

void require_grid_state(const GridSpace& grid, const StateVector& s) {
  if (s.backend != Backend::grid || s.coefficients.size() != grid.points())
    throw std::invalid_argument("state is not sampled on this grid");
}

double max_wavenumber(const GridSpace& grid) { return std::numbers::pi / grid.spacing(); }

}  // namespace

GridSpace::GridSpace(double extent, int points) : extent_(extent), points_(points) {
  if (!(extent > 0.0)) throw std::invalid_argument("grid extent must be positive");
  if (points < 2 || points % 2 != 0) throw std::invalid_argument("grid point count must be even and >= 2");
  spacing_ = 2.0 * extent / points;
  positions_.resize(points);
  wavenumbers_.resize(points);
  const double dk = 2.0 * std::numbers::pi / (points * spacing_);
  for (int m = 0; m < points; ++m) {
    positions_[m] = -extent + m * spacing_;
    wavenumbers_[m] = dk * (m < points / 2 ? m : m - points);
  }
}

double GridSpace::position(int m) const {
  if (m < 0 || m >= points_) throw std::out_of_range("grid index out of range");
  return positions_[m];
}

StateVector grid_coherent_state(const GridSpace& grid, double p, double x, double theta) {
  if (std::abs(x) + kGridMargin > grid.extent())
    throw std::invalid_argument("position label " + std::to_string(x) + " too close to the grid edge (extent " +
                                std::to_string(grid.extent()) + ")");
  if (std::abs(p) + kGridMargin > max_wavenumber(grid))
    throw std::invalid_argument("momentum label " + std::to_string(p) + " beyond the grid's resolvable band");
  const double norm = std::pow(std::numbers::pi, -0.25);
  StateVector s;
  s.backend = Backend::grid;
  s.grid_spacing = grid.spacing();
  s.coefficients.resize(grid.points());
  for (int m = 0; m < grid.points(); ++m) {
    const double y = grid.positions()[m];
    s.coefficients[m] = norm * std::exp(kI * (theta - 0.5 * p * x + p * y)) * std::exp(-0.5 * (y - x) * (y - x));
  }
  s.label = WeylLabel::one_d(p, x, theta);
  s.truncation_tail = std::abs(1.0 - s.norm() * s.norm());
  return s;
}

Complex grid_position_action(const GridSpace& grid, double p, int index, double theta) {
  return std::exp(kI * (p * grid.position(index) + theta));
}

StateVector apply_position_phase(const GridSpace& grid, const StateVector& s, double p) {
  require_grid_state(grid, s);
  StateVector out = s;
  out.label.reset();
  for (int m = 0; m < grid.points(); ++m) out.coefficients[m] *= std::exp(kI * p * grid.positions()[m]);
  return out;
}

StateVector grid_translate(const GridSpace& grid, const StateVector& s, double shift) {
  require_grid_state(grid, s);
  Eigen::FFT<double> fft;
  const std::vector<Complex> samples(s.coefficients.data(), s.coefficients.data() + s.coefficients.size());
  std::vector<Complex> spectrum;
  fft.fwd(spectrum, samples);
  for (int m = 0; m < grid.points(); ++m) spectrum[static_cast<std::size_t>(m)] *= std::exp(-kI * grid.wavenumbers()[m] * shift);
  std::vector<Complex> shifted;
  fft.inv(shifted, spectrum);
  StateVector out = s;
  out.label.reset();
  for (int m = 0; m < grid.points(); ++m) out.coefficients[m] = shifted[static_cast<std::size_t>(m)];
  return out;
}

CrossValidation cross_validate_backends(const FockSpace& fock, const GridSpace& grid, const WeylLabel& bra,
                                        const WeylLabel& ket) {
  if (fock.modes() != 1) throw std::invalid_argument("backend cross-validation runs in one dimension");
  const StateVector fb = coherent_state(fock, bra);
  const StateVector fk = coherent_state(fock, ket);
  const StateVector gb = grid_coherent_state(grid, bra.p[0], bra.x[0], bra.theta);
  const StateVector gk = grid_coherent_state(grid, ket.p[0], ket.x[0], ket.theta);
  CrossValidation cv;
  cv.fock = overlap(fb, fk);
  cv.grid = overlap(gb, gk);
  cv.closed_form = overlap_closed_form(bra, ket);
  cv.difference = std::abs(cv.fock - cv.grid);
  cv.tolerance = std::sqrt(fb.truncation_tail) + std::sqrt(fk.truncation_tail) + gb.truncation_tail +
                 gk.truncation_tail + 1e-12;
  return cv;
}

}  // namespace qspace::hilbert
