#include "qspace/hilbert.hpp"

#include <cmath>

namespace qspace::hilbert {

namespace {

constexpr Complex kI(0.0, 1.0);

struct Split {
  Eigen::MatrixXd symmetric;      // A
  Eigen::MatrixXd antisymmetric;  // B
};

Split split(const Eigen::MatrixXcd& h) { return {h.real(), h.imag()}; }

struct PhasePoint {
  Eigen::VectorXd q, p;
};

}  // namespace

double hamilton_function(const Eigen::MatrixXcd& h, const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  const Split s = split(h);
  const double expectation = q.dot(s.symmetric * q) + p.dot(s.symmetric * p) + 2.0 * p.dot(s.antisymmetric * q);
  return kHamiltonFactor * expectation;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> hamilton_gradient(const Eigen::MatrixXcd& h, const Eigen::VectorXd& q,
                                                              const Eigen::VectorXd& p) {
  const Split s = split(h);
  const double scale = 2.0 * kHamiltonFactor;
  return {scale * (s.symmetric * q - s.antisymmetric * p), scale * (s.symmetric * p + s.antisymmetric * q)};
}

double calibrate_hamilton_factor(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& state) {
  const Eigen::VectorXcd velocity = -kI * (h * state);
  const Split s = split(h);
  const Eigen::VectorXd q = state.real();
  const Eigen::VectorXd p = state.imag();
  // Hamilton velocity per unit factor: dq = d<H>/dp, dp = -d<H>/dq.
  Eigen::VectorXd unit(2 * q.size());
  unit << 2.0 * (s.symmetric * p + s.antisymmetric * q), -2.0 * (s.symmetric * q - s.antisymmetric * p);
  Eigen::VectorXd target(2 * q.size());
  target << velocity.real(), velocity.imag();
  const double denom = unit.squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("state is stationary with zero energy gradient");
  return unit.dot(target) / denom;
}

Eigen::MatrixXcd harmonic_hamiltonian(const FockSpace& space) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(space.dimension(), space.dimension());
  for (int m = 0; m < space.modes(); ++m) {
    const Eigen::MatrixXcd x = Eigen::MatrixXcd(space.position(m));
    const Eigen::MatrixXcd p = Eigen::MatrixXcd(space.momentum(m));
    h += 0.5 * (p * p + x * x);
  }
  return h;
}

namespace {

Eigen::VectorXcd schroedinger_step(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& c, double dt) {
  auto f = [&h](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return -kI * (h * v); };
  const Eigen::VectorXcd k1 = f(c);
  const Eigen::VectorXcd k2 = f(c + 0.5 * dt * k1);
  const Eigen::VectorXcd k3 = f(c + 0.5 * dt * k2);
  const Eigen::VectorXcd k4 = f(c + dt * k3);
  return c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

PhasePoint hamilton_step(const Eigen::MatrixXcd& h, const PhasePoint& z, double dt) {
  auto f = [&h](const PhasePoint& w) -> PhasePoint {
    auto [dq, dp] = hamilton_gradient(h, w.q, w.p);
    return {dp, -dq};
  };
  auto axpy = [](const PhasePoint& w, double a, const PhasePoint& d) -> PhasePoint {
    return {w.q + a * d.q, w.p + a * d.p};
  };
  const PhasePoint k1 = f(z);
  const PhasePoint k2 = f(axpy(z, 0.5 * dt, k1));
  const PhasePoint k3 = f(axpy(z, 0.5 * dt, k2));
  const PhasePoint k4 = f(axpy(z, dt, k3));
  return {z.q + (dt / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          z.p + (dt / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

Eigen::VectorXcd integrate(const Eigen::MatrixXcd& h, Eigen::VectorXcd c, double dt, long steps) {
  for (long s = 0; s < steps; ++s) c = schroedinger_step(h, c, dt);
  return c;
}

}  // namespace

FlowReport projective_flow_check(const Eigen::MatrixXcd& hamiltonian, const Eigen::VectorXcd& initial,
                                 double t_final, double dt) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() != initial.size())
    throw std::invalid_argument("hamiltonian and state dimensions differ");
  const double herm = (hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) throw std::invalid_argument("hamiltonian is not Hermitian (deviation " + std::to_string(herm) + ")");
  if (std::abs(initial.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state is not normalized");
  if (!(dt > 0.0) || !(t_final >= 0.0)) throw std::invalid_argument("need dt > 0 and t_final >= 0");

  FlowReport report;
  report.steps = std::lround(t_final / dt);
  const double step = report.steps > 0 ? t_final / static_cast<double>(report.steps) : dt;

  Eigen::VectorXcd c = initial;
  PhasePoint z{initial.real(), initial.imag()};
  const double norm0 = initial.squaredNorm();
  const double energy0 = hamilton_function(hamiltonian, z.q, z.p);
  for (long s = 0; s < report.steps; ++s) {
    c = schroedinger_step(hamiltonian, c, step);
    z = hamilton_step(hamiltonian, z, step);
    const Eigen::VectorXcd from_phase_space = z.q.cast<Complex>() + kI * z.p.cast<Complex>();
    report.max_trajectory_deviation = std::max(report.max_trajectory_deviation, (c - from_phase_space).cwiseAbs().maxCoeff());
    report.norm_drift = std::max(report.norm_drift, std::abs(c.squaredNorm() - norm0));
    report.energy_drift = std::max(report.energy_drift, std::abs(hamilton_function(hamiltonian, z.q, z.p) - energy0));
  }
  const Eigen::VectorXcd refined = integrate(hamiltonian, initial, 0.5 * step, 2 * report.steps);
  report.step_halving_error = (refined - c).cwiseAbs().maxCoeff();
  report.final_state = c;
  return report;
}

}  // namespace qspace::hilbert
