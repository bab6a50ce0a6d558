#include "qspace/coset_rep.hpp"

#include "qspace/matrix_exp.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qspace {

nlohmann::json to_json(const WeylLabel& w) {
  return {{"p", {w.p[0], w.p[1], w.p[2]}}, {"x", {w.x[0], w.x[1], w.x[2]}}, {"theta", w.theta}};
}

namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j, const char* field) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  if (!j.contains(field)) return v;
  const auto& a = j.at(field);
  if (a.is_number()) {
    v[0] = a.get<double>();
    return v;
  }
  if (!a.is_array() || a.size() > 3) throw std::invalid_argument(std::string("field '") + field + "' must be a number or up to 3 numbers");
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

WeylLabel weyl_label_from_json(const nlohmann::json& j) {
  try {
    return {vec3_from_json(j, "p"), vec3_from_json(j, "x"), j.value("theta", 0.0)};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed Weyl label: ") + e.what());
  }
}

}  // namespace qspace

namespace qspace::coset {

std::string_view to_string(CosetKind kind) { return kind == CosetKind::phase ? "phase" : "config"; }

CosetKind parse_coset_kind(std::string_view name) {
  if (name == "phase") return CosetKind::phase;
  if (name == "config") return CosetKind::config;
  throw std::invalid_argument("unknown coset kind '" + std::string(name) + "'");
}

int matrix_size(CosetKind kind) { return kind == CosetKind::phase ? 8 : 5; }
int coordinate_count(CosetKind kind) { return matrix_size(kind) - 1; }

Eigen::Matrix3d AlgebraParams::omega_matrix() const {
  Eigen::Matrix3d w;
  w << 0.0, omega[2], -omega[1],
      -omega[2], 0.0, omega[0],
      omega[1], -omega[0], 0.0;
  return w;
}

AlgebraParams params_from_coefficients(const Eigen::VectorXd& c) {
  if (c.size() != 10) throw std::invalid_argument("expected a 10-component HR3 coefficient vector");
  AlgebraParams params;
  params.omega = c.segment<3>(0);
  params.pbar = -c.segment<3>(3);
  params.xbar = c.segment<3>(6);
  params.thetabar = -c[9];
  return params;
}

Eigen::Matrix3d axis_angle_rotation(const Eigen::Vector3d& axis, double angle) {
  if (axis.norm() == 0.0) throw std::invalid_argument("rotation axis must be non-zero");
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Eigen::MatrixXd algebra_matrix(CosetKind kind, const AlgebraParams& params) {
  const Eigen::Matrix3d w = params.omega_matrix();
  if (kind == CosetKind::phase) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 8);
    m.block<3, 3>(0, 0) = w;
    m.block<3, 3>(3, 3) = w;
    m.block<3, 1>(0, 7) = params.pbar;
    m.block<3, 1>(3, 7) = params.xbar;
    m.block<1, 3>(6, 0) = -0.5 * params.xbar.transpose();
    m.block<1, 3>(6, 3) = 0.5 * params.pbar.transpose();
    m(6, 7) = params.thetabar;
    return m;
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 5);
  m.block<3, 3>(0, 0) = w;
  m.block<3, 1>(0, 4) = params.xbar;
  m.block<1, 3>(3, 0) = params.pbar.transpose();
  m(3, 4) = params.thetabar;
  return m;
}

namespace {

Eigen::VectorXd homogeneous(CosetKind kind, const Eigen::VectorXd& point) {
  if (point.size() != coordinate_count(kind))
    throw std::invalid_argument("coset point has " + std::to_string(point.size()) + " coordinates, expected " +
                                std::to_string(coordinate_count(kind)));
  Eigen::VectorXd h(point.size() + 1);
  h << point, 1.0;
  return h;
}

void require_rotation(const Eigen::Matrix3d& r) {
  const double orth = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(orth <= 1e-12) || r.determinant() < 0.0)
    throw std::invalid_argument("rotation must be orthogonal with determinant 1 (deviation " +
                                std::to_string(orth) + ")");
}

}  // namespace

Eigen::VectorXd infinitesimal_action(CosetKind kind, const AlgebraParams& params,
                                     const Eigen::VectorXd& point) {
  const Eigen::VectorXd d = algebra_matrix(kind, params) * homogeneous(kind, point);
  return d.head(point.size());
}

CosetMatrix group_element(CosetKind kind, const WeylLabel& w, const Eigen::Matrix3d& rotation) {
  require_rotation(rotation);
  if (kind == CosetKind::phase) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(8, 8);
    m.block<3, 3>(0, 0) = rotation;
    m.block<3, 3>(3, 3) = rotation;
    m.block<3, 1>(0, 7) = w.p;
    m.block<3, 1>(3, 7) = w.x;
    m.block<1, 3>(6, 0) = -0.5 * w.x.transpose() * rotation;
    m.block<1, 3>(6, 3) = 0.5 * w.p.transpose() * rotation;
    m(6, 7) = w.theta;
    return {kind, m};
  }
  // exp of the config algebra matrix squares to a single (theta, 1) entry p.x.
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 4) = w.x;
  m.block<1, 3>(3, 0) = w.p.transpose() * rotation;
  m(3, 4) = w.theta + 0.5 * w.p.dot(w.x);
  return {kind, m};
}

std::optional<WeylLabel> extract_weyl_label(const CosetMatrix& g, double tolerance) {
  const auto& m = g.entries;
  const int n = matrix_size(g.kind);
  if (m.rows() != n || m.cols() != n) throw std::invalid_argument("coset matrix has the wrong shape");
  WeylLabel w;
  if (g.kind == CosetKind::phase) {
    const double off = std::max((m.block<3, 3>(0, 0) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(),
                                (m.block<3, 3>(3, 3) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    if (off > tolerance) return std::nullopt;
    w.p = m.block<3, 1>(0, 7);
    w.x = m.block<3, 1>(3, 7);
    w.theta = m(6, 7);
    return w;
  }
  if ((m.block<3, 3>(0, 0) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tolerance) return std::nullopt;
  w.x = m.block<3, 1>(0, 4);
  w.p = m.block<1, 3>(3, 0).transpose();
  w.theta = m(3, 4) - 0.5 * w.p.dot(w.x);
  return w;
}

Composition compose(const CosetMatrix& left, const CosetMatrix& right) {
  if (left.kind != right.kind) throw std::invalid_argument("cannot compose elements of different coset kinds");
  Composition out;
  out.product = {left.kind, left.entries * right.entries};
  const auto wl = extract_weyl_label(left);
  const auto wr = extract_weyl_label(right);
  if (wl && wr) {
    out.product_label = extract_weyl_label(out.product);
    out.formula_label = compose_labels(*wl, *wr);
    out.max_abs_diff =
        (out.product.entries - group_element(left.kind, *out.formula_label).entries).cwiseAbs().maxCoeff();
  }
  return out;
}

ContractionScale ContractionScale::finite(double k) {
  if (!(k >= 1.0) || std::isinf(k)) throw std::invalid_argument("contraction parameter k must be finite and >= 1");
  ContractionScale s;
  s.k_ = k;
  s.infinite_ = false;
  return s;
}

double ContractionScale::k() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : k_;
}

Eigen::VectorXd contracted_action(CosetKind kind, const AlgebraParams& params_c,
                                  const Eigen::VectorXd& point_c, ContractionScale scale) {
  const Eigen::VectorXd h = homogeneous(kind, point_c);
  const Eigen::Matrix3d w = params_c.omega_matrix();
  const double coupling = scale.inverse_k_squared();
  Eigen::VectorXd d(point_c.size());
  if (kind == CosetKind::phase) {
    const Eigen::Vector3d p = h.segment<3>(0);
    const Eigen::Vector3d x = h.segment<3>(3);
    d.segment<3>(0) = w * p + params_c.pbar;
    d.segment<3>(3) = w * x + params_c.xbar;
    d[6] = params_c.thetabar;
    if (!scale.is_infinite()) d[6] += 0.5 * coupling * (params_c.pbar.dot(x) - params_c.xbar.dot(p));
    return d;
  }
  const Eigen::Vector3d x = h.segment<3>(0);
  d.segment<3>(0) = w * x + params_c.xbar;
  d[3] = params_c.thetabar;
  if (!scale.is_infinite()) d[3] += coupling * params_c.pbar.dot(x);
  return d;
}

CosetMatrix exp_algebra(CosetKind kind, const AlgebraParams& params) {
  return {kind, linalg::expm(algebra_matrix(kind, params))};
}

nlohmann::json to_json(const AlgebraParams& params) {
  const auto v = [](const Eigen::Vector3d& a) { return nlohmann::json{a[0], a[1], a[2]}; };
  return {{"omega", v(params.omega)}, {"pbar", v(params.pbar)}, {"xbar", v(params.xbar)},
          {"thetabar", params.thetabar}};
}

AlgebraParams algebra_params_from_json(const nlohmann::json& j) {
  try {
    AlgebraParams params;
    auto read = [&j](const char* field, Eigen::Vector3d& out) {
      if (!j.contains(field)) return;
      const auto& a = j.at(field);
      if (!a.is_array() || a.size() != 3) throw std::invalid_argument(std::string("field '") + field + "' needs 3 numbers");
      for (int i = 0; i < 3; ++i) out[i] = a[static_cast<std::size_t>(i)].get<double>();
    };
    read("omega", params.omega);
    read("pbar", params.pbar);
    read("xbar", params.xbar);
    params.thetabar = j.value("thetabar", 0.0);
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed algebra parameters: ") + e.what());
  }
}

}  // namespace qspace::coset
