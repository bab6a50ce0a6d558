#pragma once

#include <Eigen/Core>
#include <json.hpp>

namespace qspace {

/// Label (p, x, theta) of the Heisenberg-Weyl element exp i(p.X - x.P + theta I).
struct WeylLabel {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  double theta = 0.0;

  static WeylLabel one_d(double p, double x, double theta = 0.0) {
    WeylLabel w;
    w.p[0] = p;
    w.x[0] = x;
    w.theta = theta;
    return w;
  }

  WeylLabel inverse() const { return {-p, -x, -theta}; }
};

/// Closed-form group law
///   W(p', x', t') W(p, x, t) = W(p' + p, x' + x, t' + t - (x'.p - p'.x) / 2).
inline WeylLabel compose_labels(const WeylLabel& left, const WeylLabel& right) {
  return {left.p + right.p, left.x + right.x,
          left.theta + right.theta - 0.5 * (left.x.dot(right.p) - left.p.dot(right.x))};
}

inline double max_abs_diff(const WeylLabel& a, const WeylLabel& b) {
  return std::max({(a.p - b.p).cwiseAbs().maxCoeff(), (a.x - b.x).cwiseAbs().maxCoeff(),
                   std::abs(a.theta - b.theta)});
}

nlohmann::json to_json(const WeylLabel& w);
WeylLabel weyl_label_from_json(const nlohmann::json& j);

}  // namespace qspace
