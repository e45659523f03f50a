#include "bikegeo/frenet.hpp"

#include <limits>
#include <memory>

namespace bikegeo {

namespace {

double det3(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return a.dot(b.cross(c));
}

}  // namespace

FrenetData frenet_data(const Curve& c) {
  const int m = c.unique_count();
  const int n = c.dimension;
  if (n != 2 && n != 3)
    throw std::invalid_argument("frenet_data: dimension must be 2 or 3");

  FrenetData fd;
  fd.dimension = n;
  fd.closed = c.closed;
  fd.h = c.step();
  fd.params = c.params.head(m);

  const Eigen::MatrixXd pts = c.unique_points();
  const Eigen::MatrixXd d1 = fd_derivative(pts, fd.h, 1, c.closed);
  const Eigen::MatrixXd d2 = fd_derivative(pts, fd.h, 2, c.closed);

  // Arclength precondition: frame formulas below assume |d1| = 1.
  for (int i = 0; i < m; ++i) {
    if (std::abs(d1.row(i).norm() - 1.0) > 1e-4)
      throw std::invalid_argument("frenet_data: curve is not arclength parametrized");
  }

  fd.tangent.resize(m, n);
  fd.normal.resize(m, n);
  fd.curvature.resize(m);

  if (n == 2) {
    for (int i = 0; i < m; ++i) {
      Eigen::Vector2d v = d1.row(i).normalized();
      Eigen::Vector2d nor(-v[1], v[0]);  // positively oriented frame
      fd.tangent.row(i) = v;
      fd.normal.row(i) = nor;
      fd.curvature[i] = d2.row(i).dot(nor);
    }
  } else {
    const Eigen::MatrixXd d3 = fd_derivative(pts, fd.h, 3, c.closed);
    fd.binormal.resize(m, 3);
    fd.torsion.resize(m);
    fd.torsion_valid.assign(m, 1);
    fd.darboux.resize(m, 3);
    const double kappa_floor = 1e-8 / fd.h;
    for (int i = 0; i < m; ++i) {
      Eigen::Vector3d v = d1.row(i).normalized();
      Eigen::Vector3d acc = d2.row(i);
      double kappa = acc.norm();
      fd.curvature[i] = kappa;
      if (kappa < kappa_floor) {
        fd.torsion_valid[i] = 0;
        fd.torsion[i] = std::numeric_limits<double>::quiet_NaN();
        fd.normal.row(i).setZero();
        fd.binormal.row(i).setZero();
        fd.darboux.row(i).setZero();
        continue;
      }
      Eigen::Vector3d nor = acc / kappa;
      Eigen::Vector3d bin = v.cross(nor);
      fd.tangent.row(i) = v;
      fd.normal.row(i) = nor;
      fd.binormal.row(i) = bin;
      double tau = det3(d1.row(i), acc, d3.row(i)) / (kappa * kappa);
      fd.torsion[i] = tau;
      fd.darboux.row(i) = Eigen::Vector3d(tau, 0.0, kappa);
    }
  }

  // Continuous kappa/tau for the moving-frame integrators.
  if (c.jet.valid()) {
    auto curve = std::make_shared<Curve>(c);
    if (n == 2) {
      fd.kappa_at = [curve](double t) {
        Eigen::Vector2d v = curve->velocity(t), a = curve->acceleration(t);
        double sp = v.norm();
        return (v[0] * a[1] - v[1] * a[0]) / (sp * sp * sp);
      };
      fd.tau_at = [](double) { return 0.0; };
    } else {
      fd.kappa_at = [curve](double t) {
        Eigen::Vector3d v = curve->velocity(t), a = curve->acceleration(t);
        double sp = v.norm();
        return v.cross(a).norm() / (sp * sp * sp);
      };
      fd.tau_at = [curve](double t) {
        Eigen::Vector3d v = curve->velocity(t), a = curve->acceleration(t);
        Eigen::Vector3d j = curve->jerk(t);
        Eigen::Vector3d w = v.cross(a);
        return w.dot(j) / w.squaredNorm();
      };
    }
  } else {
    std::vector<double> xs(m + 1), kv(m + 1), tv(m + 1);
    for (int i = 0; i < m; ++i) {
      xs[i] = fd.params[i];
      kv[i] = fd.curvature[i];
      tv[i] = (n == 3 && fd.torsion_valid[i]) ? fd.torsion[i] : 0.0;
    }
    if (c.closed) {
      xs[m] = c.t0() + c.period;
      kv[m] = kv[0];
      tv[m] = tv[0];
    } else {
      xs.pop_back();
      kv.pop_back();
      tv.pop_back();
    }
    auto ks = std::make_shared<CubicSpline>(xs, kv, c.closed);
    auto ts = std::make_shared<CubicSpline>(xs, tv, c.closed);
    fd.kappa_at = [ks](double t) { return (*ks)(t); };
    fd.tau_at = [ts](double t) { return (*ts)(t); };
  }
  return fd;
}

}  // namespace bikegeo
