#include "bikegeo/bike_dynamics.hpp"

#include <sstream>

#include "bikegeo/io.hpp"

namespace bikegeo {

namespace {

int default_steps(const Curve& front, double t0, double t1) {
  double span = std::abs(t1 - t0);
  double per = front.closed ? front.period : (front.t1() - front.t0());
  int per_period = std::max(2048, 4 * front.unique_count());
  int steps = std::max(64, static_cast<int>(std::ceil(per_period * span / per)));
  return steps + (steps & 1);  // even, for stride-2 refinement passes
}

Eigen::VectorXd bike_rhs(const Curve& front, double ell, double t,
                         const Eigen::VectorXd& r) {
  Eigen::VectorXd v = front.velocity(t);
  return (-v + v.dot(r) * r) / ell;
}

}  // namespace

BikeTrajectory integrate_bicycle_sphere(const Curve& front, double ell,
                                        const Eigen::VectorXd& r0, double t0, double t1,
                                        int steps) {
  if (ell <= 0.0) throw std::invalid_argument("integrate_bicycle_sphere: ell must be > 0");
  if (std::abs(r0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("integrate_bicycle_sphere: r0 must be a unit vector");
  if (steps <= 0) steps = default_steps(front, t0, t1);

  auto rhs = [&](double t, const Eigen::VectorXd& r) { return bike_rhs(front, ell, t, r); };

  BikeTrajectory traj;
  traj.ell = ell;
  double drift = 0.0;
  auto post = [&drift](Eigen::VectorXd r) {
    drift = std::max(drift, std::abs(r.norm() - 1.0));
    r.normalize();
    return r;
  };
  std::vector<Eigen::VectorXd> path = rk4_path(r0, t0, t1, steps, rhs, post);

  traj.t.resize(steps + 1);
  traj.r.resize(steps + 1, front.dimension);
  traj.rear.resize(steps + 1, front.dimension);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i <= steps; ++i) {
    traj.t[i] = t0 + i * h;
    traj.r.row(i) = path[i];
    traj.rear.row(i) = front.position(traj.t[i]) + ell * path[i];
  }
  traj.norm_drift = drift;

  Eigen::VectorXd half = rk4(r0, t0, t1, std::max(steps / 2, 8), rhs,
                             [](Eigen::VectorXd r) { r.normalize(); return r; });
  traj.step_error_est = (half - path.back()).norm() / 15.0;
  return traj;
}

Eigen::VectorXd integrate_direction_flow(const Curve& front, double ell,
                                         const Eigen::VectorXd& x0, double t0, double t1,
                                         int steps) {
  if (ell <= 0.0) throw std::invalid_argument("integrate_direction_flow: ell must be > 0");
  if (steps <= 0) steps = default_steps(front, t0, t1);
  auto rhs = [&](double t, const Eigen::VectorXd& x) { return bike_rhs(front, ell, t, x); };
  return rk4(x0, t0, t1, steps, rhs);
}

// ---------------------------------------------------------------------------
// Projective charts

namespace {

ProjectiveCoord stereographic(const Eigen::VectorXd& comps, Chart chart) {
  ProjectiveCoord pc;
  pc.chart = chart;
  double den = 1.0 + comps[0];
  if (std::abs(den) < 1e-14) {
    pc.at_infinity = true;
    pc.value = cd(1e300, 0.0);
  } else if (comps.size() == 2) {
    pc.value = cd(comps[1] / den, 0.0);
  } else {
    pc.value = cd(comps[1] / den, comps[2] / den);
  }
  return pc;
}

}  // namespace

ProjectiveCoord sphere_to_chart(const Eigen::VectorXd& r, Chart chart) {
  if (chart != Chart::PlanarFixed && chart != Chart::SpatialFixed)
    throw std::invalid_argument("sphere_to_chart: frame charts need chart_init");
  return stereographic(r, chart);
}

ProjectiveCoord chart_init(const Curve& front, const Eigen::VectorXd& r, Chart chart,
                           double t) {
  if (chart == Chart::PlanarFixed || chart == Chart::SpatialFixed)
    return stereographic(r, chart);
  Eigen::VectorXd v = front.velocity(t).normalized();
  if (front.dimension == 2) {
    Eigen::Vector2d nor(-v[1], v[0]);
    Eigen::Vector2d comps(v.dot(r), nor.dot(r));
    return stereographic(comps, chart);
  }
  Eigen::Vector3d vv = v;
  Eigen::Vector3d acc = front.acceleration(t);
  Eigen::Vector3d nor = acc - acc.dot(vv) * vv;
  if (nor.norm() < 1e-12)
    throw std::invalid_argument("chart_init: Frenet frame undefined (kappa ~ 0) at t");
  nor.normalize();
  Eigen::Vector3d bin = vv.cross(nor);
  Eigen::Vector3d comps(vv.dot(r), nor.dot(r), bin.dot(r));
  return stereographic(comps, chart);
}

Eigen::VectorXd chart_to_sphere(const ProjectiveCoord& pc) {
  switch (pc.chart) {
    case Chart::PlanarFixed: {
      double theta = pc.at_infinity ? kPi : 2.0 * std::atan(pc.value.real());
      Eigen::VectorXd r(2);
      r << std::cos(theta), std::sin(theta);
      return r;
    }
    case Chart::SpatialFixed: {
      Eigen::VectorXd r(3);
      if (pc.at_infinity) {
        r << -1.0, 0.0, 0.0;
        return r;
      }
      cd z = pc.value;
      double n2 = std::norm(z);
      r << (1.0 - n2) / (1.0 + n2), 2.0 * z.real() / (1.0 + n2), 2.0 * z.imag() / (1.0 + n2);
      return r;
    }
    default:
      throw std::logic_error("chart_to_sphere: frame charts are integrator-internal");
  }
}

namespace {

// One RK4 Riccati run with chart swapping at |w| > 10. The dynamics in the
// reciprocal chart w -> 1/w follows from the chart-change formulas; `flip`
// encodes the current chart parity.
struct RiccatiRun {
  Eigen::VectorXcd w;         // raw coordinate in the active chart per step
  std::vector<uint8_t> flip;  // parity per step
  int swaps = 0;
};

template <class Rhs>
RiccatiRun riccati_integrate(cd w0, bool flip0, double t0, double t1, int steps, Rhs rhs) {
  RiccatiRun run;
  run.w.resize(steps + 1);
  run.flip.resize(steps + 1);
  cd w = w0;
  bool flip = flip0;
  run.w[0] = w;
  run.flip[0] = flip;
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double t = t0 + i * h;
    cd k1 = rhs(t, w, flip);
    cd k2 = rhs(t + h / 2, w + (h / 2) * k1, flip);
    cd k3 = rhs(t + h / 2, w + (h / 2) * k2, flip);
    cd k4 = rhs(t + h, w + h * k3, flip);
    w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (std::abs(w) > 10.0) {
      w = 1.0 / w;
      flip = !flip;
      ++run.swaps;
    }
    run.w[i + 1] = w;
    run.flip[i + 1] = flip;
  }
  return run;
}

cd to_primary(cd w, bool flip) {
  if (!flip) return w;
  if (std::abs(w) < 1e-300) return cd(1e300, 0.0);
  return 1.0 / w;
}

}  // namespace

RiccatiTrajectory integrate_riccati_planar(const Curve& front, double ell, Chart chart,
                                           const ProjectiveCoord& init, double t0,
                                           double t1, int steps) {
  if (front.dimension != 2)
    throw std::invalid_argument("integrate_riccati_planar: front must be planar");
  if (chart != Chart::PlanarFixed && chart != Chart::PlanarFrame)
    throw std::invalid_argument("integrate_riccati_planar: chart must be a planar chart");
  if (steps <= 0) steps = default_steps(front, t0, t1);

  std::optional<FrenetData> fd;
  if (chart == Chart::PlanarFrame) fd = frenet_data(front);  // throws off-arclength

  auto rhs = [&](double t, cd w, bool flip) -> cd {
    if (chart == Chart::PlanarFixed) {
      Eigen::VectorXd v = front.velocity(t);
      double v1 = flip ? -v[0] : v[0];
      double v2 = v[1];
      return (1.0 / (2.0 * ell)) * (-v2 + 2.0 * v1 * w + v2 * w * w);
    }
    double kap = fd->kappa_at(t);
    double a = flip ? -1.0 / ell : 1.0 / ell;
    double k = flip ? -kap : kap;
    return a * w - (k / 2.0) * (1.0 + w * w);
  };

  cd w0 = init.at_infinity ? cd(0.0, 0.0) : init.value;
  bool flip0 = init.at_infinity;
  if (!init.at_infinity && std::abs(w0) > 10.0) {
    w0 = 1.0 / w0;
    flip0 = true;
  }
  RiccatiRun run = riccati_integrate(w0, flip0, t0, t1, steps, rhs);

  RiccatiTrajectory out;
  out.chart = chart;
  out.swap_count = run.swaps;
  out.t.resize(steps + 1);
  out.coord.resize(steps + 1);
  out.sphere.resize(steps + 1, 2);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i <= steps; ++i) {
    out.t[i] = t0 + i * h;
    double p_raw = run.w[i].real();
    // theta from either chart parity: p = tan(theta/2), 1/p = cot(theta/2).
    double theta = run.flip[i] ? 2.0 * std::atan2(1.0, p_raw) : 2.0 * std::atan(p_raw);
    out.coord[i] = to_primary(run.w[i], run.flip[i]);
    Eigen::Vector2d R(std::cos(theta), std::sin(theta));
    if (chart == Chart::PlanarFrame) {
      Eigen::Vector2d v = front.velocity(out.t[i]).normalized();
      Eigen::Vector2d nor(-v[1], v[0]);
      out.sphere.row(i) = R[0] * v + R[1] * nor;
    } else {
      out.sphere.row(i) = R;
    }
  }
  out.final_coord.chart = chart;
  out.final_coord.value = out.coord[steps];
  out.final_coord.at_infinity = std::abs(out.coord[steps]) > 1e12;
  return out;
}

RiccatiTrajectory integrate_riccati_spatial(const Curve& front, cd ell, Chart chart,
                                            const ProjectiveCoord& init, double t0,
                                            double t1, int steps) {
  if (front.dimension != 3 && chart != Chart::Filament)
    throw std::invalid_argument("integrate_riccati_spatial: front must live in R^3");
  if (chart == Chart::SpatialFixed || chart == Chart::SpatialFrame) {
    if (ell.imag() != 0.0)
      throw std::invalid_argument("integrate_riccati_spatial: only the filament chart "
                                  "accepts an imaginary length");
  }
  if (steps <= 0) steps = default_steps(front, t0, t1);

  std::optional<FrenetData> fd;
  if (chart != Chart::SpatialFixed) fd = frenet_data(front);

  auto rhs = [&](double t, cd w, bool flip) -> cd {
    if (chart == Chart::SpatialFixed) {
      Eigen::VectorXd v = front.velocity(t);
      double v1 = flip ? -v[0] : v[0];
      cd q = flip ? cd(v[1], -v[2]) : cd(v[1], v[2]);
      return (1.0 / (2.0 * ell)) * (-q + 2.0 * v1 * w + std::conj(q) * w * w);
    }
    // Frame chart Z' = (1/ell - i tau) Z - (kappa/2)(1 + Z^2); the filament
    // chart is the same equation at ell = -i eps (Corollary: replace Z by W).
    double kap = fd->kappa_at(t);
    double tau = (front.dimension == 3) ? fd->tau_at(t) : 0.0;
    cd lin = 1.0 / ell - cd(0.0, 1.0) * tau;
    if (flip) return -lin * w + (kap / 2.0) * (1.0 + w * w);
    return lin * w - (kap / 2.0) * (1.0 + w * w);
  };

  cd w0 = init.at_infinity ? cd(0.0, 0.0) : init.value;
  bool flip0 = init.at_infinity;
  if (!init.at_infinity && std::abs(w0) > 10.0) {
    w0 = 1.0 / w0;
    flip0 = true;
  }
  RiccatiRun run = riccati_integrate(w0, flip0, t0, t1, steps, rhs);

  RiccatiTrajectory out;
  out.chart = chart;
  out.swap_count = run.swaps;
  out.t.resize(steps + 1);
  out.coord.resize(steps + 1);
  out.sphere.resize(steps + 1, 3);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i <= steps; ++i) {
    out.t[i] = t0 + i * h;
    out.coord[i] = to_primary(run.w[i], run.flip[i]);
    // Unit sphere components from the active chart; the reciprocal chart
    // covers the antipode of the singular point (r1, r3 flip).
    cd z = run.w[i];
    double n2 = std::norm(z);
    Eigen::Vector3d R((1.0 - n2) / (1.0 + n2), 2.0 * z.real() / (1.0 + n2),
                      2.0 * z.imag() / (1.0 + n2));
    if (run.flip[i]) R = Eigen::Vector3d(-R[0], R[1], -R[2]);
    if (chart == Chart::SpatialFixed) {
      out.sphere.row(i) = R;
    } else {
      // frame components -> ambient
      double t_i = out.t[i];
      Eigen::Vector3d v = front.velocity(t_i).normalized();
      double kap = fd->kappa_at(t_i);
      (void)kap;
      Eigen::Vector3d acc = front.acceleration(t_i);
      Eigen::Vector3d nor = (acc - acc.dot(v) * v);
      if (nor.norm() < 1e-12) {
        out.sphere.row(i).setZero();
        continue;
      }
      nor.normalize();
      Eigen::Vector3d bin = v.cross(nor);
      out.sphere.row(i) = R[0] * v + R[1] * nor + R[2] * bin;
    }
  }
  out.final_coord.chart = chart;
  out.final_coord.value = out.coord[steps];
  out.final_coord.at_infinity = std::abs(out.coord[steps]) > 1e12;
  return out;
}

// ---------------------------------------------------------------------------
// Lorentz lift and rolling

Eigen::MatrixXd lorentz_J(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n + 1, n + 1);
  J(n, n) = -1.0;
  return J;
}

double LorentzMatrix::j_residual() const {
  Eigen::MatrixXd J = lorentz_J(n);
  return (m.transpose() * J * m - J).cwiseAbs().maxCoeff();
}

Eigen::VectorXd LorentzMatrix::act(const Eigen::VectorXd& r, bool renormalize) const {
  Eigen::VectorXd x(n + 1);
  x.head(n) = r;
  x[n] = 1.0;
  Eigen::VectorXd y = m * x;
  Eigen::VectorXd out = y.head(n) / y[n];
  if (renormalize && std::abs(r.norm() - 1.0) < 1e-9) out.normalize();
  return out;
}

namespace {

// -(1/l) [[0, v],[v^T, 0]]: coefficient of the hyperbolic lift.
Eigen::MatrixXd lift_coefficient_hyperbolic(const Eigen::VectorXd& v, double ell) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.block(0, n, n, 1) = -v / ell;
  A.block(n, 0, 1, n) = -v.transpose() / ell;
  return A;
}

// +(1/l) [[0, v],[-v^T, 0]]: coefficient of sphere rolling.
Eigen::MatrixXd lift_coefficient_sphere(const Eigen::VectorXd& v, double ell) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  A.block(0, n, n, 1) = v / ell;
  A.block(n, 0, 1, n) = -v.transpose() / ell;
  return A;
}

// One Newton step onto the J-orthogonal (or orthogonal) group: with
// E = X^T J X - J small, X (I - (1/2) J E) restores the invariant to O(E^2).
// Valid only for small E, which holds for single-step transition matrices.
Eigen::MatrixXd project_structure(const Eigen::MatrixXd& X, const Eigen::MatrixXd& J) {
  Eigen::MatrixXd E = X.transpose() * J * X - J;
  return X - 0.5 * X * (J * E);
}

// Structure-preserving flow accumulation: the coefficient matrix is
// state-independent, so each RK4 step is a linear map; the step matrix is
// integrated from the identity, projected onto the group (its deviation is
// O(h^5), safely inside the Newton basin), and multiplied on.
template <class Coef>
std::vector<Eigen::MatrixXd> group_flow_path(int dim, double t0, double t1, int steps,
                                             const Eigen::MatrixXd& J, Coef A) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(steps + 1);
  Eigen::MatrixXd X = I;
  out.push_back(X);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double t = t0 + i * h;
    Eigen::MatrixXd k1 = A(t);
    Eigen::MatrixXd Am = A(t + h / 2), Ae = A(t + h);
    Eigen::MatrixXd K1 = k1;
    Eigen::MatrixXd K2 = Am * (I + (h / 2) * K1);
    Eigen::MatrixXd K3 = Am * (I + (h / 2) * K2);
    Eigen::MatrixXd K4 = Ae * (I + h * K3);
    Eigen::MatrixXd S = I + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    S = project_structure(S, J);
    X = S * X;
    out.push_back(X);
  }
  return out;
}

}  // namespace

LorentzMatrix lorentz_lift_monodromy(const Curve& front, double ell, double t0, double t1,
                                     int steps) {
  if (ell <= 0.0) throw std::invalid_argument("lorentz_lift_monodromy: ell must be > 0");
  if (steps <= 0) steps = default_steps(front, t0, t1);
  const int n = front.dimension;
  const Eigen::MatrixXd J = lorentz_J(n);
  auto A = [&](double t) { return lift_coefficient_hyperbolic(front.velocity(t), ell); };

  LorentzMatrix lm;
  lm.n = n;
  lm.ell = ell;
  lm.t0 = t0;
  lm.t1 = t1;
  lm.m = group_flow_path(n + 1, t0, t1, steps, J, A).back();
  return lm;
}

RollResult roll_sphere(const Curve& front, double ell, int steps) {
  if (ell <= 0.0) throw std::invalid_argument("roll_sphere: ell must be > 0");
  const double t0 = front.t0(), t1 = front.t1();
  if (steps <= 0) steps = default_steps(front, t0, t1);
  const int n = front.dimension;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n + 1, n + 1);
  auto A = [&](double t) { return lift_coefficient_sphere(front.velocity(t), ell); };
  std::vector<Eigen::MatrixXd> gs = group_flow_path(n + 1, t0, t1, steps, I, A);

  RollResult out;
  out.monodromy = gs.back();
  out.structure_residual =
      (gs.back().transpose() * gs.back() - I).cwiseAbs().maxCoeff();

  Eigen::VectorXd params(steps + 1);
  Eigen::MatrixXd body(steps + 1, n + 1);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i <= steps; ++i) {
    params[i] = t0 + i * h;
    // body contact curve: -ell g^{-1} e_{n+1} (g orthogonal: inverse = transpose)
    body.row(i) = (-ell * gs[i].transpose().col(n)).transpose();
  }
  out.body_track = curve_from_samples(params, body, false, "body_track");
  return out;
}

LorentzMatrix roll_hyperbolic(const Curve& front, double ell, int steps) {
  // Theorem: identical to the bicycling monodromy; shared integrator path.
  return lorentz_lift_monodromy(front, ell, front.t0(), front.t1(), steps);
}

// ---------------------------------------------------------------------------
// Unstable periodic Riccati solution

UnstablePeriodic find_unstable_periodic(const Curve& front, double ell, int steps) {
  if (!front.closed)
    throw std::invalid_argument("find_unstable_periodic: front must be closed");
  if (ell <= 0.0) throw std::invalid_argument("find_unstable_periodic: ell must be > 0");
  FrenetData fd = frenet_data(front);  // also enforces arclength
  const double T = front.period, t0 = front.t0();
  if (steps <= 0) steps = std::max(2048, 4 * front.unique_count());

  const bool spatial = (front.dimension == 3);
  auto rhs = [&](double t, cd Z) -> cd {
    double kap = fd.kappa_at(t);
    double tau = spatial ? fd.tau_at(t) : 0.0;
    return (1.0 / ell - cd(0.0, 1.0) * tau) * Z - (kap / 2.0) * (1.0 + Z * Z);
  };
  // Time-reversed period map: integrating the equation backward makes the
  // forward-unstable solution attracting (Appendix argument).
  auto period_map_reversed = [&](cd Z) {
    return rk4(Z, t0 + T, t0, steps, [&](double t, cd z) { return rhs(t, z); });
  };

  cd Z = 0.0;
  int it = 0;
  for (; it < 500; ++it) {
    cd Zn = period_map_reversed(Z);
    if (!(std::abs(Zn) <= 1.0 + 1e-9))
      throw ContractionFailure(
          "find_unstable_periodic: period map left the unit disc (ell too large; no "
          "contraction at ell = " +
          std::to_string(ell) + ")");
    if (std::abs(Zn - Z) < 1e-12) {
      Z = Zn;
      break;
    }
    Z = Zn;
  }
  if (it >= 500)
    throw ContractionFailure(
        "find_unstable_periodic: period map did not contract within 500 iterations "
        "(ell too large)");

  // Reconstruct the periodic orbit by one more backward pass (stable
  // direction); samples come out reversed.
  std::vector<cd> zpath;
  zpath.reserve(steps + 1);
  {
    cd z = Z;
    zpath.push_back(z);
    const double h = -T / steps;
    for (int i = 0; i < steps; ++i) {
      double t = t0 + T + i * h;
      cd k1 = rhs(t, z), k2 = rhs(t + h / 2, z + (h / 2.0) * k1);
      cd k3 = rhs(t + h / 2, z + (h / 2.0) * k2), k4 = rhs(t + h, z + h * k3);
      z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      zpath.push_back(z);
    }
  }

  UnstablePeriodic up;
  up.iterations = it + 1;
  up.t.resize(steps + 1);
  up.Z.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    up.t[i] = t0 + i * (T / steps);
    up.Z[i] = zpath[steps - i];
    up.max_abs = std::max(up.max_abs, std::abs(up.Z[i]));
  }

  // ell ln lambda = integral (1 - i ell tau - ell kappa Z) dt over a period.
  Eigen::VectorXcd integrand(steps);
  for (int i = 0; i < steps; ++i) {
    double kap = fd.kappa_at(up.t[i]);
    double tau = spatial ? fd.tau_at(up.t[i]) : 0.0;
    integrand[i] = 1.0 - cd(0.0, ell) * tau - ell * kap * up.Z[i];
  }
  up.ell_log_multiplier = trapezoid_periodic(integrand, T / steps);
  cd loglam = up.ell_log_multiplier / ell;
  up.multiplier = (loglam.real() > 700.0)
                      ? cd(std::numeric_limits<double>::infinity(), 0.0)
                      : std::exp(loglam);
  return up;
}

cd ell_log_multiplier(const Curve& front, double ell, int steps) {
  return find_unstable_periodic(front, ell, steps).ell_log_multiplier;
}

Eigen::VectorXcd multiplier_taylor(const Curve& front, int n_coeffs, double ell_min,
                                   double ell_max, int n_points, int) {
  if (n_points < n_coeffs + 2)
    throw std::invalid_argument("multiplier_taylor: too few sample lengths");
  // One-sided finite-difference stencils at ell = 0 on the equispaced nodes
  // j delta; the multiplier values carry quadrature-level accuracy, so the
  // derivative weights dominate the error budget.
  const double delta = (ell_max - ell_min) / (n_points - 1);
  std::vector<double> nodes(n_points);
  Eigen::VectorXcd g(n_points);
  for (int j = 0; j < n_points; ++j) {
    nodes[j] = ell_min + j * delta;
    g[j] = ell_log_multiplier(front, nodes[j]);
  }
  Eigen::VectorXcd out(n_coeffs);
  double factorial = 1.0;
  for (int m = 0; m < n_coeffs; ++m) {
    if (m > 0) factorial *= m;
    std::vector<double> w = fd_weights(0.0, nodes, m);
    cd acc(0.0, 0.0);
    for (int j = 0; j < n_points; ++j) acc += w[j] * g[j];
    out[m] = acc / factorial;
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats

void write_trajectory_csv(const BikeTrajectory& traj, const std::string& path) {
  const int n = static_cast<int>(traj.r.cols());
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",r" << i;
  for (int i = 1; i <= n; ++i) out << ",gamma" << i;
  out << "\n";
  for (int row = 0; row < traj.t.size(); ++row) {
    out << format_double(traj.t[row]);
    for (int i = 0; i < n; ++i) out << "," << format_double(traj.r(row, i));
    for (int i = 0; i < n; ++i) out << "," << format_double(traj.rear(row, i));
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_lorentz_json(const LorentzMatrix& lm, const std::string& path) {
  nlohmann::json j;
  j["n"] = lm.n;
  j["ell"] = lm.ell;
  j["t0"] = lm.t0;
  j["t1"] = lm.t1;
  std::vector<double> entries;
  for (int r = 0; r < lm.m.rows(); ++r)
    for (int c = 0; c < lm.m.cols(); ++c) entries.push_back(lm.m(r, c));
  j["matrix"] = entries;
  j["J_residual"] = lm.j_residual();
  write_json(path, j);
}

}  // namespace bikegeo
