#include "bikegeo/integrable.hpp"

#include <iostream>
#include <memory>

namespace bikegeo {

namespace {

const cd kI(0.0, 1.0);

Eigen::Matrix2cd akns_A() {
  Eigen::Matrix2cd A;
  A << cd(0.5, 0), cd(0, 0), cd(0, 0), cd(-0.5, 0);
  return A;
}

Eigen::Matrix2cd akns_Q(cd q) {
  Eigen::Matrix2cd Q;
  Q << cd(0, 0), q, -std::conj(q), cd(0, 0);
  return Q;
}

// nearest special-unitary matrix (one polar Newton step + det phase fix)
Eigen::Matrix2cd reunitarize(const Eigen::Matrix2cd& X) {
  Eigen::Matrix2cd Y = 0.5 * (X + X.adjoint().inverse());
  cd d = Y.determinant();
  return Y / std::sqrt(d);
}

// cubic-spline interpolant of complex samples on a uniform grid
struct ComplexSpline {
  CubicSpline re, im;
  cd operator()(double t) const { return cd(re(t), im(t)); }
};

std::shared_ptr<ComplexSpline> make_complex_spline(const Eigen::VectorXd& t,
                                                   const Eigen::VectorXcd& v,
                                                   bool periodic) {
  std::vector<double> xs(t.data(), t.data() + t.size());
  std::vector<double> yr(v.size()), yi(v.size());
  for (int i = 0; i < v.size(); ++i) {
    yr[i] = v[i].real();
    yi[i] = v[i].imag();
  }
  if (periodic) {
    yr.back() = yr.front();
    yi.back() = yi.front();
  }
  auto sp = std::make_shared<ComplexSpline>();
  sp->re = CubicSpline(xs, yr, periodic);
  sp->im = CubicSpline(xs, yi, periodic);
  return sp;
}

// spline interpolant of vector samples, used to equip sampled curves with
// exact-at-node derivative closures
VecFn make_vector_spline(const Eigen::VectorXd& t, const Eigen::MatrixXd& rows,
                         bool periodic) {
  auto sp = std::make_shared<std::vector<CubicSpline>>();
  std::vector<double> xs(t.data(), t.data() + t.size());
  for (int c = 0; c < rows.cols(); ++c) {
    std::vector<double> ys(rows.rows());
    for (int i = 0; i < rows.rows(); ++i) ys[i] = rows(i, c);
    if (periodic) ys.back() = ys.front();
    sp->emplace_back(xs, ys, periodic);
  }
  int n = static_cast<int>(rows.cols());
  return [sp, n](double t_) {
    Eigen::VectorXd out(n);
    for (int c = 0; c < n; ++c) out[c] = (*sp)[c](t_);
    return out;
  };
}

}  // namespace

Eigen::Vector3d su2_to_r3(const Eigen::Matrix2cd& X) {
  // basis: u1 = iA, u2 = (i/2) sigma_x, u3 = [[0,-1/2],[1/2,0]];
  // orthonormal for |X|^2 = -2 tr(X^2), with [u_i, u_j] = u_k cyclic.
  Eigen::Vector3d out;
  out[0] = -2.0 * (X(0, 0) * cd(0, 0.5) + X(1, 1) * cd(0, -0.5)).real();
  out[1] = -2.0 * (X(0, 1) * cd(0, 0.5) + X(1, 0) * cd(0, 0.5)).real();
  out[2] = -2.0 * (X(0, 1) * cd(0.5, 0.0) + X(1, 0) * cd(-0.5, 0.0)).real();
  return out;
}

Eigen::Matrix2cd r3_to_su2(const Eigen::Vector3d& x) {
  Eigen::Matrix2cd out;
  out << cd(0, 0.5 * x[0]), cd(-0.5 * x[2], 0.5 * x[1]), cd(0.5 * x[2], 0.5 * x[1]),
      cd(0, -0.5 * x[0]);
  return out;
}

AknsFrame akns_integrate(const CFn& q, double lambda, double t0, double t1, int steps,
                         const Eigen::Matrix2cd& Phi0) {
  if ((Phi0.adjoint() * Phi0 - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("akns_integrate: Phi0 must be special-unitary");
  const Eigen::Matrix2cd A = akns_A();

  using State = Eigen::Matrix<cd, 4, 2>;  // top: Phi, bottom: Phi_lambda
  auto rhs = [&](double t, const State& s) -> State {
    Eigen::Matrix2cd C = akns_Q(q(t)) + kI * lambda * A;
    State out;
    out.topRows<2>() = C * s.topRows<2>();
    out.bottomRows<2>() = C * s.bottomRows<2>() + kI * A * s.topRows<2>();
    return out;
  };

  AknsFrame fr;
  fr.lambda = lambda;
  fr.q = q;
  fr.t.resize(steps + 1);
  fr.Phi.reserve(steps + 1);
  fr.Phi_lambda.reserve(steps + 1);

  State s;
  s.topRows<2>() = Phi0;
  s.bottomRows<2>().setZero();
  fr.t[0] = t0;
  fr.Phi.push_back(Phi0);
  fr.Phi_lambda.push_back(s.bottomRows<2>());

  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double t = t0 + i * h;
    State k1 = rhs(t, s);
    State k2 = rhs(t + h / 2, s + (h / 2) * k1);
    State k3 = rhs(t + h / 2, s + (h / 2) * k2);
    State k4 = rhs(t + h, s + h * k3);
    s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Eigen::Matrix2cd Phi = s.topRows<2>();
    fr.unitarity_drift = std::max(
        fr.unitarity_drift,
        (Phi.adjoint() * Phi - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff());
    Phi = reunitarize(Phi);
    s.topRows<2>() = Phi;
    fr.t[i + 1] = t0 + (i + 1) * h;
    fr.Phi.push_back(Phi);
    fr.Phi_lambda.push_back(s.bottomRows<2>());
  }
  return fr;
}

Curve stp_curve(const AknsFrame& frame) {
  const int m = static_cast<int>(frame.t.size());
  Eigen::MatrixXd pts(m, 3), vel(m, 3), acc(m, 3);
  const Eigen::Matrix2cd A = akns_A();
  for (int i = 0; i < m; ++i) {
    const Eigen::Matrix2cd& Phi = frame.Phi[i];
    Eigen::Matrix2cd G = Phi.adjoint() * frame.Phi_lambda[i];
    G = 0.5 * (G - G.adjoint().eval());  // exact su(2) part
    G -= 0.5 * G.trace() * Eigen::Matrix2cd::Identity();
    pts.row(i) = su2_to_r3(G);
    Eigen::Matrix2cd Q = akns_Q(frame.q(frame.t[i]));
    vel.row(i) = su2_to_r3(Phi.adjoint() * (kI * A) * Phi);
    Eigen::Matrix2cd comm = (kI * A) * Q - Q * (kI * A);
    acc.row(i) = su2_to_r3(Phi.adjoint() * comm * Phi);
  }
  Curve c;
  c.dimension = 3;
  c.params = frame.t;
  c.points = pts;
  c.closed = false;
  c.analytic_id = "stp";
  c.jet.p = make_vector_spline(frame.t, pts, false);
  c.jet.d1 = make_vector_spline(frame.t, vel, false);
  c.jet.d2 = make_vector_spline(frame.t, acc, false);
  c.finalize();
  return c;
}

CFn q_from_curve(const Curve& c) {
  FrenetData fd = frenet_data(c);
  const int m = static_cast<int>(fd.curvature.size());
  const double kappa_floor = 1e-8 / fd.h;
  for (int i = 0; i < m; ++i)
    if (fd.curvature[i] < kappa_floor)
      throw std::invalid_argument("q_from_curve: curvature vanishes at a sample");

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(m);
  if (c.dimension == 3) tau = fd.torsion;
  Eigen::VectorXd phase = cumtrapz(tau, fd.h);  // anchored at 0

  int rows = c.closed ? m + 1 : m;
  Eigen::VectorXd tgrid(rows);
  Eigen::VectorXcd qs(rows);
  for (int i = 0; i < m; ++i) {
    tgrid[i] = fd.params[i];
    qs[i] = 0.5 * fd.curvature[i] * std::exp(kI * phase[i]);
  }
  bool periodic_q = false;
  if (c.closed) {
    tgrid[m] = c.t0() + c.period;
    // q is periodic only when the total torsion integral is a multiple of 2pi
    double total = phase[m - 1] + 0.5 * fd.h * (tau[m - 1] + tau[0]);
    periodic_q = std::abs(std::remainder(total, 2.0 * kPi)) < 1e-9;
    qs[m] = periodic_q ? qs[0] : 0.5 * fd.curvature[0] * std::exp(kI * total);
  }
  auto sp = make_complex_spline(tgrid, qs, periodic_q);
  return [sp](double t) { return (*sp)(t); };
}

DarbouxResult darboux_transform(const AknsFrame& frame, cd mu,
                                const Eigen::Vector2cd& v0) {
  if (std::abs(mu.imag()) < 1e-12)
    throw std::invalid_argument("darboux_transform: mu must be non-real");
  if (v0.norm() < 1e-300) throw std::invalid_argument("darboux_transform: v0 = 0");
  const int m = static_cast<int>(frame.t.size());
  const double t0 = frame.t[0], t1 = frame.t[m - 1];
  const int steps = m - 1;
  const Eigen::Matrix2cd A = akns_A();
  const double lambda = frame.lambda;

  // phi solves the AKNS vector equation at mu; only its direction matters, so
  // it is renormalized along the way.
  std::vector<Eigen::Vector2cd> phi(m);
  {
    Eigen::Vector2cd p = v0.normalized();
    phi[0] = p;
    const double h = (t1 - t0) / steps;
    auto rhs = [&](double t, const Eigen::Vector2cd& x) -> Eigen::Vector2cd {
      return (akns_Q(frame.q(t)) + kI * mu * A) * x;
    };
    for (int i = 0; i < steps; ++i) {
      double t = t0 + i * h;
      Eigen::Vector2cd k1 = rhs(t, p);
      Eigen::Vector2cd k2 = rhs(t + h / 2, p + (h / 2) * k1);
      Eigen::Vector2cd k3 = rhs(t + h / 2, p + (h / 2) * k2);
      Eigen::Vector2cd k4 = rhs(t + h, p + h * k3);
      p = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      p.normalize();
      phi[i + 1] = p;
    }
  }

  const cd dmu = mu - std::conj(mu);
  const cd alpha = std::sqrt((lambda - std::conj(mu)) / (lambda - mu));
  const cd beta = dmu / (lambda - std::conj(mu));
  const cd alpha_l = alpha * 0.5 * (1.0 / (lambda - std::conj(mu)) - 1.0 / (lambda - mu));
  const cd beta_l = -dmu / ((lambda - std::conj(mu)) * (lambda - std::conj(mu)));

  DarbouxResult out;
  out.mu = mu;
  out.transformed.lambda = lambda;
  out.transformed.t = frame.t;
  out.transformed.Phi.resize(m);
  out.transformed.Phi_lambda.resize(m);

  Eigen::VectorXcd qt(m);
  for (int i = 0; i < m; ++i) {
    Eigen::Matrix2cd pi = phi[i] * phi[i].adjoint();  // phi normalized
    Eigen::Matrix2cd U = alpha * (Eigen::Matrix2cd::Identity() - beta * pi);
    Eigen::Matrix2cd U_l = alpha_l * (Eigen::Matrix2cd::Identity() - beta * pi) -
                           alpha * beta_l * pi;
    out.transformed.Phi[i] = U * frame.Phi[i];
    out.transformed.Phi_lambda[i] = U_l * frame.Phi[i] + U * frame.Phi_lambda[i];
    qt[i] = frame.q(frame.t[i]) + kI * dmu * std::conj(phi[i][0]) * phi[i][1];
  }
  auto qsp = make_complex_spline(frame.t, qt, false);
  out.q_tilde = [qsp](double t) { return (*qsp)(t); };
  out.transformed.q = out.q_tilde;

  out.gamma = stp_curve(frame);
  out.gamma_tilde = stp_curve(out.transformed);

  Eigen::VectorXd dist(m);
  for (int i = 0; i < m; ++i)
    dist[i] = (out.gamma_tilde.points.row(i) - out.gamma.points.row(i)).norm();
  out.distance_mean = dist.mean();
  out.distance_dev = (dist.array() - out.distance_mean).abs().maxCoeff();

  // residual of the transformed AKNS system: re-integrate from tilde Phi(0)
  AknsFrame check = akns_integrate(out.q_tilde, lambda, t0, t1, steps,
                                   reunitarize(out.transformed.Phi[0]));
  for (int i = 0; i < m; ++i)
    out.akns_residual = std::max(
        out.akns_residual,
        (check.Phi[i] - out.transformed.Phi[i]).cwiseAbs().maxCoeff());
  return out;
}

DarbouxBikeReport darboux_bike_check(const AknsFrame& frame, double eps,
                                     const Eigen::Vector2cd& v0) {
  if (std::abs(frame.lambda) > 1e-12)
    throw std::invalid_argument("darboux_bike_check: requires lambda = 0");
  DarbouxBikeReport rep;
  rep.transform = darboux_transform(frame, cd(0.0, eps), v0);
  rep.chord = 2.0 / std::abs(eps);
  rep.correspondence =
      verify_correspondence(rep.transform.gamma, rep.transform.gamma_tilde, rep.chord);
  return rep;
}

// ---------------------------------------------------------------------------
// Wegner curves and the planar filament flow

Curve wegner_curve(const WegnerParams& params, const WegnerInit& init, int samples) {
  if (samples < 8) throw std::invalid_argument("wegner_curve: need samples >= 8");
  const double L = init.length;
  if (L <= 0.0) throw std::invalid_argument("wegner_curve: init.length must be set");

  Eigen::MatrixXd pts(samples + 1, 2), vel(samples + 1, 2), acc(samples + 1, 2);
  Eigen::VectorXd tg(samples + 1);
  bool truncated = false;
  int rows = samples + 1;

  if (!params.circular) {
    double rel0 = params.a * init.y0 * init.y0 + params.b;
    if (rel0 <= 0.0 || rel0 > 1.0)
      throw std::invalid_argument("wegner_curve: a y0^2 + b must lie in (0, 1]");
    double theta = init.branch_up ? std::acos(rel0) : -std::acos(rel0);
    Eigen::Vector3d s(0.0, init.y0, theta);  // (x, y, theta)
    auto rhs = [&](double, const Eigen::Vector3d& u) {
      return Eigen::Vector3d(std::cos(u[2]), std::sin(u[2]), -2.0 * params.a * u[1]);
    };
    const double h = L / samples;
    for (int i = 0; i <= samples; ++i) {
      tg[i] = i * h;
      pts.row(i) = Eigen::Vector2d(s[0], s[1]);
      vel.row(i) = Eigen::Vector2d(std::cos(s[2]), std::sin(s[2]));
      double kap = -2.0 * params.a * s[1];
      acc.row(i) = kap * Eigen::Vector2d(-std::sin(s[2]), std::cos(s[2]));
      if (i == samples) break;
      Eigen::Vector3d k1 = rhs(0, s), k2 = rhs(0, s + (h / 2) * k1);
      Eigen::Vector3d k3 = rhs(0, s + (h / 2) * k2), k4 = rhs(0, s + h * k3);
      s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (params.a * s[1] * s[1] + params.b <= 0.0) {
        truncated = true;
        rows = i + 2;
        pts.row(i + 1) = Eigen::Vector2d(s[0], s[1]);
        vel.row(i + 1) = Eigen::Vector2d(std::cos(s[2]), std::sin(s[2]));
        double kap2 = -2.0 * params.a * s[1];
        acc.row(i + 1) = kap2 * Eigen::Vector2d(-std::sin(s[2]), std::cos(s[2]));
        tg[i + 1] = (i + 1) * h;
        break;
      }
    }
  } else {
    double srel = init.r0 * (params.a * init.r0 * init.r0 + params.b +
                             params.c / (init.r0 * init.r0));
    if (std::abs(srel) > 1.0)
      throw std::invalid_argument("wegner_curve: circular init not solvable (|sin| > 1)");
    double alpha = init.branch_up ? std::asin(srel) : kPi - std::asin(srel);
    Eigen::Vector3d s(init.r0, 0.0, alpha);  // (r, psi, alpha)
    auto rhs = [&](double, const Eigen::Vector3d& u) {
      return Eigen::Vector3d(std::cos(u[2]), std::sin(u[2]) / u[0],
                             4.0 * params.a * u[0] * u[0] + 2.0 * params.b -
                                 std::sin(u[2]) / u[0]);
    };
    const double h = L / samples;
    for (int i = 0; i <= samples; ++i) {
      tg[i] = i * h;
      double r = s[0], psi = s[1], al = s[2];
      pts.row(i) = Eigen::Vector2d(r * std::cos(psi), r * std::sin(psi));
      double th = psi + al;  // tangent direction angle
      vel.row(i) = Eigen::Vector2d(std::cos(th), std::sin(th));
      double kap = 4.0 * params.a * r * r + 2.0 * params.b;
      acc.row(i) = kap * Eigen::Vector2d(-std::sin(th), std::cos(th));
      if (i == samples) break;
      Eigen::Vector3d k1 = rhs(0, s), k2 = rhs(0, s + (h / 2) * k1);
      Eigen::Vector3d k3 = rhs(0, s + (h / 2) * k2), k4 = rhs(0, s + h * k3);
      s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      double rel = params.a * s[0] * s[0] + params.b + params.c / (s[0] * s[0]);
      if (s[0] < 1e-6 || rel <= 0.0 || rel * s[0] > 1.0 + 1e-12) {
        truncated = true;
        rows = i + 2;
        double r2 = s[0], psi2 = s[1], th2 = s[1] + s[2];
        pts.row(i + 1) = Eigen::Vector2d(r2 * std::cos(psi2), r2 * std::sin(psi2));
        vel.row(i + 1) = Eigen::Vector2d(std::cos(th2), std::sin(th2));
        double kap2 = 4.0 * params.a * r2 * r2 + 2.0 * params.b;
        acc.row(i + 1) = kap2 * Eigen::Vector2d(-std::sin(th2), std::cos(th2));
        tg[i + 1] = (i + 1) * h;
        break;
      }
    }
  }
  if (truncated)
    std::cerr << "wegner_curve: defining relation left its admissible range; window "
                 "truncated to "
              << tg[rows - 1] << "\n";

  Curve c;
  c.dimension = 2;
  c.params = tg.head(rows);
  c.points = pts.topRows(rows);
  c.closed = false;
  c.analytic_id = params.circular ? "wegner_circular" : "wegner_linear";
  c.jet.p = make_vector_spline(c.params, c.points, false);
  c.jet.d1 = make_vector_spline(c.params, vel.topRows(rows), false);
  c.jet.d2 = make_vector_spline(c.params, acc.topRows(rows), false);
  c.finalize();
  return c;
}

double buckled_ring_residual(const Curve& c, double lambda_el, double mu_el) {
  FrenetData fd = frenet_data(c);
  const int m = static_cast<int>(fd.curvature.size());
  Eigen::MatrixXd kap = fd.curvature;
  Eigen::VectorXd kdd = fd_derivative(kap, fd.h, 2, c.closed).col(0);
  double worst = 0.0;
  // open windows: skip the one-sided stencil fringe
  int lo = c.closed ? 0 : 4, hi = c.closed ? m : m - 4;
  for (int i = lo; i < hi; ++i) {
    double k = fd.curvature[i];
    worst = std::max(worst,
                     std::abs(kdd[i] + 0.5 * k * k * k + lambda_el * k - mu_el));
  }
  return worst;
}

namespace {

struct RadialPeriod {
  double T = 0.0;      // arclength of one radial oscillation
  double dpsi = 0.0;   // apsidal advance over one oscillation
  bool ok = false;
};

// integrate the circular-family flow from apoapsis (r_max, alpha = pi/2) until
// the next apoapsis (second cos(alpha) = 0 crossing, downward)
RadialPeriod radial_period(double a, double b, double c, double r_max) {
  auto rhs = [&](const Eigen::Vector3d& u) {
    return Eigen::Vector3d(std::cos(u[2]), std::sin(u[2]) / u[0],
                           4.0 * a * u[0] * u[0] + 2.0 * b - std::sin(u[2]) / u[0]);
  };
  Eigen::Vector3d s(r_max, 0.0, 0.5 * kPi);
  RadialPeriod out;
  const double h = 1e-3 * std::max(1.0, r_max);
  auto step = [&](Eigen::Vector3d u, double hh) {
    Eigen::Vector3d k1 = rhs(u), k2 = rhs(u + (hh / 2) * k1);
    Eigen::Vector3d k3 = rhs(u + (hh / 2) * k2), k4 = rhs(u + hh * k3);
    return Eigen::Vector3d(u + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  double t = 0.0;
  int crossings = 0;
  double prev_u = std::cos(s[2]);
  for (int i = 0; i < 2000000; ++i) {
    Eigen::Vector3d next = step(s, h);
    double u = std::cos(next[2]);
    if (next[0] <= 1e-9 || next[0] > 10.0 * r_max + 10.0) return out;  // escaped
    if (prev_u != 0.0 && ((prev_u < 0 && u >= 0) || (prev_u > 0 && u <= 0)) && t > h) {
      ++crossings;
      if (crossings == 2) {  // back at apoapsis: bisect the crossing time
        double lo = 0.0, hi = h;
        Eigen::Vector3d base = s;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          Eigen::Vector3d probe = step(base, mid);
          if ((prev_u > 0) == (std::cos(probe[2]) > 0))
            lo = mid;
          else
            hi = mid;
        }
        double tc = 0.5 * (lo + hi);
        Eigen::Vector3d fin = step(base, tc);
        out.T = t + tc;
        out.dpsi = fin[1];
        out.ok = true;
        return out;
      }
    }
    prev_u = u;
    s = next;
    t += h;
  }
  return out;
}

}  // namespace

Curve wegner_closed_ring(double a, double r_max, int lobes, int winding, int samples,
                         WegnerParams* out_params) {
  if (lobes < 2) throw std::invalid_argument("wegner_closed_ring: need lobes >= 2");
  const double target = 2.0 * kPi * winding / lobes;
  auto c_of_b = [&](double b) { return r_max - a * std::pow(r_max, 4) - b * r_max * r_max; };
  auto gap = [&](double b) {
    RadialPeriod rp = radial_period(a, b, c_of_b(b), r_max);
    if (!rp.ok) return std::numeric_limits<double>::quiet_NaN();
    return rp.dpsi - target;
  };

  // bracket scan over b
  double blo = 0.0, bhi = 0.0;
  bool found = false;
  double prev_b = 0.0, prev_g = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i <= 80; ++i) {
    double b = -2.0 * a * r_max * r_max + (i / 80.0) * (1.0 / r_max + 2.0 * a * r_max * r_max);
    double g = gap(b);
    if (std::isfinite(g) && std::isfinite(prev_g) && g * prev_g <= 0.0) {
      blo = prev_b;
      bhi = b;
      found = true;
      break;
    }
    prev_b = b;
    prev_g = g;
  }
  if (!found)
    throw std::runtime_error("wegner_closed_ring: no closure bracket found for these "
                             "parameters");
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (blo + bhi);
    double g = gap(mid);
    if (!std::isfinite(g)) throw std::runtime_error("wegner_closed_ring: shoot failed");
    if ((g > 0) == (gap(blo) > 0))
      blo = mid;
    else
      bhi = mid;
  }
  double b = 0.5 * (blo + bhi);
  WegnerParams params;
  params.circular = true;
  params.a = a;
  params.b = b;
  params.c = c_of_b(b);
  if (out_params) *out_params = params;

  RadialPeriod rp = radial_period(a, b, params.c, r_max);
  WegnerInit init;
  init.r0 = r_max;  // apoapsis start: sin(alpha) = 1
  init.length = lobes * rp.T;
  Curve open = wegner_curve(params, init, samples);

  // wrap into a closed curve
  Curve c;
  c.dimension = 2;
  c.params = open.params;
  c.points = open.points;
  double gap_end = (c.points.row(c.points.rows() - 1) - c.points.row(0)).norm();
  if (gap_end > 1e-5 * std::max(1.0, r_max))
    throw std::runtime_error("wegner_closed_ring: closure gap " + std::to_string(gap_end));
  c.points.row(c.points.rows() - 1) = c.points.row(0);
  c.closed = true;
  c.period = init.length;
  c.analytic_id = "wegner_circular";
  c.finalize();
  return c;
}

Curve planar_filament_step(const Curve& c, double dt) {
  if (!c.closed || c.dimension != 2)
    throw std::invalid_argument("planar_filament_step: need a closed plane curve");
  FrenetData fd = frenet_data(c);
  const int m = static_cast<int>(fd.curvature.size());
  Eigen::MatrixXd kap = fd.curvature;
  Eigen::VectorXd kdot = fd_derivative(kap, fd.h, 1, true).col(0);

  Eigen::MatrixXd pts(m + 1, 2);
  for (int i = 0; i < m; ++i) {
    Eigen::Vector2d v = fd.tangent.row(i), n = fd.normal.row(i);
    Eigen::Vector2d delta = 0.5 * fd.curvature[i] * fd.curvature[i] * v + kdot[i] * n;
    pts.row(i) = c.points.row(i) + dt * delta.transpose();
  }
  pts.row(m) = pts.row(0);
  Eigen::VectorXd params = c.params;
  Curve moved = curve_from_samples(params, pts, true, "filament_step");
  return resample_arclength(moved, m);
}

double best_shift_mismatch(const Curve& before, const Curve& after) {
  FrenetData fb = frenet_data(before), fa = frenet_data(after);
  const int m = 2048;
  // curvature as a function of arclength fraction
  auto resample = [&](const FrenetData& fd, double period) {
    std::vector<double> xs(fd.curvature.size() + 1), ys(fd.curvature.size() + 1);
    for (int i = 0; i < fd.curvature.size(); ++i) {
      xs[i] = fd.params[i];
      ys[i] = fd.curvature[i];
    }
    xs.back() = fd.params[0] + period;
    ys.back() = ys.front();
    CubicSpline sp(xs, ys, true);
    Eigen::VectorXd out(m);
    for (int i = 0; i < m; ++i) out[i] = sp(fd.params[0] + period * i / m);
    return out;
  };
  Eigen::VectorXd kb = resample(fb, before.period), ka = resample(fa, after.period);
  double norm_b = std::sqrt(kb.squaredNorm() / m);

  // periodic spline of the after-profile for sub-grid shifts
  std::vector<double> xs(m + 1), ys(m + 1);
  for (int i = 0; i < m; ++i) {
    xs[i] = static_cast<double>(i);
    ys[i] = ka[i];
  }
  xs[m] = m;
  ys[m] = ys[0];
  CubicSpline ka_sp(xs, ys, true);

  auto cost = [&](double shift) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      double d = ka_sp(i + shift) - kb[i];
      s += d * d;
    }
    return std::sqrt(s / m);
  };
  int best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < m; ++s) {
    double cst = cost(s);
    if (cst < best) {
      best = cst;
      best_i = s;
    }
  }
  // golden-section refinement around the best grid shift
  double a = best_i - 1.0, b = best_i + 1.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = cost(x1), f2 = cost(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = cost(x2);
    }
  }
  best = std::min(best, cost(0.5 * (a + b)));
  return best / std::max(norm_b, 1e-300);
}

}  // namespace bikegeo
