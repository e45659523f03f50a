#include "bikegeo/correspondence.hpp"

#include <memory>
#include <numeric>

namespace bikegeo {

namespace {

Eigen::VectorXd reflect_about_line(const Eigen::VectorXd& base, const Eigen::VectorXd& dir,
                                   const Eigen::VectorXd& x) {
  Eigen::VectorXd rel = x - base;
  return base + 2.0 * rel.dot(dir) * dir - rel;
}

double curve_scale(const Curve& c) {
  return std::max(1e-12,
                  (c.points.colwise().maxCoeff() - c.points.colwise().minCoeff()).norm());
}

}  // namespace

Eigen::VectorXd glide_reflect(const Eigen::VectorXd& U, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& x) {
  Eigen::VectorXd d = V - U;
  double len = d.norm();
  if (len < 1e-14) throw std::invalid_argument("glide_reflect: U = V");
  return reflect_about_line(U, d / len, x) + d;
}

Butterfly butterfly_complete(const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                             const Eigen::VectorXd& C) {
  double scale = std::max({A.norm(), B.norm(), C.norm(), 1.0});
  Eigen::VectorXd d = C - A;
  if (d.norm() < 1e-10 * scale)
    throw std::invalid_argument("butterfly_complete: A = C (completion not unique)");
  Butterfly bf;
  bf.A = A;
  bf.B = B;
  bf.C = C;
  bf.D = reflect_about_line(A, d.normalized(), A - B + C);
  return bf;
}

Curve bicycle_partner(const Curve& front, double ell, const Eigen::VectorXd& r0,
                      int steps) {
  BikeTrajectory traj =
      integrate_bicycle_sphere(front, ell, r0, front.t0(), front.t1(), steps);
  const int m = static_cast<int>(traj.t.size());
  const int n = front.dimension;

  Eigen::MatrixXd pts(m, n);
  for (int i = 0; i < m; ++i)
    pts.row(i) = front.points.row(0) * 0.0;  // shape init; overwritten below
  for (int i = 0; i < m; ++i)
    pts.row(i) = front.position(traj.t[i]).transpose() + 2.0 * ell * traj.r.row(i);

  double gap = (traj.r.row(m - 1) - traj.r.row(0)).norm();
  bool closed = front.closed && gap < 1e-6;

  // Interpolate the direction field so the partner carries an exact-form jet:
  // the partner velocity is the glide-reflected front velocity.
  auto rsp = std::make_shared<std::vector<CubicSpline>>();
  {
    std::vector<double> xs(traj.t.data(), traj.t.data() + m);
    for (int c = 0; c < n; ++c) {
      std::vector<double> ys(m);
      for (int i = 0; i < m; ++i) ys[i] = traj.r(i, c);
      if (closed) ys[m - 1] = ys[0];
      rsp->emplace_back(xs, ys, closed);
    }
  }
  auto keep = std::make_shared<Curve>(front);
  auto r_of = [rsp, n](double t) {
    Eigen::VectorXd r(n);
    for (int c = 0; c < n; ++c) r[c] = (*rsp)[c](t);
    r.normalize();
    return r;
  };
  AnalyticJet jet;
  jet.p = [keep, r_of, ell](double t) {
    return Eigen::VectorXd(keep->position(t) + 2.0 * ell * r_of(t));
  };
  jet.d1 = [keep, r_of](double t) {
    Eigen::VectorXd v = keep->velocity(t);
    Eigen::VectorXd r = r_of(t);
    return Eigen::VectorXd(-v + 2.0 * v.dot(r) * r);
  };
  jet.d2 = [keep, r_of, ell](double t) {
    Eigen::VectorXd v = keep->velocity(t), a = keep->acceleration(t);
    Eigen::VectorXd r = r_of(t);
    Eigen::VectorXd rdot = (-v + v.dot(r) * r) / ell;
    return Eigen::VectorXd(-a + 2.0 * (a.dot(r) + v.dot(rdot)) * r + 2.0 * v.dot(r) * rdot);
  };

  Curve out;
  out.dimension = n;
  out.params = traj.t;
  out.points = pts;
  out.closed = closed;
  out.period = closed ? (front.t1() - front.t0()) : 0.0;
  out.analytic_id = "partner";
  out.jet = jet;
  if (closed) out.points.row(m - 1) = out.points.row(0);
  out.finalize();
  return out;
}

CorrespondenceResidual verify_correspondence(const Curve& c1, const Curve& c2,
                                             double two_ell) {
  if (c1.sample_count() != c2.sample_count())
    throw std::invalid_argument("verify_correspondence: sample grids differ in size");
  if ((c1.params - c2.params).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("verify_correspondence: parameter grids differ");

  CorrespondenceResidual res;
  const int m = c1.unique_count();
  double vmax = 0.0;
  std::vector<Eigen::VectorXd> v1(m), v2(m);
  for (int i = 0; i < m; ++i) {
    v1[i] = c1.velocity(c1.params[i]);
    v2[i] = c2.velocity(c2.params[i]);
    vmax = std::max({vmax, v1[i].norm(), v2[i].norm()});
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd W = c1.points.row(i) - c2.points.row(i);
    double chord = W.norm();
    res.chord_dev = std::max(res.chord_dev, std::abs(chord - two_ell));
    Eigen::VectorXd mid = 0.5 * (v1[i] + v2[i]);
    Eigen::VectorXd What = W / chord;
    Eigen::VectorXd rejection = mid - mid.dot(What) * What;
    // The midpoint curve cusps where its speed vanishes; the angle there is
    // 0/0 and amplifies integrator noise, so near cusps the tangency defect
    // is measured against the speed scale instead.
    if (mid.norm() > 1e-3 * vmax) {
      double sine = rejection.norm() / mid.norm();
      res.tangency_res = std::max(res.tangency_res, std::asin(std::min(1.0, sine)));
    } else {
      res.tangency_res =
          std::max(res.tangency_res, rejection.norm() / std::max(vmax, 1e-300));
    }
    Eigen::VectorXd reflected = -v1[i] + 2.0 * v1[i].dot(What) * What;
    res.glide_res = std::max(res.glide_res, (v2[i] - reflected).norm());
  }
  return res;
}

BianchiReport bianchi_check(const Curve& A, const Curve& B, const Curve& C, double ell1,
                            double ell2) {
  if (A.sample_count() != B.sample_count() || B.sample_count() != C.sample_count())
    throw std::invalid_argument("bianchi_check: sample grids differ");
  if (std::abs(ell1 - ell2) < 1e-12)
    throw std::invalid_argument("bianchi_check: requires ell1 != ell2");

  const int m = A.sample_count();
  const int n = A.dimension;
  const double scale = curve_scale(A);
  BianchiReport rep;
  Eigen::MatrixXd D(m, n);
  std::vector<bool> degenerate(m, false);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd a = A.points.row(i), b = B.points.row(i), c = C.points.row(i);
    if ((a - c).norm() < 1e-10 * scale) {
      degenerate[i] = true;
      ++rep.degenerate_samples;
      D.row(i).setZero();
      continue;
    }
    Butterfly bf = butterfly_complete(a, b, c);
    D.row(i) = bf.D;
    if (n == 3) {
      Eigen::Vector3d nrm = Eigen::Vector3d(b - a).cross(Eigen::Vector3d(c - a));
      if (nrm.norm() > 1e-10 * scale * scale)
        rep.coplanarity = std::max(
            rep.coplanarity, std::abs(nrm.normalized().dot(Eigen::Vector3d(bf.D - a))));
    }
  }
  for (int i = 0; i < m; ++i) {  // interpolate across flagged samples
    if (!degenerate[i]) continue;
    int prev = (i - 1 + m) % m, next = (i + 1) % m;
    while (degenerate[prev]) prev = (prev - 1 + m) % m;
    while (degenerate[next]) next = (next + 1) % m;
    D.row(i) = 0.5 * (D.row(prev) + D.row(next));
  }

  bool closed = A.closed && (D.row(m - 1) - D.row(0)).norm() < 1e-6 * scale;
  Curve Dc;
  Dc.dimension = n;
  Dc.params = A.params;
  Dc.points = D;
  Dc.closed = closed;
  Dc.period = closed ? A.period : 0.0;
  Dc.analytic_id = "bianchi";
  // jet from the pointwise completion of the input closed forms
  auto ka = std::make_shared<Curve>(A);
  auto kb = std::make_shared<Curve>(B);
  auto kc = std::make_shared<Curve>(C);
  Dc.jet.p = [ka, kb, kc](double t) {
    return butterfly_complete(ka->position(t), kb->position(t), kc->position(t)).D;
  };
  if (closed) Dc.points.row(m - 1) = Dc.points.row(0);
  Dc.finalize();

  rep.ad = verify_correspondence(A, Dc, ell2);
  rep.cd_res = verify_correspondence(C, Dc, ell1);
  rep.D = std::move(Dc);
  return rep;
}

std::vector<ConjugacyRow> monodromy_conjugacy_check(const Curve& c1, const Curve& c2,
                                                    const std::vector<double>& lambdas) {
  // |tr| of the SL2 representative through the exact trace identities of the
  // special isomorphisms: tr M = tr(g)^2 - 1 for n = 2 and tr M = |tr g|^2
  // for n = 3. These stay well conditioned where the least-squares reduction
  // recovery saturates (entry ranges beyond 1/eps at strongly hyperbolic
  // monodromies).
  auto sl2_abs_trace = [](const LorentzMatrix& M) {
    double t = M.m.trace();
    if (M.n == 2) return std::sqrt(std::max(0.0, t + 1.0));
    if (M.n == 3) return std::sqrt(std::max(0.0, t));
    return 0.0;
  };
  std::vector<ConjugacyRow> rows;
  for (double lam : lambdas) {
    ConjugacyRow row;
    row.lambda = lam;
    LorentzMatrix M1 = lorentz_lift_monodromy(c1, lam, c1.t0(), c1.t1());
    LorentzMatrix M2 = lorentz_lift_monodromy(c2, lam, c2.t0(), c2.t1());
    row.lorentz_trace_1 = M1.m.trace();
    row.lorentz_trace_2 = M2.m.trace();
    row.lorentz_rel_err = std::abs(row.lorentz_trace_1 - row.lorentz_trace_2) /
                          std::max(1.0, std::abs(row.lorentz_trace_1));
    if (c1.dimension <= 3 && c1.dimension == c2.dimension) {
      row.sl2_trace_1 = cd(sl2_abs_trace(M1), 0.0);
      row.sl2_trace_2 = cd(sl2_abs_trace(M2), 0.0);
      row.sl2_err = std::abs(row.sl2_trace_1 - row.sl2_trace_2) /
                    std::max(1.0, std::abs(row.sl2_trace_1));
    }
    rows.push_back(row);
  }
  return rows;
}

Curve gamma_kn(int k, int n, int samples) {
  CurveSpec spec;
  spec.id = "gamma_kn";
  spec.param["k"] = k;
  spec.param["n"] = n;
  return build_curve(spec, samples);
}

std::vector<double> rotation_numbers(int k, int n) {
  if (k < 1 || k >= n || std::gcd(k, n) != 1)
    throw std::invalid_argument("rotation_numbers: need coprime 1 <= k < n");
  std::vector<double> roots;
  if (k > n - 2) return roots;

  const double nk = static_cast<double>(n) / k;
  // continuous branch of (1/(n pi)) arctan((n/k) tan(k pi rho)); the atan2
  // form keeps the branch index and the angle consistent at the poles
  auto f = [&](double rho) {
    double K = std::round(k * rho);
    double x = k * rho - K;  // in [-1/2, 1/2]
    double psi = std::atan2(nk * std::sin(kPi * x), std::cos(kPi * x));
    return (psi + K * kPi) / (n * kPi);
  };
  auto fp = [&](double rho) {
    double c = std::cos(k * kPi * rho), s = std::sin(k * kPi * rho);
    return 1.0 / (c * c + nk * nk * s * s);
  };

  // g = f(rho) - rho decreases from 0 to -(n-k)/n; one crossing per level.
  for (int m = 1; m <= n - k - 1; ++m) {
    double target = -static_cast<double>(m) / n;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) - mid > target)
        lo = mid;
      else
        hi = mid;
    }
    double rho = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {  // Newton polish
      double gval = f(rho) - rho - target;
      double gder = fp(rho) - 1.0;
      if (std::abs(gder) < 1e-14) break;
      double next = rho - gval / gder;
      if (next <= 0.0 || next >= 1.0) break;
      rho = next;
    }
    roots.push_back(rho);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

ZindlerCertificate zindler_verify(const Curve& c, double rho, double tol_scale) {
  if (!c.closed) throw std::invalid_argument("zindler_verify: curve must be closed");
  const double L = c.period;
  const int m = std::max(1024, c.unique_count());

  ZindlerCertificate cert;
  cert.rotation_number = rho;
  double scale = curve_scale(c);
  cert.chord_tol = tol_scale * scale;
  cert.tangency_tol = tol_scale;

  Eigen::VectorXd chord(m);
  double vmax = 0.0;
  std::vector<Eigen::VectorXd> mids(m), Ws(m);
  for (int i = 0; i < m; ++i) {
    double t = c.t0() + L * i / m;
    Eigen::VectorXd p0 = c.position(t), p1 = c.position(t + rho * L);
    Eigen::VectorXd v0 = c.velocity(t), v1 = c.velocity(t + rho * L);
    Ws[i] = p1 - p0;
    chord[i] = Ws[i].norm();
    mids[i] = 0.5 * (v0 + v1);
    vmax = std::max(vmax, mids[i].norm());
  }
  cert.chord_length = chord.mean();
  for (int i = 0; i < m; ++i) {
    cert.chord_dev = std::max(cert.chord_dev, std::abs(chord[i] - cert.chord_length));
    if (mids[i].norm() > 1e-6 * std::max(vmax, 1.0)) {
      Eigen::VectorXd What = Ws[i] / chord[i];
      double sine = (mids[i] - mids[i].dot(What) * What).norm() / mids[i].norm();
      cert.tangency_res = std::max(cert.tangency_res, std::asin(std::min(1.0, sine)));
    }
  }
  cert.pass = cert.chord_dev < cert.chord_tol && cert.tangency_res < cert.tangency_tol;
  return cert;
}

SphereFit fit_sphere_on_axis(const Eigen::MatrixXd& points) {
  if (points.cols() != 3) throw std::invalid_argument("fit_sphere_on_axis: need 3D points");
  const int m = static_cast<int>(points.rows());
  auto radius_spread = [&](double cz, double* mean_r) {
    double mr = 0.0;
    for (int i = 0; i < m; ++i) {
      Eigen::Vector3d p = points.row(i);
      mr += (p - Eigen::Vector3d(0, 0, cz)).norm();
    }
    mr /= m;
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      Eigen::Vector3d p = points.row(i);
      worst = std::max(worst, std::abs((p - Eigen::Vector3d(0, 0, cz)).norm() - mr));
    }
    if (mean_r) *mean_r = mr;
    return worst;
  };
  // golden-section on the center height
  double zspan = points.col(2).cwiseAbs().maxCoeff() + points.cwiseAbs().maxCoeff() + 1.0;
  double a = -4.0 * zspan, b = 4.0 * zspan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = radius_spread(x1, nullptr), f2 = radius_spread(x2, nullptr);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = radius_spread(x1, nullptr);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = radius_spread(x2, nullptr);
    }
  }
  SphereFit fit;
  fit.center_z = 0.5 * (a + b);
  fit.residual = radius_spread(fit.center_z, &fit.radius);
  return fit;
}

}  // namespace bikegeo
