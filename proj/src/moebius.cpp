#include "bikegeo/moebius.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bikegeo {

namespace {

// R^{2,1} -> sl2(R), an isometry for <x,x> = -det.
Eigen::Matrix2d sl2_of(const Eigen::Vector3d& x) {
  Eigen::Matrix2d A;
  A << -x[1], x[0] + x[2], x[0] - x[2], x[1];
  return A;
}

// R^{3,1} -> Hermitian 2x2, an isometry for <x,x> = -det; the group acts by
// A -> g A g*.
Eigen::Matrix2cd herm_of(const Eigen::Vector4d& x) {
  Eigen::Matrix2cd A;
  A << cd(-x[0] + x[3], 0.0), cd(-x[1], x[2]), cd(-x[1], -x[2]), cd(x[0] + x[3], 0.0);
  return A;
}

// Null-cone spinor of a boundary direction: A((r,1)) = w w*.
Eigen::Vector2cd spinor_of(const Eigen::Vector3d& r) {
  double den = 1.0 + r[0];
  if (den < 1e-14) return Eigen::Vector2cd(cd(std::sqrt(2.0), 0.0), cd(0.0, 0.0));
  double w2 = std::sqrt(den);
  return Eigen::Vector2cd(cd(-r[1], r[2]) / w2, cd(w2, 0.0));
}

Eigen::Vector3d spinor_to_sphere(const Eigen::Vector2cd& w) {
  double N = std::norm(w[0]) + std::norm(w[1]);
  cd m = w[0] * std::conj(w[1]);
  return Eigen::Vector3d((std::norm(w[1]) - std::norm(w[0])) / N, -2.0 * m.real() / N,
                         2.0 * m.imag() / N);
}

// Matrix of the reduction's action in the fixed z-chart z = (r2+ir3)/(1+r1);
// an involutive dressing of the spinor representative.
Eigen::Matrix2cd z_chart_matrix(const Eigen::Matrix2cd& g) {
  Eigen::Matrix2cd h;
  h << -std::conj(g(1, 1)), std::conj(g(1, 0)), std::conj(g(0, 1)), -std::conj(g(0, 0));
  return h;
}

cd mobius(const Eigen::Matrix2cd& h, cd z) {
  // column convention: (z1, z2) -> h (z1, z2), z = z2/z1
  cd num = h(1, 0) + h(1, 1) * z;
  cd den = h(0, 0) + h(0, 1) * z;
  if (std::abs(den) < 1e-300) return cd(1e300, 0.0);
  return num / den;
}

Eigen::Vector3d z_to_sphere(cd z) {
  double n2 = std::norm(z);
  if (n2 > 1e200) return Eigen::Vector3d(-1.0, 0.0, 0.0);
  return Eigen::Vector3d((1.0 - n2) / (1.0 + n2), 2.0 * z.real() / (1.0 + n2),
                         2.0 * z.imag() / (1.0 + n2));
}

void sign_normalize(Eigen::Matrix2cd& g) {
  int bi = 0, bj = 0;
  double best = -1.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (std::abs(g(i, j)) > best) {
        best = std::abs(g(i, j));
        bi = i;
        bj = j;
      }
  if (g(bi, bj).real() < 0.0) g = -g;
}

Eigen::Matrix2d recover_sl2r(const Eigen::MatrixXd& M) {
  // g E_i = F_i g for the three basis images; 12 x 4 homogeneous system.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(12, 4);
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e[i] = 1.0;
    Eigen::Matrix2d E = sl2_of(e);
    Eigen::Matrix2d F = sl2_of(M * e);
    // rows: vec of (g E - F g), unknowns g = (g00, g01, g10, g11)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        int row = 4 * i + 2 * r + c;
        // (g E)_{rc} = g_{r0} E_{0c} + g_{r1} E_{1c}
        S(row, 2 * r + 0) += E(0, c);
        S(row, 2 * r + 1) += E(1, c);
        // (F g)_{rc} = F_{r0} g_{0c} + F_{r1} g_{1c}
        S(row, 0 + c) -= F(r, 0);
        S(row, 2 + c) -= F(r, 1);
      }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  Eigen::Vector4d v = svd.matrixV().col(3);
  Eigen::Matrix2d g;
  g << v[0], v[1], v[2], v[3];
  double d = g.determinant();
  if (d <= 0.0)
    throw std::invalid_argument("moebius_from_lorentz: matrix is not in SO+(2,1)");
  g /= std::sqrt(d);
  if (std::abs(g(0, 0)) + std::abs(g(0, 1)) > 0 &&
      (std::abs(g.cwiseAbs().maxCoeff()) > 0)) {
    // sign convention: largest-magnitude entry positive
    Eigen::Index mi, mj;
    g.cwiseAbs().maxCoeff(&mi, &mj);
    if (g(mi, mj) < 0.0) g = -g;
  }
  return g;
}

Eigen::Matrix2cd recover_sl2c(const Eigen::MatrixXd& M) {
  // g A_i = B_i adj(g*): real-linear in (g, conj g); 32 x 8 homogeneous system
  // over the reals, unknowns (Re g00, Im g00, ..., Re g11, Im g11).
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(32, 8);
  auto idx = [](int r, int c) { return 2 * (2 * r + c); };  // column of Re g_{rc}
  for (int i = 0; i < 4; ++i) {
    Eigen::Vector4d e = Eigen::Vector4d::Zero();
    e[i] = 1.0;
    Eigen::Matrix2cd A = herm_of(e);
    Eigen::Matrix2cd B = herm_of(M * e);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        int row = 8 * i + 4 * r + 2 * c;  // two real rows per complex equation
        // (g A)_{rc} = sum_k g_{rk} A_{kc}
        for (int k = 0; k < 2; ++k) {
          cd a = A(k, c);
          // (x + iy) * a contributes to Re: x Re a - y Im a; Im: x Im a + y Re a
          S(row + 0, idx(r, k) + 0) += a.real();
          S(row + 0, idx(r, k) + 1) += -a.imag();
          S(row + 1, idx(r, k) + 0) += a.imag();
          S(row + 1, idx(r, k) + 1) += a.real();
        }
        // (B adj(g*))_{rc}: adj(g*) = [[conj g11, -conj g10], [-conj g01, conj g00]]
        // entry (k,c) of adj(g*) in terms of conj(g):
        //   (0,0): +conj g11  (0,1): -conj g10  (1,0): -conj g01  (1,1): +conj g00
        struct Ref {
          int r, c;
          double s;
        };
        auto adj_ref = [](int k, int c2) -> Ref {
          if (k == 0 && c2 == 0) return {1, 1, +1.0};
          if (k == 0 && c2 == 1) return {1, 0, -1.0};
          if (k == 1 && c2 == 0) return {0, 1, -1.0};
          return {0, 0, +1.0};
        };
        for (int k = 0; k < 2; ++k) {
          cd b = B(r, k);
          Ref ref = adj_ref(k, c);
          // b * s * conj(g_{ref}) = b s (x - iy):
          // Re: s (x Re b + y Im b); Im: s (x Im b - y Re b)
          S(row + 0, idx(ref.r, ref.c) + 0) -= ref.s * b.real();
          S(row + 0, idx(ref.r, ref.c) + 1) -= ref.s * b.imag();
          S(row + 1, idx(ref.r, ref.c) + 0) -= ref.s * b.imag();
          S(row + 1, idx(ref.r, ref.c) + 1) -= -ref.s * b.real();
        }
      }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
  // The null space is two-dimensional (the phase circle of g); noise can mix
  // the two smallest singular vectors, so take the combination with the
  // largest determinant.
  auto to_mat = [](const Eigen::VectorXd& v) {
    Eigen::Matrix2cd g;
    g << cd(v[0], v[1]), cd(v[2], v[3]), cd(v[4], v[5]), cd(v[6], v[7]);
    return g;
  };
  Eigen::Matrix2cd g7 = to_mat(svd.matrixV().col(7));
  Eigen::Matrix2cd g6 = to_mat(svd.matrixV().col(6));
  Eigen::Matrix2cd g = g7;
  double best = std::abs(g7.determinant());
  for (int k = 1; k < 64; ++k) {
    double a = kPi * k / 64.0;
    Eigen::Matrix2cd cand = std::cos(a) * g7 + std::sin(a) * g6;
    double d = std::abs(cand.determinant());
    if (d > best) {
      best = d;
      g = cand;
    }
  }
  cd d = g.determinant();
  if (std::abs(d) < 1e-12)
    throw std::invalid_argument("moebius_from_lorentz: singular reduction candidate");
  g /= std::sqrt(d);
  sign_normalize(g);
  return g;
}

}  // namespace

cd MonodromyElement::trace() const {
  if (n == 2) return cd(sl2r.trace(), 0.0);
  if (n == 3) return sl2c.trace();
  return cd(lorentz.m.trace(), 0.0);
}

cd MonodromyElement::mobius_apply(cd z) const {
  if (n == 2) {
    Eigen::Matrix2cd h = sl2r.cast<cd>();
    return mobius(h, z);
  }
  return mobius(z_chart_matrix(sl2c), z);
}

Eigen::VectorXd MonodromyElement::sphere_apply(const Eigen::VectorXd& r) const {
  if (n == 2) {
    double den = 1.0 + r[0];
    Eigen::Vector2d u = (std::abs(den) < 1e-14) ? Eigen::Vector2d(0.0, 1.0)
                                                : Eigen::Vector2d(den, r[1]);
    Eigen::Vector2d gu = sl2r * u;
    double theta = 2.0 * std::atan2(gu[1], gu[0]);
    return Eigen::Vector2d(std::cos(theta), std::sin(theta));
  }
  Eigen::Vector2cd w = spinor_of(r);
  return spinor_to_sphere(sl2c * w);
}

MonodromyElement moebius_from_lorentz(const LorentzMatrix& m) {
  // relative invariant check: the residual of M^T J M - J carries an
  // unavoidable |M|^2 eps floor for strongly hyperbolic elements
  double scale = std::max(1.0, std::pow(m.m.cwiseAbs().maxCoeff(), 2));
  if (m.j_residual() > 1e-6 * scale)
    throw std::invalid_argument("moebius_from_lorentz: input violates the Lorentz "
                                "invariant M^T J M = J");
  MonodromyElement elem;
  elem.lorentz = m;
  elem.n = m.n;
  elem.ell = m.ell;
  if (m.n == 2) {
    elem.sl2r = recover_sl2r(m.m);
    elem.has_reduction = true;
  } else if (m.n == 3) {
    elem.sl2c = recover_sl2c(m.m);
    elem.has_reduction = true;
  }
  if (elem.has_reduction) {
    Rng rng(0x51f0a1u);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd r = rng.unit_vector(m.n);
      worst = std::max(worst, (elem.sphere_apply(r) - m.act(r)).norm());
    }
    elem.reduction_residual = worst;
  }
  return elem;
}

MonodromyClass classify(const MonodromyElement& m, bool* ambiguous) {
  if (ambiguous) *ambiguous = false;
  if (m.n == 2) {
    double nrm = std::max(1.0, m.sl2r.cwiseAbs().maxCoeff());
    Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    if (std::min((m.sl2r - I).cwiseAbs().maxCoeff(), (m.sl2r + I).cwiseAbs().maxCoeff()) <
        1e-8)
      return MonodromyClass::Trivial;
    double tr = std::abs(m.sl2r.trace());
    double band = 1e-6 * nrm;
    if (std::abs(tr - 2.0) < band) {
      if (ambiguous) *ambiguous = true;
      return MonodromyClass::Parabolic;
    }
    return tr > 2.0 ? MonodromyClass::Hyperbolic : MonodromyClass::Elliptic;
  }
  if (m.n == 3) {
    double nrm = std::max(1.0, m.sl2c.cwiseAbs().maxCoeff());
    Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity();
    if (std::min((m.sl2c - I).cwiseAbs().maxCoeff(), (m.sl2c + I).cwiseAbs().maxCoeff()) <
        1e-8)
      return MonodromyClass::Trivial;
    cd tr2 = m.sl2c.trace() * m.sl2c.trace();  // sign-invariant
    double band = 1e-6 * std::max(1.0, nrm * nrm);
    if (std::abs(tr2.imag()) < band) {
      if (std::abs(tr2.real() - 4.0) < band) {
        if (ambiguous) *ambiguous = true;
        return MonodromyClass::Parabolic;
      }
      if (tr2.real() >= 0.0 && tr2.real() < 4.0) return MonodromyClass::Elliptic;
    }
    return MonodromyClass::Hyperbolic;
  }
  // n >= 4: classify on the Lorentz matrix spectrum.
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.lorentz.m);
  double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  double band = 1e-6 * std::max(1.0, m.lorentz.m.cwiseAbs().maxCoeff());
  if ((m.lorentz.m - Eigen::MatrixXd::Identity(m.n + 1, m.n + 1)).cwiseAbs().maxCoeff() <
      1e-8)
    return MonodromyClass::Trivial;
  if (rho > 1.0 + band) return MonodromyClass::Hyperbolic;
  // distinguish parabolic from elliptic by the defect of the eigenvalue 1
  Eigen::MatrixXd K = m.lorentz.m - Eigen::MatrixXd::Identity(m.n + 1, m.n + 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K);
  double smin = svd.singularValues().minCoeff();
  if (smin < band) {
    if (ambiguous) *ambiguous = true;
    return MonodromyClass::Parabolic;
  }
  return MonodromyClass::Elliptic;
}

namespace {

struct EigenPair {
  cd value;
  Eigen::Vector2cd vec;
};

// Eigen decomposition of a det-1 2x2; empty when defective to tolerance.
std::vector<EigenPair> eig2(const Eigen::Matrix2cd& g, double tol) {
  cd tr = g.trace();
  cd disc = tr * tr - 4.0;
  std::vector<EigenPair> out;
  cd root = std::sqrt(disc);
  if (std::abs(root) < tol) {  // parabolic: single eigenvalue tr/2
    cd mu = tr / 2.0;
    Eigen::Vector2cd v1(g(0, 1), mu - g(0, 0));
    Eigen::Vector2cd v2(mu - g(1, 1), g(1, 0));
    Eigen::Vector2cd v = (v1.norm() > v2.norm()) ? v1 : v2;
    if (v.norm() < tol) v = Eigen::Vector2cd(1.0, 0.0);  // g = mu I
    out.push_back({mu, v.normalized()});
    return out;
  }
  for (int s = 0; s < 2; ++s) {
    cd mu = (tr + (s == 0 ? root : -root)) / 2.0;
    Eigen::Vector2cd v1(g(0, 1), mu - g(0, 0));
    Eigen::Vector2cd v2(mu - g(1, 1), g(1, 0));
    Eigen::Vector2cd v = (v1.norm() > v2.norm()) ? v1 : v2;
    out.push_back({mu, v.normalized()});
  }
  return out;
}

}  // namespace

std::vector<FixedPoint> fixed_points(const MonodromyElement& m) {
  std::vector<FixedPoint> out;
  bool amb = false;
  MonodromyClass cls = classify(m, &amb);
  if (cls == MonodromyClass::Trivial) return out;  // flagged via report

  if (m.n == 2) {
    if (cls == MonodromyClass::Elliptic) return out;  // no real fixed points
    Eigen::Matrix2cd g = m.sl2r.cast<cd>();
    double tol = 1e-9 * std::max(1.0, m.sl2r.cwiseAbs().maxCoeff());
    for (const auto& ep : eig2(g, tol)) {
      FixedPoint fp;
      double theta = 2.0 * std::atan2(ep.vec[1].real(), ep.vec[0].real());
      fp.r = Eigen::Vector2d(std::cos(theta), std::sin(theta));
      fp.chart = (std::abs(ep.vec[0]) < 1e-14) ? cd(1e300, 0.0) : ep.vec[1] / ep.vec[0];
      fp.derivative = 1.0 / (ep.value * ep.value);
      fp.attracting = std::abs(fp.derivative) < 1.0;
      out.push_back(fp);
    }
    return out;
  }
  if (m.n == 3) {
    Eigen::Matrix2cd h = z_chart_matrix(m.sl2c);
    double tol = 1e-9 * std::max(1.0, h.cwiseAbs().maxCoeff());
    for (const auto& ep : eig2(h, tol)) {
      FixedPoint fp;
      fp.chart = (std::abs(ep.vec[0]) < 1e-14) ? cd(1e300, 0.0) : ep.vec[1] / ep.vec[0];
      fp.r = z_to_sphere(fp.chart);
      fp.derivative = 1.0 / (ep.value * ep.value);
      fp.attracting = std::abs(fp.derivative) < 1.0;
      out.push_back(fp);
    }
    return out;
  }
  throw std::invalid_argument("fixed_points: no conformal fixed-point solver beyond n=3");
}

cd derivative_at_fixed_point(const MonodromyElement& m, const Eigen::VectorXd& fp) {
  Eigen::VectorXd image = m.sphere_apply(fp);
  if ((image - fp).norm() > 1e-8)
    throw std::invalid_argument("derivative_at_fixed_point: point is not fixed");
  std::vector<FixedPoint> fps = fixed_points(m);
  const FixedPoint* best = nullptr;
  double bd = 1e300;
  for (const auto& f : fps) {
    double d = (f.r - fp).norm();
    if (d < bd) {
      bd = d;
      best = &f;
    }
  }
  if (!best) throw std::invalid_argument("derivative_at_fixed_point: no fixed points");
  return best->derivative;
}

double signed_rear_length(const Curve& front, const BikeTrajectory& traj) {
  const int m = static_cast<int>(traj.t.size());
  if (m < 2) throw std::invalid_argument("signed_rear_length: empty trajectory");
  Eigen::VectorXd f(m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd v = front.velocity(traj.t[i]);
    f[i] = -traj.r.row(i).dot(v);
  }
  return simpson(f, traj.t[1] - traj.t[0]);
}

SphericalArea spherical_signed_area(const Eigen::MatrixXd& r_path,
                                    const Eigen::Vector3d& pole) {
  const int m = static_cast<int>(r_path.rows());
  if (m < 4) throw std::invalid_argument("spherical_signed_area: path too short");
  if ((r_path.row(0) - r_path.row(m - 1)).norm() > 1e-6)
    throw std::invalid_argument("spherical_signed_area: path is not closed");
  double mind = 2.0;
  for (int i = 0; i < m; ++i)
    mind = std::min(mind, (r_path.row(i).transpose() - pole).norm());
  if (mind < 1e-3)
    throw std::invalid_argument("spherical_signed_area: path crosses the pole");

  // summed signed excesses of the triangles (pole, r_i, r_{i+1})
  double total = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    Eigen::Vector3d a = r_path.row(i), b = r_path.row(i + 1);
    double num = pole.dot(a.cross(b));
    double den = 1.0 + pole.dot(a) + a.dot(b) + b.dot(pole);
    total += 2.0 * std::atan2(num, den);
  }
  SphericalArea out;
  out.raw = total;
  out.pole = pole;
  double v = std::fmod(total, 4.0 * kPi);
  if (v > 2.0 * kPi) v -= 4.0 * kPi;
  if (v <= -2.0 * kPi) v += 4.0 * kPi;
  out.normalized = v;
  return out;
}

SphericalArea spherical_signed_area(const Eigen::MatrixXd& r_path) {
  const int m = static_cast<int>(r_path.rows());
  if (m < 4) throw std::invalid_argument("spherical_signed_area: path too short");
  // pole auto-selection: fixed candidate list, keep the one farthest from the
  // path (re-selected when a candidate sits on the path)
  std::vector<Eigen::Vector3d> candidates = {
      {0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, 1, 0},
      {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)},
      {-0.5, 0.7, std::sqrt(1.0 - 0.25 - 0.49)}};
  Eigen::Vector3d pole = candidates[0];
  double best = -1.0;
  for (const auto& cand : candidates) {
    double mind = 2.0;
    for (int i = 0; i < m; ++i)
      mind = std::min(mind, (r_path.row(i).transpose() - cand).norm());
    if (mind > best) {
      best = mind;
      pole = cand;
    }
  }
  if (best < 1e-3)
    throw std::invalid_argument("spherical_signed_area: no pole clear of the path");
  return spherical_signed_area(r_path, pole);
}

namespace {

// Finite-difference conformal derivative of the full monodromy map at a fixed
// point (n = 2 real, n = 3 complex against the oriented basis (u, r x u)).
cd fd_monodromy_derivative(const Curve& front, double ell, const Eigen::VectorXd& r0,
                           int steps) {
  const int n = front.dimension;
  const double t0 = front.t0(), t1 = front.t1();
  const double delta = 1e-4;
  auto flow = [&](const Eigen::VectorXd& r) {
    return integrate_bicycle_sphere(front, ell, r, t0, t1, steps).r.bottomRows(1).transpose();
  };
  if (n == 2) {
    Eigen::Vector2d u(-r0[1], r0[0]);
    Eigen::VectorXd plus = flow((std::cos(delta) * r0 + std::sin(delta) * u).normalized());
    Eigen::VectorXd minus = flow((std::cos(delta) * r0 - std::sin(delta) * u).normalized());
    Eigen::Vector2d diff = (plus - minus) / (2.0 * delta);
    return cd(diff.dot(u), 0.0);
  }
  Eigen::Vector3d r3 = r0;
  Eigen::Vector3d a = r3.unitOrthogonal();
  Eigen::Vector3d b = r3.cross(a);
  auto column = [&](const Eigen::Vector3d& dir) -> Eigen::Vector2d {
    Eigen::VectorXd plus = flow((std::cos(delta) * r3 + std::sin(delta) * dir).normalized());
    Eigen::VectorXd minus = flow((std::cos(delta) * r3 - std::sin(delta) * dir).normalized());
    Eigen::Vector3d diff = (plus - minus) / (2.0 * delta);
    return Eigen::Vector2d(diff.dot(a), diff.dot(b));
  };
  Eigen::Vector2d ca = column(a), cb = column(b);
  // conformal part of the 2x2 tangent map in the oriented frame (a, r x a)
  return 0.5 * cd(ca[0] + cb[1], ca[1] - cb[0]);
}

}  // namespace

BerryReport berry_check(const Curve& front, double ell, int steps) {
  if (!front.closed) throw std::invalid_argument("berry_check: front must be closed");
  if (steps > 0) steps += steps & 1;  // stride-2 refinements need an even count
  LorentzMatrix M = lorentz_lift_monodromy(front, ell, front.t0(), front.t1(), steps);
  MonodromyElement elem = moebius_from_lorentz(M);
  std::vector<FixedPoint> fps = fixed_points(elem);
  if (fps.empty())
    throw std::invalid_argument("berry_check: monodromy has no fixed point on the sphere");

  BerryReport rep;
  rep.cls = classify(elem);
  // prefer the attracting fixed point: the trajectory through the repelling
  // one amplifies the fixed-point residual exponentially
  const FixedPoint* fp_sel = &fps.front();
  for (const auto& f : fps)
    if (std::abs(f.derivative) <= std::abs(fp_sel->derivative)) fp_sel = &f;
  const FixedPoint& fp = *fp_sel;
  rep.fixed_point = fp.r;
  rep.m_prime = fp.derivative;

  BikeTrajectory traj =
      integrate_bicycle_sphere(front, ell, fp.r, front.t0(), front.t1(), steps);
  rep.rear_length = signed_rear_length(front, traj);
  if (front.dimension == 3) {
    // Richardson extrapolation of the polygonal spherical area (2nd -> 4th
    // order in the sample spacing); both passes share the reference pole.
    SphericalArea fine = spherical_signed_area(traj.r);
    const int m = static_cast<int>(traj.r.rows());
    Eigen::MatrixXd half((m - 1) / 2 + 1, 3);
    int k = 0;
    for (int i = 0; i < m; i += 2) half.row(k++) = traj.r.row(i);
    half.conservativeResize(k, 3);
    SphericalArea coarse = spherical_signed_area(half, fine.pole);
    rep.berry_area_raw = fine.raw + (fine.raw - coarse.raw) / 3.0;
    double v = std::fmod(rep.berry_area_raw, 4.0 * kPi);
    if (v > 2.0 * kPi) v -= 4.0 * kPi;
    if (v <= -2.0 * kPi) v += 4.0 * kPi;
    rep.berry_area = v;
    rep.rhs = std::exp(cd(-rep.rear_length / ell, rep.berry_area));
  } else {
    rep.berry_area = 0.0;
    rep.rhs = std::exp(cd(-rep.rear_length / ell, 0.0));
  }
  // residuals are relative once the magnitudes exceed 1
  rep.residual = std::abs(rep.m_prime - rep.rhs) / std::max(1.0, std::abs(rep.rhs));
  rep.m_prime_fd = fd_monodromy_derivative(front, ell, fp.r, steps);
  rep.fd_residual =
      std::abs(rep.m_prime - rep.m_prime_fd) / std::max(1.0, std::abs(rep.m_prime));
  return rep;
}

TransportCheck berry_transport_check(const Curve& front, double ell,
                                     const Eigen::VectorXd& r0, int steps) {
  if (steps > 0) steps += steps & 1;
  const int n = front.dimension;
  const double t0 = front.t0(), t1 = front.t1();
  BikeTrajectory traj = integrate_bicycle_sphere(front, ell, r0, t0, t1, steps);
  const int m = static_cast<int>(traj.r.rows());
  Eigen::VectorXd r1 = traj.r.row(m - 1);

  // orthonormal tangent bases at r0 and r1
  auto tangent_basis = [n](const Eigen::VectorXd& r) {
    Eigen::MatrixXd B(n, n - 1);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - r * r.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeFullU);
    B = svd.matrixU().leftCols(n - 1);
    return B;
  };
  Eigen::MatrixXd B0 = tangent_basis(r0), B1 = tangent_basis(r1);

  // discrete Levi-Civita transport of each basis vector along r(t):
  // project onto the next tangent space and renormalize; refined by step
  // halving (first-order scheme).
  auto transport = [&](int stride) {
    Eigen::MatrixXd V = B0;
    for (int i = stride; i < m; i += stride) {
      Eigen::VectorXd r = traj.r.row(i);
      for (int c = 0; c < n - 1; ++c) {
        Eigen::VectorXd v = V.col(c);
        v -= v.dot(r) * r;
        V.col(c) = v.normalized();
      }
    }
    return Eigen::MatrixXd(B1.transpose() * V);
  };
  Eigen::MatrixXd P2 = transport(1), P1 = transport(2);
  Eigen::MatrixXd P = 2.0 * P2 - P1;  // Richardson for a 1st-order scheme

  // finite-difference tangent map of the monodromy
  const double delta = 1e-4;
  Eigen::MatrixXd Jmap(n - 1, n - 1);
  for (int c = 0; c < n - 1; ++c) {
    Eigen::VectorXd u = B0.col(c);
    Eigen::VectorXd plus =
        integrate_bicycle_sphere(front, ell, (std::cos(delta) * r0 + std::sin(delta) * u).normalized(),
                                 t0, t1, steps)
            .r.bottomRows(1)
            .transpose();
    Eigen::VectorXd minus =
        integrate_bicycle_sphere(front, ell, (std::cos(delta) * r0 - std::sin(delta) * u).normalized(),
                                 t0, t1, steps)
            .r.bottomRows(1)
            .transpose();
    Jmap.col(c) = B1.transpose() * ((plus - minus) / (2.0 * delta));
  }

  TransportCheck out;
  out.rear_length = signed_rear_length(front, traj);
  out.tangent_map = Jmap;
  out.predicted = std::exp(-out.rear_length / ell) * P;
  out.residual = (out.tangent_map - out.predicted).cwiseAbs().maxCoeff();
  return out;
}

AreaBivector area_bivector(const Curve& front) {
  if (!front.closed) throw std::invalid_argument("area_bivector: curve must be closed");
  const int n = front.dimension;
  const int m = front.unique_count();
  const double h = front.step();
  AreaBivector out;
  out.matrix = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd p = front.points.row(i);
    Eigen::VectorXd v = front.velocity(front.params[i]);
    out.matrix += h * v * p.transpose();
  }
  out.matrix = 0.5 * (out.matrix - out.matrix.transpose().eval());  // exact skew part
  out.axial.setZero();
  if (n == 3) {
    out.axial = Eigen::Vector3d(out.matrix(2, 1), out.matrix(0, 2), out.matrix(1, 0));
  }
  return out;
}

PlanimeterReport planimeter_check(const Curve& front, const std::vector<double>& eps_list,
                                  const Eigen::VectorXd& r0) {
  if (eps_list.size() < 4)
    throw std::invalid_argument("planimeter_check: need at least 4 eps values for the "
                                "slope fit");
  PlanimeterReport rep;
  rep.area = area_bivector(front);
  rep.eps = eps_list;
  for (double eps : eps_list) {
    BikeTrajectory traj =
        integrate_bicycle_sphere(front, 1.0 / eps, r0, front.t0(), front.t1());
    Eigen::VectorXd rL = traj.r.bottomRows(1).transpose();
    Eigen::VectorXd predicted = r0 + eps * eps * (rep.area.matrix * r0);
    rep.error.push_back((rL - predicted).norm());
  }
  rep.slope = loglog_slope(rep.eps, rep.error);
  return rep;
}

double klein_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double ell) {
  if (x.norm() >= 1.0 || y.norm() >= 1.0)
    throw std::invalid_argument("klein_distance: points must lie in the open unit ball");
  Eigen::VectorXd d = y - x;
  double dn = d.norm();
  if (dn < 1e-15) return 0.0;
  // chord intersections with the unit sphere: |x + s d| = 1
  double A = d.squaredNorm(), B = 2.0 * x.dot(d), C = x.squaredNorm() - 1.0;
  double disc = std::sqrt(B * B - 4.0 * A * C);
  double sa = (-B - disc) / (2.0 * A);  // on the x side (sa < 0)
  double sb = (-B + disc) / (2.0 * A);  // beyond y (sb > 1)
  Eigen::VectorXd a = x + sa * d, b = x + sb * d;
  double cross = ((a - y).norm() * (b - x).norm()) / ((a - x).norm() * (b - y).norm());
  return 0.5 * ell * std::log(cross);
}

std::string to_string(MonodromyClass c) {
  switch (c) {
    case MonodromyClass::Hyperbolic: return "hyperbolic";
    case MonodromyClass::Parabolic: return "parabolic";
    case MonodromyClass::Elliptic: return "elliptic";
    default: return "trivial";
  }
}

MonodromyReport monodromy_report(const Curve& front, double ell, int steps) {
  LorentzMatrix M = lorentz_lift_monodromy(front, ell, front.t0(), front.t1(), steps);
  MonodromyElement elem = moebius_from_lorentz(M);
  MonodromyReport rep;
  rep.cls = classify(elem, &rep.parabolic_ambiguous);
  rep.all_points_fixed = (rep.cls == MonodromyClass::Trivial);
  rep.trace = elem.trace();
  if (elem.has_reduction && rep.cls != MonodromyClass::Trivial)
    rep.fixed_points = fixed_points(elem);
  rep.residuals["J_residual"] = M.j_residual();
  rep.residuals["reduction_residual"] = elem.reduction_residual;

  if (!rep.fixed_points.empty() && front.closed) {
    const FixedPoint& fp = rep.fixed_points.front();
    BikeTrajectory traj =
        integrate_bicycle_sphere(front, ell, fp.r, front.t0(), front.t1(), steps);
    rep.rear_length = signed_rear_length(front, traj);
    if (front.dimension == 3) rep.berry_area = spherical_signed_area(traj.r).normalized;
  }
  return rep;
}

nlohmann::json monodromy_report_json(const MonodromyElement& elem,
                                     const MonodromyReport& rep) {
  nlohmann::json j;
  j["n"] = elem.n;
  j["ell"] = elem.ell;
  j["class"] = to_string(rep.cls);
  j["parabolic_ambiguous"] = rep.parabolic_ambiguous;
  j["all_points_fixed"] = rep.all_points_fixed;
  j["trace"] = {rep.trace.real(), rep.trace.imag()};
  j["fixed_points"] = nlohmann::json::array();
  j["derivatives"] = nlohmann::json::array();
  for (const auto& fp : rep.fixed_points) {
    std::vector<double> r(fp.r.data(), fp.r.data() + fp.r.size());
    j["fixed_points"].push_back(r);
    j["derivatives"].push_back({fp.derivative.real(), fp.derivative.imag()});
  }
  j["rear_length"] = rep.rear_length;
  j["berry_area"] = rep.berry_area;
  j["residuals"] = rep.residuals;
  return j;
}

}  // namespace bikegeo
