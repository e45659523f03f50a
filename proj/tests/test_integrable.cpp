#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bikegeo/integrable.hpp"

using namespace bikegeo;

namespace {

CFn const_q(double v) {
  return [v](double) { return cd(v, 0.0); };
}

CFn helix_q(double amp, double rate) {
  return [=](double t) { return amp * std::exp(cd(0.0, rate * t)); };
}

}  // namespace

TEST_CASE("su2 identification: orthonormal basis with cyclic brackets") {
  Eigen::Vector3d e1(1, 0, 0), e2(0, 1, 0), e3(0, 0, 1);
  Eigen::Matrix2cd u1 = r3_to_su2(e1), u2 = r3_to_su2(e2), u3 = r3_to_su2(e3);
  auto norm2 = [](const Eigen::Matrix2cd& X) { return (-2.0 * (X * X).trace()).real(); };
  CHECK(norm2(u1) == doctest::Approx(1.0));
  CHECK(norm2(u2) == doctest::Approx(1.0));
  CHECK(norm2(u3) == doctest::Approx(1.0));
  CHECK(((u1 * u2 - u2 * u1) - u3).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(((u2 * u3 - u3 * u2) - u1).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(((u3 * u1 - u1 * u3) - u2).cwiseAbs().maxCoeff() < 1e-15);
  // round trip
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    Eigen::Vector3d x = rng.unit_vector(3);
    CHECK((su2_to_r3(r3_to_su2(x)) - x).norm() < 1e-14);
  }
}

TEST_CASE("akns_integrate: zero potential gives diagonal phases") {
  const double lambda = 0.8;
  AknsFrame fr = akns_integrate(const_q(0.0), lambda, 0.0, 5.0, 2048);
  for (int i = 0; i < fr.t.size(); i += 256) {
    double t = fr.t[i];
    Eigen::Matrix2cd expect;
    expect << std::exp(cd(0, lambda * t / 2)), cd(0, 0), cd(0, 0),
        std::exp(cd(0, -lambda * t / 2));
    CHECK((fr.Phi[i] - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("akns_integrate: constant real potential at lambda = 0 rotates") {
  const double q0 = 0.7;
  AknsFrame fr = akns_integrate(const_q(q0), 0.0, 0.0, 4.0, 2048);
  for (int i = 0; i < fr.t.size(); i += 256) {
    double t = fr.t[i];
    Eigen::Matrix2cd expect;
    expect << cd(std::cos(q0 * t), 0), cd(std::sin(q0 * t), 0),
        cd(-std::sin(q0 * t), 0), cd(std::cos(q0 * t), 0);
    CHECK((fr.Phi[i] - expect).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(fr.unitarity_drift < 1e-8);
}

TEST_CASE("akns unitarity over ten periods") {
  AknsFrame fr = akns_integrate(helix_q(0.5, 0.4), 0.7, 0.0, 20.0 * kPi, 16384);
  for (int i = 0; i < fr.t.size(); i += 1024) {
    Eigen::Matrix2cd G = fr.Phi[i].adjoint() * fr.Phi[i];
    CHECK((G - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(fr.Phi[i].determinant() - cd(1, 0)) < 1e-10);
  }
}

TEST_CASE("stp_curve: constant q = 1/2 at lambda = 0 is a unit circle") {
  AknsFrame fr = akns_integrate(const_q(0.5), 0.0, 0.0, 4.0 * kPi, 4096);
  Curve c = stp_curve(fr);
  FrenetData fd = frenet_data(c);
  for (int i = 16; i < fd.curvature.size() - 16; i += 128) {
    CHECK(std::abs(fd.curvature[i] - 1.0) < 1e-6);
    if (fd.torsion_valid[i]) CHECK(std::abs(fd.torsion[i]) < 1e-5);
  }
}

TEST_CASE("stp_curve: constant q, lambda = 0.3 gives a helix with tau = -0.3") {
  AknsFrame fr = akns_integrate(const_q(0.5), 0.3, 0.0, 4.0 * kPi, 4096);
  Curve c = stp_curve(fr);
  FrenetData fd = frenet_data(c);
  for (int i = 16; i < fd.curvature.size() - 16; i += 128) {
    CHECK(std::abs(fd.curvature[i] - 1.0) < 1e-5);
    CHECK(std::abs(fd.torsion[i] + 0.3) < 1e-5);
  }
}

TEST_CASE("q_from_curve: circle and planar reality") {
  CurveSpec spec;
  spec.id = "circle_multi";
  spec.param["dimension"] = 3;
  Curve c = build_curve(spec, 1024);
  CFn q = q_from_curve(c);
  for (double t : {0.3, 2.0, 5.5}) {
    CHECK(std::abs(q(t) - cd(0.5, 0.0)) < 1e-6);
    CHECK(std::abs(q(t).imag()) < 1e-8);  // planar curves give real q
  }
}

TEST_CASE("round trip: helix -> potential -> STP curve reproduces kappa, tau") {
  const double cpar = 0.5, s = std::sqrt(1.0 + cpar * cpar);
  AnalyticJet jet;
  jet.p = [=](double t) {
    return Eigen::Vector3d(std::cos(t / s), std::sin(t / s), cpar * t / s);
  };
  jet.d1 = [=](double t) {
    return Eigen::Vector3d(-std::sin(t / s) / s, std::cos(t / s) / s, cpar / s);
  };
  jet.d2 = [=](double t) {
    return Eigen::Vector3d(-std::cos(t / s) / (s * s), -std::sin(t / s) / (s * s), 0.0);
  };
  Curve h = curve_from_function(3, jet, 0.0, 4.0 * kPi, 2048, false, "helix");
  CFn q = q_from_curve(h);
  AknsFrame fr = akns_integrate(q, 0.0, 0.0, 4.0 * kPi, 4096);
  Curve c = stp_curve(fr);
  FrenetData fd = frenet_data(c);
  const double kappa_expect = 1.0 / (1.0 + cpar * cpar);
  const double tau_expect = cpar / (1.0 + cpar * cpar);
  for (int i = 64; i < fd.curvature.size() - 64; i += 256) {
    CHECK(std::abs(fd.curvature[i] - kappa_expect) < 1e-4);
    CHECK(std::abs(fd.torsion[i] - tau_expect) < 1e-4);
  }
}

TEST_CASE("darboux transform: distance law and invariances") {
  AknsFrame fr = akns_integrate(helix_q(0.5, 0.3), 0.0, 0.0, 4.0 * kPi, 4096);
  DarbouxResult res = darboux_transform(fr, cd(0, 1), Eigen::Vector2cd(1.0, 0.4));
  // |mu - conj mu| / |lambda - mu|^2 = 2 / 1 = 2
  CHECK(std::abs(res.distance_mean - 2.0) < 1e-7);
  CHECK(res.distance_dev < 1e-8);
  CHECK(res.akns_residual < 1e-7);

  // scaling v0 by a complex unit leaves the transform unchanged
  DarbouxResult res2 =
      darboux_transform(fr, cd(0, 1), cd(0.3, 1.7) * Eigen::Vector2cd(1.0, 0.4));
  double qdiff = 0.0;
  for (double t : {0.1, 3.3, 9.9})
    qdiff = std::max(qdiff, std::abs(res.q_tilde(t) - res2.q_tilde(t)));
  CHECK(qdiff < 1e-12);
  CHECK((res.gamma_tilde.points - res2.gamma_tilde.points).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(darboux_transform(fr, cd(0.5, 0.0), Eigen::Vector2cd(1, 0)),
                  std::invalid_argument);
}

TEST_CASE("distance law across a lambda sweep") {
  const cd mu(0.2, 0.9);
  std::vector<double> lambdas = {0.0, 0.4, 0.8};
  double reference = -1.0;
  for (double lam : lambdas) {
    AknsFrame fr = akns_integrate(helix_q(0.5, 0.3), lam, 0.0, 2.0 * kPi, 2048);
    DarbouxResult res = darboux_transform(fr, mu, Eigen::Vector2cd(0.8, 0.6));
    double scaled = res.distance_mean * std::norm(cd(lam, 0) - mu);
    if (reference < 0)
      reference = scaled;
    else
      CHECK(std::abs(scaled - reference) / reference < 1e-6);
    CHECK(res.distance_dev < 1e-7);
  }
}

TEST_CASE("darboux bicycle check: circle potential, eps = 1") {
  AknsFrame fr = akns_integrate(const_q(0.5), 0.0, 0.0, 4.0 * kPi, 4096);
  DarbouxBikeReport rep = darboux_bike_check(fr, 1.0, Eigen::Vector2cd(1.0, 0.0));
  CHECK(std::abs(rep.chord - 2.0) < 1e-14);
  CHECK(rep.correspondence.chord_dev < 1e-6);
  CHECK(rep.correspondence.tangency_res < 1e-6);

  // residual decreases at ~2nd order in the step
  AknsFrame coarse = akns_integrate(const_q(0.5), 0.0, 0.0, 4.0 * kPi, 1024);
  DarbouxBikeReport rep_c = darboux_bike_check(coarse, 1.0, Eigen::Vector2cd(1.0, 0.0));
  CHECK(rep.correspondence.chord_dev <= rep_c.correspondence.chord_dev);

  // two independent directions give distinct valid partners
  DarbouxBikeReport repA = darboux_bike_check(fr, 1.0, Eigen::Vector2cd(1.0, 0.0));
  DarbouxBikeReport repB = darboux_bike_check(fr, 1.0, Eigen::Vector2cd(0.0, 1.0));
  CHECK((repA.transform.gamma_tilde.points - repB.transform.gamma_tilde.points)
            .cwiseAbs()
            .maxCoeff() > 0.1);
  CHECK(repB.correspondence.chord_dev < 1e-6);
}

TEST_CASE("darboux partner coincides with the bicycle partner of the STP curve") {
  const double eps = 1.0;
  AknsFrame fr = akns_integrate(helix_q(0.5, 0.3), 0.0, 0.0, 2.0 * kPi, 4096);
  DarbouxBikeReport rep = darboux_bike_check(fr, eps, Eigen::Vector2cd(1.0, 0.3));
  const Curve& gamma = rep.transform.gamma;
  const Curve& gt = rep.transform.gamma_tilde;
  const double ell = 1.0 / eps;
  Eigen::Vector3d r0 =
      (gt.points.row(0) - gamma.points.row(0)).transpose().normalized();
  Curve partner = bicycle_partner(gamma, ell, r0, gamma.sample_count() - 1);
  double worst = 0.0;
  for (int i = 0; i < gt.sample_count(); i += 64)
    worst = std::max(worst, (partner.points.row(i) - gt.points.row(i)).norm());
  CHECK(worst < 1e-5);
}

TEST_CASE("wegner linear family: curvature claim and EL residual") {
  WegnerParams p;
  p.a = 1.0;
  p.b = 0.5;
  WegnerInit init;
  init.y0 = 0.0;
  init.length = 6.0;
  Curve c = wegner_curve(p, init, 4096);
  FrenetData fd = frenet_data(c);
  double worst = 0.0;
  for (int i = 8; i < fd.curvature.size() - 8; ++i)
    worst = std::max(worst, std::abs(fd.curvature[i] + 2.0 * p.a * c.points(i, 1)));
  CHECK(worst < 1e-6);
  CHECK(buckled_ring_residual(c, p.lambda_el(), p.mu_el()) < 1e-5);
  // defining relation conserved
  for (int i = 0; i < c.sample_count(); i += 512) {
    double rel = p.a * c.points(i, 1) * c.points(i, 1) + p.b;
    CHECK(std::abs(c.velocity(c.params[i])[0] - rel) < 1e-9);
  }
}

TEST_CASE("wegner linear family: symmetric under y -> -y from an on-axis start") {
  WegnerParams p;
  p.a = 0.8;
  p.b = 0.6;
  WegnerInit up, down;
  up.y0 = 0.0;
  up.length = 3.0;
  down = up;
  down.branch_up = false;
  Curve cu = wegner_curve(p, up, 1024);
  Curve cd_ = wegner_curve(p, down, 1024);
  for (int i = 0; i < cu.sample_count(); i += 128) {
    CHECK(std::abs(cu.points(i, 0) - cd_.points(i, 0)) < 1e-10);
    CHECK(std::abs(cu.points(i, 1) + cd_.points(i, 1)) < 1e-10);
  }
}

TEST_CASE("wegner circular family: curvature claim and EL residual") {
  WegnerParams p;
  p.circular = true;
  p.a = 0.35;
  p.b = 0.1;
  p.c = 0.15;
  WegnerInit init;
  init.r0 = 1.0;
  init.length = 8.0;
  Curve c = wegner_curve(p, init, 4096);
  FrenetData fd = frenet_data(c);
  double worst = 0.0;
  for (int i = 8; i < fd.curvature.size() - 8; ++i) {
    double r2 = c.points.row(i).squaredNorm();
    worst = std::max(worst, std::abs(fd.curvature[i] - (4.0 * p.a * r2 + 2.0 * p.b)));
  }
  CHECK(worst < 1e-6);
  CHECK(buckled_ring_residual(c, p.lambda_el(), p.mu_el()) < 1e-5);
}

TEST_CASE("wegner circular family with a = 0 is an off-center circle") {
  WegnerParams p;
  p.circular = true;
  p.a = 0.0;
  p.b = 0.4;
  p.c = 0.1;
  WegnerInit init;
  init.r0 = 1.0;
  init.length = 7.0;
  Curve c = wegner_curve(p, init, 2048);
  FrenetData fd = frenet_data(c);
  // kappa = 2b everywhere; oracle: circumscribed circle through three points
  for (int i = 8; i < fd.curvature.size() - 8; i += 64)
    CHECK(std::abs(fd.curvature[i] - 2.0 * p.b) < 1e-8);
  Eigen::Vector2d A = c.points.row(100), B = c.points.row(700), C = c.points.row(1400);
  // circumcenter
  Eigen::Matrix2d M;
  M << (B - A).transpose(), (C - A).transpose();
  Eigen::Vector2d rhs(0.5 * (B.squaredNorm() - A.squaredNorm()),
                      0.5 * (C.squaredNorm() - A.squaredNorm()));
  Eigen::Vector2d center = M.inverse() * rhs;
  double R = (A - center).norm();
  CHECK(std::abs(R - 1.0 / (2.0 * p.b)) < 1e-7);
  for (int i = 0; i < c.sample_count(); i += 256)
    CHECK(std::abs((c.points.row(i).transpose() - center).norm() - R) < 1e-7);
}

TEST_CASE("buckled ring residual: circle with matched multipliers") {
  const double R = 1.4, lambda = 0.9;
  AnalyticJet jet;
  jet.p = [R](double t) { return Eigen::Vector2d(R * std::cos(t / R), R * std::sin(t / R)); };
  jet.d1 = [R](double t) { return Eigen::Vector2d(-std::sin(t / R), std::cos(t / R)); };
  jet.d2 = [R](double t) {
    return Eigen::Vector2d(-std::cos(t / R) / R, -std::sin(t / R) / R);
  };
  Curve c = curve_from_function(2, jet, 0.0, 2.0 * kPi * R, 1024, true, "circleR");
  double mu = 1.0 / (2.0 * R * R * R) + lambda / R;
  CHECK(buckled_ring_residual(c, lambda, mu) < 1e-8);
}

TEST_CASE("closed Wegner ring: EL equation with the stated multipliers") {
  WegnerParams params;
  Curve ring = wegner_closed_ring(0.35, 1.4, 3, 1, 4096, &params);
  CHECK(ring.closed);
  CHECK(buckled_ring_residual(ring, params.lambda_el(), params.mu_el()) < 1e-5);
}

TEST_CASE("planar filament step: circle is a fixed shape") {
  CurveSpec spec;
  spec.id = "circle_multi";
  Curve c = build_curve(spec, 1024);
  Curve stepped = planar_filament_step(c, 1e-3);
  FrenetData fd = frenet_data(stepped);
  for (int i = 0; i < fd.curvature.size(); i += 64)
    CHECK(std::abs(fd.curvature[i] - 1.0) < 1e-8);
}

TEST_CASE("planar filament step: buckled ring is a soliton, ellipse is not") {
  WegnerParams params;
  Curve ring = wegner_closed_ring(0.35, 1.4, 3, 1, 4096, &params);
  const double dt = 1e-3;
  Curve stepped = planar_filament_step(ring, dt);
  double soliton_mismatch = best_shift_mismatch(ring, stepped);
  CHECK(soliton_mismatch < 10.0 * dt * dt);

  AnalyticJet jet;
  jet.p = [](double t) { return Eigen::Vector2d(1.6 * std::cos(t), std::sin(t)); };
  jet.d1 = [](double t) { return Eigen::Vector2d(-1.6 * std::sin(t), std::cos(t)); };
  jet.d2 = [](double t) { return Eigen::Vector2d(-1.6 * std::cos(t), -std::sin(t)); };
  Curve ell_raw = curve_from_function(2, jet, 0.0, 2.0 * kPi, 1024, true, "ellipse");
  Curve ell = resample_arclength(ell_raw, 1024);
  Curve e_step = planar_filament_step(ell, dt);
  double control = best_shift_mismatch(ell, e_step);
  CHECK(control > 100.0 * soliton_mismatch);
}

TEST_CASE("filament step preserves arclength to O(dt^2)") {
  WegnerParams params;
  Curve ring = wegner_closed_ring(0.35, 1.4, 3, 1, 2048, &params);
  for (double dt : {2e-3, 1e-3}) {
    Curve stepped = planar_filament_step(ring, dt);
    CHECK(std::abs(stepped.period - ring.period) < 10.0 * dt * dt * ring.period);
  }
}
