#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bikegeo/curve.hpp"
#include "bikegeo/frenet.hpp"

using namespace bikegeo;

namespace {

Curve unit_circle(int samples = 256, int dim = 2) {
  CurveSpec spec;
  spec.id = "circle_multi";
  spec.param["dimension"] = dim;
  return build_curve(spec, samples);
}

Curve ellipse(double a, double b, int samples) {
  AnalyticJet jet;
  jet.p = [=](double t) { return Eigen::Vector2d(a * std::cos(t), b * std::sin(t)); };
  jet.d1 = [=](double t) { return Eigen::Vector2d(-a * std::sin(t), b * std::cos(t)); };
  jet.d2 = [=](double t) { return Eigen::Vector2d(-a * std::cos(t), -b * std::sin(t)); };
  jet.d3 = [=](double t) { return Eigen::Vector2d(a * std::sin(t), -b * std::cos(t)); };
  return curve_from_function(2, jet, 0.0, 2.0 * kPi, samples, true, "ellipse");
}

}  // namespace

TEST_CASE("build_curve: circle, multiple circle, line") {
  Curve c1 = unit_circle();
  CHECK(c1.closed);
  CHECK(c1.period == doctest::Approx(2.0 * kPi));
  CHECK((c1.position(0.0) - Eigen::Vector2d(1, 0)).norm() < 1e-15);

  CurveSpec spec3;
  spec3.id = "circle_multi";
  spec3.param["n_folds"] = 3;
  Curve c3 = build_curve(spec3, 768);
  CHECK(c3.period == doctest::Approx(6.0 * kPi));
  CHECK(c3.closed);

  CurveSpec line;
  line.id = "line";
  line.param["T"] = 10.0;
  Curve l = build_curve(line, 128);
  CHECK(!l.closed);
  CHECK((l.position(10.0) - Eigen::Vector2d(10, 0)).norm() < 1e-14);

  CurveSpec bogus;
  bogus.id = "lemniscate";
  CHECK_THROWS_AS(build_curve(bogus, 64), std::invalid_argument);
  CurveSpec bad_kn;
  bad_kn.id = "gamma_kn";
  bad_kn.param["k"] = 3;
  bad_kn.param["n"] = 3;
  CHECK_THROWS_AS(build_curve(bad_kn, 64), std::invalid_argument);
}

TEST_CASE("resample_arclength: circle already arclength") {
  Curve c = unit_circle();
  Curve r = resample_arclength(c, 100);
  for (int i = 0; i < r.sample_count(); ++i)
    CHECK(std::abs(r.velocity(r.params[i]).norm() - 1.0) < 1e-6);
  CHECK(std::abs(r.period - 2.0 * kPi) < 1e-10);
}

TEST_CASE("resample_arclength: ellipse perimeter matches independent quadrature") {
  Curve e = ellipse(2.0, 1.0, 512);
  Curve r = resample_arclength(e, 400);
  // independent oracle: adaptive quadrature of the analytic speed
  double perimeter = adaptive_simpson(
      [](double t) {
        return std::sqrt(4.0 * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t));
      },
      0.0, 2.0 * kPi, 1e-13);
  CHECK(std::abs(r.period - perimeter) < 1e-6);
  CHECK(std::abs(r.length() - perimeter) < 1e-6);
  for (int i = 0; i < r.sample_count(); ++i)
    CHECK(std::abs(r.velocity(r.params[i]).norm() - 1.0) < 1e-7);
}

TEST_CASE("resample_arclength: gamma_kn(1,2) has length 4 pi") {
  CurveSpec spec;
  spec.id = "gamma_kn";
  spec.param["k"] = 1;
  spec.param["n"] = 2;
  Curve g = build_curve(spec, 1024);
  Curve r = resample_arclength(g, 1024);
  CHECK(std::abs(r.period - 4.0 * kPi) < 1e-4);
}

TEST_CASE("resample_arclength is idempotent up to tolerance") {
  Curve e = ellipse(2.0, 1.0, 512);
  Curve r1 = resample_arclength(e, 256);
  Curve r2 = resample_arclength(r1, 256);
  CHECK(std::abs(r1.period - r2.period) < 1e-8);
  for (int i = 0; i < r1.sample_count(); ++i)
    CHECK((r1.points.row(i) - r2.points.row(i)).norm() < 1e-6);
}

TEST_CASE("frenet_data: unit circle curvature 1") {
  Curve r = resample_arclength(unit_circle(512), 512);
  FrenetData fd = frenet_data(r);
  for (int i = 0; i < fd.curvature.size(); ++i)
    CHECK(fd.curvature[i] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("frenet_data: helix curvature and torsion match the closed forms") {
  // helix (cos t, sin t, c t)/sqrt(1+c^2) is arclength; kappa = 1/(1+c^2),
  // tau = c/(1+c^2) by the standard formulas
  const double c = 0.5;
  const double s = std::sqrt(1.0 + c * c);
  AnalyticJet jet;
  jet.p = [=](double t) {
    return Eigen::Vector3d(std::cos(t / s), std::sin(t / s), c * t / s);
  };
  jet.d1 = [=](double t) {
    return Eigen::Vector3d(-std::sin(t / s) / s, std::cos(t / s) / s, c / s);
  };
  jet.d2 = [=](double t) {
    return Eigen::Vector3d(-std::cos(t / s) / (s * s), -std::sin(t / s) / (s * s), 0.0);
  };
  jet.d3 = [=](double t) {
    return Eigen::Vector3d(std::sin(t / s) / (s * s * s), -std::cos(t / s) / (s * s * s),
                           0.0);
  };
  Curve h = curve_from_function(3, jet, 0.0, 6.0 * kPi, 2048, false, "helix");
  FrenetData fd = frenet_data(h);
  const double kappa_expect = 1.0 / (1.0 + c * c);
  const double tau_expect = c / (1.0 + c * c);
  for (int i = 8; i < fd.curvature.size() - 8; ++i) {
    CHECK(fd.curvature[i] == doctest::Approx(kappa_expect).epsilon(1e-6));
    CHECK(fd.torsion[i] == doctest::Approx(tau_expect).epsilon(1e-6));
  }
  // frame orthonormality
  for (int i = 0; i < fd.curvature.size(); i += 97) {
    CHECK(std::abs(fd.tangent.row(i).dot(fd.normal.row(i))) < 1e-8);
    CHECK(std::abs(fd.normal.row(i).dot(fd.binormal.row(i))) < 1e-8);
    CHECK(std::abs(fd.tangent.row(i).norm() - 1.0) < 1e-8);
  }
}

TEST_CASE("frenet_data: planar curve in R^3 has zero torsion") {
  Curve c3 = resample_arclength(unit_circle(512, 3), 512);
  FrenetData fd = frenet_data(c3);
  for (int i = 0; i < fd.torsion.size(); ++i) {
    REQUIRE(fd.torsion_valid[i]);
    CHECK(std::abs(fd.torsion[i]) < 1e-8);
  }
}

TEST_CASE("frenet_data: line flags torsion unavailable") {
  CurveSpec line;
  line.id = "line";
  line.param["dimension"] = 3;
  Curve l = build_curve(line, 128);
  FrenetData fd = frenet_data(l);
  for (int i = 0; i < static_cast<int>(fd.torsion_valid.size()); ++i)
    CHECK(!fd.torsion_valid[i]);
}

TEST_CASE("frenet convergence: Frenet equations hold to discretization order") {
  Curve r = resample_arclength(ellipse(2.0, 1.0, 1024), 1024);
  FrenetData fd = frenet_data(r);
  // v' = kappa n at interior samples, via stencils on the tangent samples
  Eigen::MatrixXd vdot = fd_derivative(fd.tangent, fd.h, 1, true);
  double worst = 0.0;
  for (int i = 0; i < fd.curvature.size(); ++i)
    worst = std::max(worst,
                     (vdot.row(i) - fd.curvature[i] * fd.normal.row(i)).norm());
  CHECK(worst < 1e-5);
}

TEST_CASE("signed_planar_area: circle orientations and figure eight") {
  CHECK(signed_planar_area(unit_circle(512)) == doctest::Approx(kPi).epsilon(1e-10));

  AnalyticJet cw;
  cw.p = [](double t) { return Eigen::Vector2d(std::cos(-t), std::sin(-t)); };
  cw.d1 = [](double t) { return Eigen::Vector2d(std::sin(-t), -std::cos(-t)); };
  Curve c_cw = curve_from_function(2, cw, 0.0, 2.0 * kPi, 512, true, "circle_cw");
  CHECK(signed_planar_area(c_cw) == doctest::Approx(-kPi).epsilon(1e-10));

  // lemniscate of Gerono: symmetric lobes cancel; oracle = shoelace on a
  // dense polygon
  AnalyticJet fig8;
  fig8.p = [](double t) {
    return Eigen::Vector2d(std::sin(t), std::sin(t) * std::cos(t));
  };
  fig8.d1 = [](double t) {
    return Eigen::Vector2d(std::cos(t), std::cos(2.0 * t));
  };
  Curve f = curve_from_function(2, fig8, 0.0, 2.0 * kPi, 2048, true, "figure8");
  double area = signed_planar_area(f);
  double shoelace = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    double t0 = 2.0 * kPi * i / N, t1 = 2.0 * kPi * (i + 1) / N;
    Eigen::Vector2d p0 = f.position(t0), p1 = f.position(t1);
    shoelace += 0.5 * (p0[0] * p1[1] - p0[1] * p1[0]);
  }
  CHECK(std::abs(area - shoelace) < 1e-6);
  CHECK(std::abs(area) < 1e-9);

  CHECK_THROWS_AS(signed_planar_area(build_curve(CurveSpec{"line", {}}, 64)),
                  std::invalid_argument);
}

TEST_CASE("signed_planar_area invariances") {
  Curve e = ellipse(2.0, 1.0, 512);
  double base = signed_planar_area(e);
  // rotation invariance
  const double th = 0.7;
  AnalyticJet rot;
  rot.p = [th](double t) {
    Eigen::Vector2d p(2.0 * std::cos(t), std::sin(t));
    return Eigen::Vector2d(std::cos(th) * p[0] - std::sin(th) * p[1],
                           std::sin(th) * p[0] + std::cos(th) * p[1]);
  };
  Curve er = curve_from_function(2, rot, 0.0, 2.0 * kPi, 512, true, "ellipse_rot");
  CHECK(signed_planar_area(er) == doctest::Approx(base).epsilon(1e-10));
  // parameter shift invariance
  AnalyticJet shift;
  shift.p = [](double t) { return Eigen::Vector2d(2.0 * std::cos(t + 1.3), std::sin(t + 1.3)); };
  Curve es = curve_from_function(2, shift, 0.0, 2.0 * kPi, 512, true, "ellipse_shift");
  CHECK(signed_planar_area(es) == doctest::Approx(base).epsilon(1e-10));
  // reflection negates
  AnalyticJet refl;
  refl.p = [](double t) { return Eigen::Vector2d(2.0 * std::cos(t), -std::sin(t)); };
  Curve ef = curve_from_function(2, refl, 0.0, 2.0 * kPi, 512, true, "ellipse_refl");
  CHECK(signed_planar_area(ef) == doctest::Approx(-base).epsilon(1e-10));
}

TEST_CASE("gamma_kn symmetry: conjugation and D_k rotation") {
  CurveSpec spec;
  spec.id = "gamma_kn";
  spec.param["k"] = 2;
  spec.param["n"] = 5;
  Curve g = build_curve(spec, 2048);
  const int k = 2, n = 5;
  for (double t : {0.3, 1.9, 7.4}) {
    Eigen::Vector2d a = g.position(-t), b = g.position(t);
    CHECK(std::abs(a[0] - b[0]) < 1e-10);  // Gamma(-t) = conj Gamma(t)
    CHECK(std::abs(a[1] + b[1]) < 1e-10);
    Eigen::Vector2d c = g.position(t + 2.0 * kPi * n / k);
    double ang = 2.0 * kPi * n / k;
    Eigen::Vector2d rot(std::cos(ang) * b[0] - std::sin(ang) * b[1],
                        std::sin(ang) * b[0] + std::cos(ang) * b[1]);
    CHECK((c - rot).norm() < 1e-8);
  }
  // arclength parametrization is exact
  for (double t : {0.0, 2.0, 11.0})
    CHECK(std::abs(g.velocity(t).norm() - 1.0) < 1e-12);
}

TEST_CASE("curve CSV round trip") {
  Curve e = ellipse(2.0, 1.0, 64);
  std::string path = "test_curve_roundtrip.csv";
  write_curve_csv(e, path);
  Curve back = read_curve_csv(path);
  CHECK(back.dimension == 2);
  CHECK(back.closed);
  CHECK(back.sample_count() == e.sample_count());
  CHECK((back.points - e.points).cwiseAbs().maxCoeff() == 0.0);  // 17 digits
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("curve validation rejects degenerate input") {
  Eigen::VectorXd t(3);
  t << 0.0, 1.0, 2.0;
  Eigen::MatrixXd pts(3, 2);
  pts << 0, 0, 0, 0, 1, 0;  // repeated point
  CHECK_THROWS_AS(curve_from_samples(t, pts, false, ""), std::invalid_argument);
}
