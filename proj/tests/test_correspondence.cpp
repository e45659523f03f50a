#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bikegeo/correspondence.hpp"

using namespace bikegeo;

namespace {

Curve circle(int samples = 1024, int dim = 2, int folds = 1) {
  CurveSpec spec;
  spec.id = "circle_multi";
  spec.param["dimension"] = dim;
  spec.param["n_folds"] = folds;
  return build_curve(spec, samples * folds);
}

Eigen::Vector2d v2(double x, double y) { return {x, y}; }

}  // namespace

TEST_CASE("glide reflection basics") {
  CHECK((glide_reflect(v2(0, 0), v2(1, 0), v2(0, 1)) - v2(1, -1)).norm() < 1e-14);
  CHECK((glide_reflect(v2(0.3, 0.4), v2(1.1, -0.2), v2(0.3, 0.4)) - v2(1.1, -0.2)).norm() <
        1e-14);
  CHECK_THROWS_AS(glide_reflect(v2(1, 1), v2(1, 1), v2(0, 0)), std::invalid_argument);
}

TEST_CASE("butterfly completion: worked example, side lengths, cyclic shift") {
  Butterfly bf = butterfly_complete(v2(0, 0), v2(2, 0), v2(3, 1));
  CHECK((bf.D - v2(1.4, -0.2)).norm() < 1e-12);
  CHECK(std::abs((bf.A - bf.B).norm() - (bf.C - bf.D).norm()) < 1e-12);
  CHECK(std::abs((bf.B - bf.C).norm() - (bf.A - bf.D).norm()) < 1e-12);

  // cyclic shift: completing (B, C, D) returns A
  Butterfly bf2 = butterfly_complete(bf.B, bf.C, bf.D);
  CHECK((bf2.D - bf.A).norm() < 1e-12);

  // square corners fold onto themselves (degenerate butterfly)
  Butterfly sq = butterfly_complete(v2(0, 0), v2(1, 0), v2(1, 1));
  CHECK((sq.D - v2(1, 0)).norm() < 1e-13);  // D = B

  CHECK_THROWS_AS(butterfly_complete(v2(0, 0), v2(1, 0), v2(0, 0)), std::invalid_argument);
}

TEST_CASE("glide reflections around a butterfly compose to the identity") {
  Rng rng(61);
  Butterfly bf = butterfly_complete(v2(0.1, 0.0), v2(1.7, 0.4), v2(2.2, -1.0));
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x = 3.0 * rng.unit_vector(2);
    Eigen::VectorXd y = glide_reflect(bf.A, bf.B, x);
    y = glide_reflect(bf.B, bf.C, y);
    y = glide_reflect(bf.C, bf.D, y);
    y = glide_reflect(bf.D, bf.A, y);
    CHECK((y - x).norm() < 1e-10);
  }
}

TEST_CASE("bicycle partner of the circle at ell_{1,2} is Gamma_{1,2}") {
  const double ell = ell_kn(1, 2);
  Curve two = circle(1024, 2, 2);
  Curve partner = bicycle_partner(two, ell, v2(1, 0), 2048);
  CHECK(partner.closed);
  Curve g12 = gamma_kn(1, 2, 2048);
  double worst = 0.0;
  for (int i = 0; i < partner.sample_count(); i += 64)
    worst = std::max(worst,
                     (partner.points.row(i).transpose() - g12.position(partner.params[i]))
                         .norm());
  CHECK(worst < 1e-6);
  CHECK(std::abs(partner.points(0, 0) - (1.0 + 2.0 * ell)) < 1e-9);
}

TEST_CASE("bicycle partner at a generic ell > 1 does not close") {
  Curve one = circle(1024);
  Curve partner = bicycle_partner(one, 1.7, v2(1, 0), 2048);
  CHECK(!partner.closed);
  double gap =
      (partner.points.bottomRows(1) - partner.points.topRows(1)).norm();
  CHECK(gap > 1e-3);
}

TEST_CASE("partner of the partner with reversed direction returns the front") {
  Rng rng(67);
  Curve front = random_smooth_closed_curve(2, rng, 512);
  const double ell = 0.8;
  Eigen::VectorXd r0 = rng.unit_vector(2);
  Curve partner = bicycle_partner(front, ell, r0, 4096);
  Curve back = bicycle_partner(partner, ell, -r0, 4096);
  double worst = 0.0;
  for (int i = 0; i < front.sample_count(); i += 64)
    worst = std::max(worst,
                     (back.position(front.params[i]) - front.position(front.params[i]))
                         .norm());
  CHECK(worst < 1e-6);
}

TEST_CASE("verify_correspondence: ambiguous circle pair and negative control") {
  // the classic ambiguous configuration: one circle traversed with a shift;
  // chord 2 lambda = 2 R sin(sigma/2), midpoints on the concentric rear circle
  const double R = 1.3, sigma = 1.1;
  auto make = [&](double shift) {
    AnalyticJet jet;
    jet.p = [=](double t) {
      return Eigen::Vector2d(R * std::cos(t + shift), R * std::sin(t + shift));
    };
    jet.d1 = [=](double t) {
      return Eigen::Vector2d(-R * std::sin(t + shift), R * std::cos(t + shift));
    };
    return curve_from_function(2, jet, 0.0, 2.0 * kPi, 512, true, "circle_shift");
  };
  Curve c1 = make(0.0), c2 = make(sigma);
  CorrespondenceResidual res =
      verify_correspondence(c1, c2, 2.0 * R * std::sin(sigma / 2.0));
  CHECK(res.chord_dev < 1e-12);
  CHECK(res.tangency_res < 1e-12);
  CHECK(res.glide_res < 1e-12);

  // unrelated curves fail loudly
  Curve e;
  {
    AnalyticJet jet;
    jet.p = [](double t) { return Eigen::Vector2d(2.0 * std::cos(t), std::sin(t)); };
    jet.d1 = [](double t) { return Eigen::Vector2d(-2.0 * std::sin(t), std::cos(t)); };
    e = curve_from_function(2, jet, 0.0, 2.0 * kPi, 512, true, "ellipse");
  }
  CorrespondenceResidual bad = verify_correspondence(c1, e, 1.0);
  CHECK(bad.chord_dev > 0.1);
  CHECK(bad.tangency_res > 0.01);
}

TEST_CASE("verify_correspondence: constructed partner passes") {
  Rng rng(71);
  Curve front = random_smooth_closed_curve(2, rng, 512);
  const double ell = 0.7;
  Curve partner = bicycle_partner(front, ell, rng.unit_vector(2), 2048);
  // align the front onto the integration grid, keeping its closures
  Curve front_on_grid = curve_on_grid(front, partner.sample_count() - 1);
  CorrespondenceResidual res = verify_correspondence(front_on_grid, partner, 2.0 * ell);
  CHECK(res.chord_dev < 1e-7);
  CHECK(res.tangency_res < 1e-7);

  // arc-length preservation under correspondence
  CHECK(std::abs(front.length() - partner.length()) < 1e-6);
}

TEST_CASE("bianchi permutability on circle partners") {
  const double ell1 = ell_kn(1, 2), ell2 = ell_kn(1, 3);
  Curve B = circle(512, 2, 6);  // common multiple so both partners sample well
  Curve A = bicycle_partner(B, ell1, v2(1, 0), 3072);
  Curve C = bicycle_partner(B, ell2, v2(0, 1), 3072);
  Curve B_grid = curve_on_grid(B, A.sample_count() - 1);
  BianchiReport rep = bianchi_check(A, B_grid, C, 2.0 * ell1, 2.0 * ell2);
  CHECK(rep.ad.chord_dev < 1e-6);
  CHECK(rep.ad.tangency_res < 1e-6);
  CHECK(rep.cd_res.chord_dev < 1e-6);
  CHECK(rep.cd_res.tangency_res < 1e-6);
  CHECK(rep.degenerate_samples == 0);

  // swapped roles give the mirrored butterfly with the same quality
  BianchiReport swapped = bianchi_check(C, B_grid, A, 2.0 * ell2, 2.0 * ell1);
  CHECK(swapped.ad.chord_dev < 1e-6);
  CHECK(swapped.cd_res.chord_dev < 1e-6);
}

TEST_CASE("bianchi butterfly stays coplanar for space curves") {
  Rng rng(73);
  Curve B = random_smooth_closed_curve(3, rng, 512);
  Curve A = bicycle_partner(B, 0.5, rng.unit_vector(3), 2048);
  Curve C = bicycle_partner(B, 0.9, rng.unit_vector(3), 2048);
  Curve B_grid = curve_on_grid(B, A.sample_count() - 1);
  BianchiReport rep = bianchi_check(A, B_grid, C, 2.0 * 0.5, 2.0 * 0.9);
  CHECK(rep.coplanarity < 1e-8);
}

TEST_CASE("monodromy conjugacy: Gamma_{1,2} against the doubled circle") {
  Curve g12 = gamma_kn(1, 2, 1024);
  Curve two = circle(1024, 2, 2);
  std::vector<double> lambdas = {0.3, 0.7, ell_kn(1, 2), 1.5};
  auto rows = monodromy_conjugacy_check(g12, two, lambdas);
  for (const auto& row : rows) {
    CHECK(row.lorentz_rel_err < 1e-6);
    CHECK(row.sl2_err < 1e-6);
  }
  // self comparison is exact
  auto self_rows = monodromy_conjugacy_check(g12, g12, {0.5});
  CHECK(self_rows[0].lorentz_rel_err == 0.0);
}

TEST_CASE("gamma_kn: anchor point and correspondence with the base circle") {
  Curve g = gamma_kn(1, 2, 1024);
  CHECK(std::abs(g.points(0, 0) - (1.0 + 4.0 / std::sqrt(3.0))) < 1e-12);
  CHECK(std::abs(g.points(0, 1)) < 1e-12);

  Curve two = circle(512, 2, 2);
  Curve two_grid = curve_on_grid(two, g.sample_count() - 1);
  CorrespondenceResidual res = verify_correspondence(g, two_grid, 2.0 * ell_kn(1, 2));
  CHECK(res.chord_dev < 1e-7);
  CHECK(res.tangency_res < 1e-7);
}

TEST_CASE("rotation numbers: counts, table values, and equation residuals") {
  auto r13 = rotation_numbers(1, 3);
  REQUIRE(r13.size() == 1);
  CHECK(r13[0] == doctest::Approx(0.5).epsilon(1e-12));

  auto r14 = rotation_numbers(1, 4);
  REQUIRE(r14.size() == 2);
  CHECK(std::abs(std::tan(kPi * r14[0]) * std::tan(kPi * r14[0]) - 5.0) < 1e-10);
  CHECK(std::abs(r14[0] + r14[1] - 1.0) < 1e-12);

  auto r15 = rotation_numbers(1, 5);
  REQUIRE(r15.size() == 3);
  CHECK(r15[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(std::tan(kPi * r15[0]) * std::tan(kPi * r15[0]) - 5.0 / 3.0) < 1e-10);

  // paper table, rho <= 1/2 entries to two decimals
  struct Row {
    int k, n;
    std::vector<double> rho;
  };
  std::vector<Row> table = {{1, 3, {0.5}},          {1, 4, {0.37}},
                            {1, 5, {0.29, 0.5}},    {2, 5, {0.31}},
                            {3, 5, {0.5}},          {1, 6, {0.24, 0.41}},
                            {1, 7, {0.21, 0.35, 0.5}}, {2, 7, {0.21, 0.37}},
                            {3, 7, {0.23, 0.5}},    {4, 7, {0.35}},
                            {5, 7, {0.5}}};
  for (const auto& row : table) {
    auto rhos = rotation_numbers(row.k, row.n);
    std::vector<double> half;
    for (double r : rhos)
      if (r <= 0.5 + 1e-12) half.push_back(r);
    REQUIRE(half.size() == row.rho.size());
    for (size_t i = 0; i < half.size(); ++i)
      CHECK(std::abs(std::round(half[i] * 100.0) / 100.0 - row.rho[i]) < 5e-3);
  }

  // equation residual in the pole-free form
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 4}, {2, 5}, {3, 7}}) {
    for (double rho : rotation_numbers(k, n)) {
      double lhs = n * std::sin(k * kPi * rho) * std::cos(n * kPi * rho) -
                   k * std::sin(n * kPi * rho) * std::cos(k * kPi * rho);
      CHECK(std::abs(lhs) < 1e-12);
    }
  }

  CHECK(rotation_numbers(3, 4).empty());  // k = n-1
  CHECK_THROWS_AS(rotation_numbers(2, 4), std::invalid_argument);
}

TEST_CASE("zindler_verify: circle passes for any rotation number") {
  Curve c = circle(1024);
  for (double rho : {0.123, 0.37, 0.5}) {
    ZindlerCertificate cert = zindler_verify(c, rho);
    CHECK(cert.pass);
    CHECK(std::abs(cert.chord_length - 2.0 * std::sin(kPi * rho)) < 1e-9);
  }
}

TEST_CASE("zindler_verify: Gamma_{1,4} passes at its rotation numbers") {
  Curve g = gamma_kn(1, 4, 2048);
  for (double rho : rotation_numbers(1, 4)) {
    ZindlerCertificate cert = zindler_verify(g, rho);
    CHECK(cert.pass);
    CHECK(cert.chord_dev < 1e-6 * 10.0);  // scale ~ bbox
    CHECK(cert.tangency_res < 1e-6);
  }
}

TEST_CASE("zindler_verify: Gamma_{n-1,n} fails (negative control)") {
  Curve g = gamma_kn(3, 4, 2048);
  CHECK(rotation_numbers(3, 4).empty());
  for (double rho : {0.25, 0.37, 0.5}) {
    ZindlerCertificate cert = zindler_verify(g, rho);
    CHECK(!cert.pass);
  }
}

TEST_CASE("shift law of the closed lambda-partners of Gamma_{k,n}") {
  // for Gamma_{k,n} the closed 2 lambda-partner is a rotation by chi with a
  // parameter shift tau: tan(b tau / 2) = b tan(gamma / 2), chi = tau - gamma,
  // lambda = sin(gamma/2), b = k/n
  const int k = 1, n = 3;
  Curve g = gamma_kn(k, n, 2048);
  const double lambda = 0.55;
  const double gamma = 2.0 * std::asin(lambda);
  const double b = static_cast<double>(k) / n;
  double tau_pred = (2.0 / b) * std::atan(b * std::tan(gamma / 2.0));
  double chi_pred = tau_pred - gamma;

  MonodromyElement e =
      moebius_from_lorentz(lorentz_lift_monodromy(g, lambda, g.t0(), g.t1()));
  std::vector<FixedPoint> fps = fixed_points(e);
  REQUIRE(fps.size() == 2);
  double best = 1e300;
  for (const auto& fp : fps) {
    if (!fp.attracting) continue;
    Curve partner = bicycle_partner(g, lambda, fp.r, 4096);
    REQUIRE(partner.closed);
    // fit partner(t) = e^{-i chi} Gamma(t + tau) at t = 0 using the predicted
    // values; measure the worst pointwise gap
    auto gap = [&](double chi, double tau) {
      double worst = 0.0;
      for (int i = 0; i < partner.sample_count(); i += 32) {
        Eigen::Vector2d p = g.position(partner.params[i] + tau);
        Eigen::Vector2d rot(std::cos(-chi) * p[0] - std::sin(-chi) * p[1],
                            std::sin(-chi) * p[0] + std::cos(-chi) * p[1]);
        worst = std::max(worst,
                         (partner.points.row(i).transpose() - Eigen::VectorXd(rot)).norm());
      }
      return worst;
    };
    best = std::min({best, gap(chi_pred, tau_pred), gap(-chi_pred, -tau_pred)});
  }
  CHECK(best < 1e-6);
}

TEST_CASE("space partners of Gamma_{k,n}: spherical, or planar at exceptional lambda") {
  const int k = 1, n = 3;
  Curve g2 = gamma_kn(k, n, 1024);
  // embed in R^3
  auto keep = std::make_shared<Curve>(g2);
  AnalyticJet jet;
  jet.p = [keep](double t) {
    Eigen::Vector2d p = keep->position(t);
    return Eigen::Vector3d(p[0], p[1], 0.0);
  };
  jet.d1 = [keep](double t) {
    Eigen::Vector2d v = keep->velocity(t);
    return Eigen::Vector3d(v[0], v[1], 0.0);
  };
  jet.d2 = [keep](double t) {
    Eigen::Vector2d a = keep->acceleration(t);
    return Eigen::Vector3d(a[0], a[1], 0.0);
  };
  Curve g3 = curve_from_function(3, jet, 0.0, 2.0 * kPi * n, 2048, true, "gamma_kn_3d");

  // non-exceptional lambda > 1: closed space partner on a sphere centered on
  // the symmetry axis
  const double lambda = 1.2;
  MonodromyElement e =
      moebius_from_lorentz(lorentz_lift_monodromy(g3, lambda, g3.t0(), g3.t1()));
  std::vector<FixedPoint> fps = fixed_points(e);
  REQUIRE(!fps.empty());
  Curve partner = bicycle_partner(g3, lambda, fps[0].r, 4096);
  REQUIRE(partner.closed);
  CHECK(partner.points.col(2).cwiseAbs().maxCoeff() > 0.1);  // genuinely spatial
  SphereFit fit = fit_sphere_on_axis(partner.unique_points());
  CHECK(fit.residual < 1e-5);

  // exceptional lambda = ell_{k',n}: the partner stays in the plane
  Curve planar = bicycle_partner(g3, ell_kn(1, 3), Eigen::Vector3d(1, 0, 0), 4096);
  CHECK(planar.closed);
  CHECK(planar.points.col(2).cwiseAbs().maxCoeff() < 1e-6);
}
