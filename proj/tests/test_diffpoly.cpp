#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bikegeo/bike_dynamics.hpp"
#include "bikegeo/diffpoly.hpp"

using namespace bikegeo;
using namespace bikegeo::diffpoly;

namespace {

DiffPoly k(int order = 0, int power = 1) { return kappa(order, power); }
DiffPoly t(int order = 0, int power = 1) { return tau(order, power); }

}  // namespace

TEST_CASE("dp_derivative: Leibniz rule") {
  CHECK(dp_derivative(k() * k()) == rat(2) * (k() * k(1)));
  CHECK(dp_derivative(k() * t()) == k(1) * t() + k() * t(1));
  CHECK(dp_derivative(DiffPoly(rat(5))).is_zero());
  // weight increases by exactly 1
  DiffPoly p = k(1) * t() * t();  // weight 2 + 1 + 1 = 4
  CHECK(p.weight() == 4);
  CHECK(dp_derivative(p).weight() == 5);
}

TEST_CASE("zn_series reproduces the printed Z_1..Z_3") {
  auto Z = zn_series(3);
  CHECK(Z[0].is_zero());
  CHECK(Z[1] == rat(1, 2) * k());
  CHECK(Z[2] == rat(1, 2) * k(1) + irat(1, 2) * (t() * k()));
  DiffPoly Z3_expect = rat(1, 2) * k(2) + rat(1, 8) * k(0, 3) -
                       rat(1, 2) * (t(0, 2) * k()) + irat(1, 2) * (t(1) * k()) +
                       irat(1) * (t() * k(1));
  CHECK(Z[3] == Z3_expect);
}

TEST_CASE("monodromy integrands match the printed I_0..I_4 exactly") {
  auto I = monodromy_integrands(4);
  CHECK(I[0].canonical == DiffPoly(rat(1)));
  CHECK(I[1].canonical == irat(-1) * t());
  CHECK(I[2].canonical == rat(-1, 2) * k(0, 2));
  CHECK(I[3].canonical == irat(-1, 2) * (k(0, 2) * t()));
  DiffPoly I4_expect =
      -(rat(1, 2) * (k() * k(2)) - rat(1, 2) * (k(0, 2) * t(0, 2)) + rat(1, 8) * k(0, 4));
  CHECK(I[4].canonical == I4_expect);
  for (int n = 0; n <= 4; ++n) {
    CHECK(I[n].parity_verified);
    // raw and canonical agree modulo an exact derivative
    TotalDerivativeResult td = equal_mod_total_derivative(I[n].raw, I[n].canonical);
    CHECK(td.equal);
    // weight grading
    if (!I[n].canonical.is_zero()) CHECK(I[n].canonical.weight() == n);
  }
}

TEST_CASE("filament fields match the printed hierarchy") {
  auto x = filament_fields(3);
  CHECK(x[0].comp[0] == DiffPoly(rat(-1)));
  CHECK(x[0].comp[1].is_zero());
  CHECK(x[0].comp[2].is_zero());

  CHECK(x[1].comp[0].is_zero());
  CHECK(x[1].comp[1].is_zero());
  CHECK(x[1].comp[2] == k());

  CHECK(x[2].comp[0] == rat(1, 2) * k(0, 2));
  CHECK(x[2].comp[1] == k(1));
  CHECK(x[2].comp[2] == k() * t());

  CHECK(x[3].comp[0] == k(0, 2) * t());
  CHECK(x[3].comp[1] == rat(2) * (k(1) * t()) + k() * t(1));
  CHECK(x[3].comp[2] == k() * t(0, 2) - k(2) - rat(1, 2) * k(0, 3));
}

TEST_CASE("filament fields satisfy the v-component consistency a' = kappa b") {
  auto x = filament_fields(6);
  for (size_t i = 1; i < x.size(); ++i) {
    DiffPoly lhs = dp_derivative(x[i].comp[0]);
    DiffPoly rhs = k() * x[i].comp[1];
    CHECK(lhs == rhs);
  }
}

TEST_CASE("filament integrands: printed list and experimental tail") {
  auto F = filament_integrands(6);
  CHECK(F[0].density == DiffPoly(rat(1)));
  CHECK(F[1].density == t());
  CHECK(F[2].density == k(0, 2));
  CHECK(F[3].density == k(0, 2) * t());
  CHECK(F[4].density == k(1, 2) + k(0, 2) * t(0, 2) - rat(1, 4) * k(0, 4));
  CHECK(!F[4].experimental);
  CHECK(F[5].experimental);
  CHECK_FALSE(F[5].density.is_zero());
}

TEST_CASE("identity chain between monodromy and filament integrals") {
  auto I = monodromy_integrands(4);
  auto F = filament_integrands(5);
  CHECK(I[0].canonical == F[0].density);
  CHECK(I[1].canonical == irat(-1) * F[1].density);
  CHECK(I[2].canonical == rat(-1, 2) * F[2].density);
  CHECK(I[3].canonical == irat(-1, 2) * F[3].density);
  // I_4 = (1/2) F_5 modulo the exact derivative -(1/2) d(kappa kappa')/dt
  TotalDerivativeResult td =
      equal_mod_total_derivative(I[4].canonical, rat(1, 2) * F[4].density);
  CHECK(td.equal);
  CHECK(td.witness == rat(-1, 2) * (k() * k(1)));
}

TEST_CASE("equal_mod_total_derivative: witnesses and negatives") {
  // kappa kappa'' + kappa'^2 = d(kappa kappa')/dt
  TotalDerivativeResult td =
      equal_mod_total_derivative(k() * k(2) + k(1, 2), DiffPoly());
  CHECK(td.equal);
  CHECK(td.witness == k() * k(1));

  TotalDerivativeResult same = equal_mod_total_derivative(k(0, 2), k(0, 2));
  CHECK(same.equal);
  CHECK(same.witness.is_zero());

  CHECK(!equal_mod_total_derivative(k(0, 2), DiffPoly()).equal);
  CHECK(!equal_mod_total_derivative(DiffPoly(rat(1)), DiffPoly()).equal);
}

TEST_CASE("parity of the monodromy integrands up to order 8") {
  auto I = monodromy_integrands(8);
  for (int n = 0; n <= 8; ++n) CHECK(I[n].parity_verified);
}

TEST_CASE("evaluate_on_curve: unit circle values") {
  CurveSpec spec;
  spec.id = "circle_multi";
  Curve c = build_curve(spec, 1024);
  FrenetData fd = frenet_data(c);
  auto I = monodromy_integrands(4);
  CHECK(std::abs(evaluate_on_curve(I[0].canonical, fd, true) - cd(2.0 * kPi, 0)) < 1e-10);
  CHECK(std::abs(evaluate_on_curve(I[2].canonical, fd, true) - cd(-kPi, 0)) < 1e-8);
  CHECK(std::abs(evaluate_on_curve(I[4].canonical, fd, true) - cd(-kPi / 4.0, 0)) < 1e-8);
}

TEST_CASE("evaluate_on_curve converges at 2nd order or better") {
  auto wobble = [](int samples) {
    AnalyticJet jet;
    jet.p = [](double u) {
      return Eigen::Vector3d(std::cos(u), std::sin(u), 0.25 * std::sin(2.0 * u));
    };
    jet.d1 = [](double u) {
      return Eigen::Vector3d(-std::sin(u), std::cos(u), 0.5 * std::cos(2.0 * u));
    };
    Curve c = curve_from_function(3, jet, 0.0, 2.0 * kPi, samples, true, "wobble");
    return resample_arclength(c, samples);
  };
  auto I = monodromy_integrands(4);
  cd fine = evaluate_on_curve(I[4].canonical, frenet_data(wobble(4096)), true);
  cd mid = evaluate_on_curve(I[4].canonical, frenet_data(wobble(1024)), true);
  cd coarse = evaluate_on_curve(I[4].canonical, frenet_data(wobble(512)), true);
  double err_mid = std::abs(mid - fine), err_coarse = std::abs(coarse - fine);
  CHECK(err_mid < err_coarse / 3.0);  // at least ~2nd order
}

TEST_CASE("numeric bridge: integrand values match the multiplier Taylor series") {
  AnalyticJet jet;
  jet.p = [](double u) {
    return Eigen::Vector3d(std::cos(u), std::sin(u), 0.2 * std::sin(2.0 * u));
  };
  jet.d1 = [](double u) {
    return Eigen::Vector3d(-std::sin(u), std::cos(u), 0.4 * std::cos(2.0 * u));
  };
  jet.d2 = [](double u) {
    return Eigen::Vector3d(-std::cos(u), -std::sin(u), -0.8 * std::sin(2.0 * u));
  };
  Curve raw = curve_from_function(3, jet, 0.0, 2.0 * kPi, 1024, true, "wobble");
  Curve c = resample_arclength(raw, 1024);
  FrenetData fd = frenet_data(c);
  auto I = monodromy_integrands(4);
  Eigen::VectorXcd taylor = multiplier_taylor(c, 5);
  for (int n = 0; n <= 4; ++n) {
    cd expect = evaluate_on_curve(I[n].canonical, fd, true);
    if (std::abs(expect) > 1e-6)
      CHECK(std::abs(taylor[n] - expect) / std::abs(expect) < 1e-3);
    else
      CHECK(std::abs(taylor[n] - expect) < 1e-3);
  }
}

TEST_CASE("pretty printing and JSON term lists") {
  DiffPoly p = rat(-1, 2) * k(0, 2) + irat(1) * (t() * k(1));
  std::string s = p.str();
  CHECK(s.find("kappa") != std::string::npos);
  nlohmann::json j = p.to_json();
  REQUIRE(j.size() == 2);
  for (const auto& term : j) {
    CHECK(term.contains("coeff_re"));
    CHECK(term.contains("coeff_im"));
    CHECK(term.contains("factors"));
  }
}

TEST_CASE("evaluate_on_curve rejects unavailable derivative orders") {
  CurveSpec spec;
  spec.id = "circle_multi";
  Curve c = build_curve(spec, 256);
  FrenetData fd = frenet_data(c);
  CHECK_THROWS_AS(evaluate_on_curve(k(5), fd, true), std::invalid_argument);
}
