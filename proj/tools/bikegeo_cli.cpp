// Command-line front end: every verification pipeline with file-based inputs
// and outputs. Exit codes: 0 success, 2 validation error, 3 numerical
// diagnostic failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "bikegeo/correspondence.hpp"
#include "bikegeo/diffpoly.hpp"
#include "bikegeo/integrable.hpp"
#include "bikegeo/io.hpp"
#include "bikegeo/runconfig.hpp"

namespace fs = std::filesystem;
using namespace bikegeo;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

Eigen::VectorXd default_direction(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return rng.unit_vector(dim);
}

int cmd_simulate(const RunConfig& cfg) {
  Curve front = cfg.front();
  double ell = cfg.ell.empty() ? 1.0 : cfg.ell.front();
  Eigen::VectorXd r0 = default_direction(front.dimension, cfg.seed);
  BikeTrajectory traj =
      integrate_bicycle_sphere(front, ell, r0, front.t0(), front.t1(), cfg.samples);
  write_trajectory_csv(traj, out_path(cfg, "trajectory.csv"));
  nlohmann::json j;
  j["ell"] = ell;
  j["norm_drift"] = traj.norm_drift;
  j["step_error_est"] = traj.step_error_est;
  write_json(out_path(cfg, "simulate.json"), j);
  return 0;
}

int cmd_monodromy(const RunConfig& cfg) {
  Curve front = cfg.front();
  std::vector<double> ells = cfg.ell.empty() ? std::vector<double>{0.5} : cfg.ell;
  int idx = 0;
  for (double ell : ells) {
    LorentzMatrix M = lorentz_lift_monodromy(front, ell, front.t0(), front.t1());
    MonodromyElement elem = moebius_from_lorentz(M);
    MonodromyReport rep = monodromy_report(front, ell);
    write_json(out_path(cfg, "monodromy_" + std::to_string(idx) + ".json"),
               monodromy_report_json(elem, rep));
    write_lorentz_json(M, out_path(cfg, "lorentz_" + std::to_string(idx) + ".json"));
    ++idx;
  }
  return 0;
}

int cmd_planimeter(const RunConfig& cfg) {
  Curve front = cfg.front();
  std::vector<double> eps =
      cfg.eps.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.025} : cfg.eps;
  Eigen::VectorXd r0 = default_direction(front.dimension, cfg.seed);
  PlanimeterReport rep = planimeter_check(front, eps, r0);
  nlohmann::json j;
  std::vector<double> flat;
  for (int r = 0; r < rep.area.matrix.rows(); ++r)
    for (int c = 0; c < rep.area.matrix.cols(); ++c) flat.push_back(rep.area.matrix(r, c));
  j["area_matrix"] = flat;
  j["eps"] = rep.eps;
  j["error"] = rep.error;
  j["slope"] = rep.slope;
  write_json(out_path(cfg, "planimeter.json"), j);
  if (rep.slope < 3.0 - 0.2) {
    std::cerr << "planimeter: error slope " << rep.slope << " below 2.8\n";
    return 3;
  }
  return 0;
}

int cmd_correspond(const RunConfig& cfg) {
  Curve front = cfg.front();
  double ell = cfg.ell.empty() ? ell_kn(1, 2) : cfg.ell.front();
  Eigen::VectorXd r0 = Eigen::VectorXd::Zero(front.dimension);
  r0[0] = 1.0;
  Curve partner = bicycle_partner(front, ell, r0);
  write_curve_csv(partner, out_path(cfg, "partner.csv"));
  CorrespondenceResidual res = verify_correspondence(front, partner, 2.0 * ell);
  nlohmann::json j;
  j["ell"] = ell;
  j["chord_dev"] = res.chord_dev;
  j["tangency_res"] = res.tangency_res;
  j["glide_res"] = res.glide_res;
  j["partner_closed"] = partner.closed;
  write_json(out_path(cfg, "correspond.json"), j);
  return 0;
}

int cmd_zindler(const RunConfig& cfg) {
  std::vector<double> rhos = rotation_numbers(cfg.k, cfg.n);
  Curve g = gamma_kn(cfg.k, cfg.n, std::max(cfg.samples, 256 * cfg.n));
  nlohmann::json j;
  j["k"] = cfg.k;
  j["n"] = cfg.n;
  j["rho"] = rhos;
  std::vector<double> chords, chord_res, tang_res;
  std::vector<nlohmann::json> rows;
  for (double rho : rhos) {
    ZindlerCertificate cert = zindler_verify(g, rho, cfg.tol);
    chords.push_back(cert.chord_length);
    chord_res.push_back(cert.chord_dev);
    tang_res.push_back(cert.tangency_res);
    rows.push_back({{"k", cfg.k},
                    {"n", cfg.n},
                    {"rho", rho},
                    {"chord", cert.chord_length},
                    {"chord_dev", cert.chord_dev},
                    {"tangency_res", cert.tangency_res}});
  }
  j["chord"] = chords;
  j["residuals"] = {{"chord_dev", chord_res}, {"tangency", tang_res}};
  write_json(out_path(cfg, "zindler.json"), j);
  if (!rows.empty())
    export_table(rows, cfg.format, out_path(cfg, "zindler_table." + cfg.format));
  return 0;
}

int cmd_integrals(const RunConfig& cfg) {
  using namespace diffpoly;
  const int N = std::max(cfg.n, 4);
  std::vector<DiffPoly> Z = zn_series(std::min(N, 8));
  std::vector<MonodromyIntegrand> I = monodromy_integrands(std::min(N, 8));
  std::vector<FilamentIntegrand> F = filament_integrands(std::min(N + 1, 9));

  std::ostringstream txt;
  txt << "Z_n (series solution of ell Z' = Z - ell f)\n";
  for (size_t i = 0; i < Z.size(); ++i) txt << "  Z_" << i << " = " << Z[i].str() << "\n";
  txt << "\nI_n (monodromy integrands, parity-projected canonical forms)\n";
  for (size_t i = 0; i < I.size(); ++i) {
    txt << "  I_" << i << " = " << I[i].canonical.str();
    if (!I[i].parity_verified) txt << "   [parity unverified; raw form]";
    txt << "\n";
  }
  txt << "\nF_i (filament hierarchy densities)\n";
  for (size_t i = 0; i < F.size(); ++i) {
    txt << "  F_" << (i + 1) << " = " << F[i].density.str();
    if (F[i].experimental) txt << "   [experimental]";
    txt << "\n";
  }
  atomic_write(out_path(cfg, "integrands.txt"), txt.str());

  nlohmann::json j;
  j["Z"] = nlohmann::json::array();
  for (const auto& z : Z) j["Z"].push_back(z.to_json());
  j["I"] = nlohmann::json::array();
  for (const auto& mi : I) j["I"].push_back(mi.canonical.to_json());
  j["F"] = nlohmann::json::array();
  for (const auto& fi : F) j["F"].push_back(fi.density.to_json());
  write_json(out_path(cfg, "integrands.json"), j);
  return 0;
}

int cmd_akns(const RunConfig& cfg) {
  double lambda = cfg.lambda.empty() ? 0.0 : cfg.lambda.front();
  double eps = cfg.eps.empty() ? 1.0 : cfg.eps.front();
  // helix-type potential
  CFn q = [](double t) { return 0.5 * std::exp(cd(0.0, 0.3 * t)); };
  AknsFrame frame = akns_integrate(q, lambda, 0.0, 4.0 * kPi, cfg.samples * 4);

  nlohmann::json j;
  j["lambda"] = lambda;
  j["mu"] = {0.0, eps};
  if (std::abs(lambda) < 1e-12) {
    DarbouxBikeReport rep = darboux_bike_check(frame, eps, Eigen::Vector2cd(1.0, 0.5));
    j["distance_law_residual"] = rep.transform.distance_dev;
    j["distance_mean"] = rep.transform.distance_mean;
    j["correspondence_residuals"] = {{"chord_dev", rep.correspondence.chord_dev},
                                     {"tangency", rep.correspondence.tangency_res},
                                     {"glide", rep.correspondence.glide_res}};
    write_curve_csv(rep.transform.gamma, out_path(cfg, "stp_curve.csv"));
    write_curve_csv(rep.transform.gamma_tilde, out_path(cfg, "stp_partner.csv"));
  } else {
    DarbouxResult res = darboux_transform(frame, cd(0.0, eps), Eigen::Vector2cd(1.0, 0.5));
    j["distance_law_residual"] = res.distance_dev;
    j["distance_mean"] = res.distance_mean;
    write_curve_csv(res.gamma, out_path(cfg, "stp_curve.csv"));
    write_curve_csv(res.gamma_tilde, out_path(cfg, "stp_partner.csv"));
  }
  write_json(out_path(cfg, "akns.json"), j);
  return 0;
}

int cmd_wegner(const RunConfig& cfg) {
  WegnerParams lin;
  lin.a = 1.0;
  lin.b = 0.5;
  WegnerInit li;
  li.y0 = 0.0;
  li.length = 6.0;
  Curve linear = wegner_curve(lin, li, cfg.samples);
  write_curve_csv(linear, out_path(cfg, "wegner_linear.csv"));
  write_json(out_path(cfg, "wegner_linear_params.json"),
             {{"family", "linear"},
              {"a", lin.a},
              {"b", lin.b},
              {"lambda_el", lin.lambda_el()},
              {"mu_el", lin.mu_el()},
              {"el_residual", buckled_ring_residual(linear, lin.lambda_el(), lin.mu_el())}});

  WegnerParams circ;
  Curve ring = wegner_closed_ring(0.35, 1.4, 3, 1, std::max(cfg.samples, 2048), &circ);
  write_curve_csv(ring, out_path(cfg, "wegner_circular.csv"));
  write_json(out_path(cfg, "wegner_circular_params.json"),
             {{"family", "circular"},
              {"a", circ.a},
              {"b", circ.b},
              {"c", circ.c},
              {"lambda_el", circ.lambda_el()},
              {"mu_el", circ.mu_el()},
              {"el_residual", buckled_ring_residual(ring, circ.lambda_el(), circ.mu_el())}});
  return 0;
}

int cmd_rolling(const RunConfig& cfg) {
  Curve front = cfg.front();
  double ell = cfg.ell.empty() ? 1.0 : cfg.ell.front();
  RollResult sphere = roll_sphere(front, ell);
  LorentzMatrix hyp = roll_hyperbolic(front, ell);
  LorentzMatrix lift = lorentz_lift_monodromy(front, ell, front.t0(), front.t1());
  nlohmann::json j;
  j["sphere_structure_residual"] = sphere.structure_residual;
  j["body_track_length"] = sphere.body_track.length();
  j["front_length"] = front.length();
  j["hyperbolic_vs_lift"] = (hyp.m - lift.m).cwiseAbs().maxCoeff();
  j["J_residual"] = hyp.j_residual();
  write_json(out_path(cfg, "rolling.json"), j);
  write_lorentz_json(hyp, out_path(cfg, "rolling_hyperbolic.json"));
  write_curve_csv(sphere.body_track, out_path(cfg, "body_track.csv"));
  return 0;
}

int cmd_selftest(const RunConfig& cfg) {
  std::vector<nlohmann::json> checks;
  auto record = [&](const std::string& name, double value, double bound, bool pass) {
    checks.push_back({{"check", name},
                      {"value", value},
                      {"bound", bound},
                      {"pass", pass ? 1 : 0}});
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  value=" << value
              << " bound=" << bound << "\n";
  };

  // classification of multiple circles
  {
    bool ok = true;
    for (int folds = 1; folds <= 3; ++folds) {
      CurveSpec spec;
      spec.id = "circle_multi";
      spec.param["n_folds"] = folds;
      Curve c = build_curve(spec, 512 * folds);
      auto cls = [&](double ell) {
        return classify(moebius_from_lorentz(
            lorentz_lift_monodromy(c, ell, c.t0(), c.t1())));
      };
      ok = ok && cls(0.5) == MonodromyClass::Hyperbolic;
      ok = ok && cls(1.0) == MonodromyClass::Parabolic;
      if (folds == 1) ok = ok && cls(1.5) == MonodromyClass::Elliptic;
      if (folds >= 2) ok = ok && cls(ell_kn(1, folds)) == MonodromyClass::Trivial;
    }
    record("classification_multiple_circles", ok ? 1.0 : 0.0, 1.0, ok);
  }

  // Berry phase on the circle in R^3 at ell = 2
  {
    CurveSpec spec;
    spec.id = "circle_multi";
    spec.param["dimension"] = 3;
    Curve c = build_curve(spec, 1024);
    BerryReport rep = berry_check(c, 2.0);
    double angle = std::abs(std::arg(rep.m_prime));
    double target = 2.0 * kPi * (1.0 - std::sqrt(3.0) / 2.0);
    double err = std::abs(angle - target);
    record("berry_circle_angle", err, cfg.tol, err < cfg.tol);
    record("berry_residual", rep.residual, cfg.tol, rep.residual < cfg.tol);
  }

  // planimeter on the unit circle
  {
    CurveSpec spec;
    spec.id = "circle_multi";
    Curve c = build_curve(spec, 1024);
    Rng rng(cfg.seed);
    PlanimeterReport rep =
        planimeter_check(c, {0.2, 0.1, 0.05, 0.025}, rng.unit_vector(2));
    double a01 = rep.area.matrix(0, 1);
    record("planimeter_area", std::abs(a01 + kPi), 1e-8, std::abs(a01 + kPi) < 1e-8);
    record("planimeter_slope", rep.slope, 2.8, rep.slope >= 2.8);
  }

  // rolling equivalence
  {
    Rng rng(cfg.seed + 1);
    Curve c = random_smooth_closed_curve(3, rng, 512);
    LorentzMatrix lift = lorentz_lift_monodromy(c, 0.7, c.t0(), c.t1());
    LorentzMatrix roll = roll_hyperbolic(c, 0.7);
    double diff = (lift.m - roll.m).cwiseAbs().maxCoeff();
    record("rolling_equivalence", diff, 1e-12, diff < 1e-12);
    RollResult rs = roll_sphere(c, 0.7);
    double len_err = std::abs(rs.body_track.length() - c.length());
    record("rolling_arclength", len_err, 1e-6, len_err < 1e-6);
  }

  // conjugacy of Gamma_{1,2} and the doubled circle
  {
    Curve g12 = gamma_kn(1, 2, 1024);
    CurveSpec spec;
    spec.id = "circle_multi";
    spec.param["n_folds"] = 2;
    Curve two = build_curve(spec, 1024);
    auto rows = monodromy_conjugacy_check(g12, two, {0.3, 0.7, 1.5});
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.lorentz_rel_err);
    record("conjugacy_traces", worst, cfg.tol, worst < cfg.tol);
  }

  // symbolic integrands
  {
    using namespace diffpoly;
    auto I = monodromy_integrands(4);
    DiffPoly I2 = rat(-1, 2) * (kappa() * kappa());
    DiffPoly I4 = -(rat(1, 2) * (kappa() * kappa(2)) -
                    rat(1, 2) * (kappa() * kappa() * tau() * tau()) +
                    rat(1, 8) * (kappa(0, 4)));
    bool ok = (I[2].canonical == I2) && (I[4].canonical == I4);
    record("symbolic_integrands", ok ? 1.0 : 0.0, 1.0, ok);
  }

  // multiplier on the unit circle
  {
    CurveSpec spec;
    spec.id = "circle_multi";
    Curve c = build_curve(spec, 1024);
    cd g = ell_log_multiplier(c, 0.3);
    double err = std::abs(g - cd(2.0 * kPi * std::sqrt(1.0 - 0.09), 0.0));
    record("multiplier_circle", err, 1e-8, err < 1e-8);
  }

  // Zindler family (1,4)
  {
    auto rhos = rotation_numbers(1, 4);
    bool ok = rhos.size() == 2;
    Curve g = gamma_kn(1, 4, 1024);
    for (double rho : rhos) {
      ZindlerCertificate cert = zindler_verify(g, rho);
      ok = ok && cert.pass;
    }
    record("zindler_1_4", ok ? 1.0 : 0.0, 1.0, ok);
  }

  // Klein-ball isometry drift
  {
    Rng rng(cfg.seed + 2);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      Curve c = random_smooth_closed_curve(2, rng, 512);
      Eigen::VectorXd x = 0.4 * rng.unit_vector(2), y = 0.6 * rng.unit_vector(2);
      double d0 = klein_distance(x, y, 0.8);
      Eigen::VectorXd x1 = integrate_direction_flow(c, 0.8, x, c.t0(), c.t1());
      Eigen::VectorXd y1 = integrate_direction_flow(c, 0.8, y, c.t0(), c.t1());
      worst = std::max(worst, std::abs(klein_distance(x1, y1, 0.8) - d0));
    }
    record("klein_drift", worst, 1e-8, worst < 1e-8);
  }

  export_table(checks, "csv", out_path(cfg, "selftest_report.csv"));
  export_table(checks, "json", out_path(cfg, "selftest_report.json"));
  nlohmann::json cfgj = cfg.to_json();
  write_json(out_path(cfg, "selftest_config.json"), cfgj);

  for (const auto& c : checks)
    if (c.at("pass").get<int>() == 0) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bicycle kinematics, monodromy, and filament-hierarchy toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("BIKEGEO_OUT")) cfg.out_dir = env;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve, "analytic front: circle | line | gamma_kn");
    sub->add_option("--curve-file", cfg.curve_file, "front track CSV (with JSON sidecar)");
    sub->add_option("--folds", cfg.folds, "circle multiplicity");
    sub->add_option("--ell", cfg.ell, "bicycle length(s)");
    sub->add_option("--eps", cfg.eps, "inverse-length / imaginary-length value(s)");
    sub->add_option("--lambda", cfg.lambda, "spectral / correspondence parameter(s)");
    sub->add_option("--k", cfg.k, "Gamma_{k,n} index k");
    sub->add_option("--n", cfg.n, "Gamma_{k,n} index n (or series order)");
    sub->add_option("--samples", cfg.samples, "samples per period");
    sub->add_option("--tol", cfg.tol, "residual tolerance");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--seed", cfg.seed, "seed for randomized suites");
    sub->add_option("--format", cfg.format, "table format: json | csv");
  };

  std::map<std::string, std::function<int(const RunConfig&)>> dispatch = {
      {"simulate", cmd_simulate},   {"monodromy", cmd_monodromy},
      {"planimeter", cmd_planimeter}, {"correspond", cmd_correspond},
      {"zindler", cmd_zindler},     {"integrals", cmd_integrals},
      {"akns", cmd_akns},           {"wegner", cmd_wegner},
      {"rolling", cmd_rolling},     {"selftest", cmd_selftest}};

  const std::map<std::string, std::string> blurbs = {
      {"simulate", "integrate the bicycle equation along a front track"},
      {"monodromy", "Lorentz lift, SL2 reduction, classification, fixed points"},
      {"planimeter", "area bivector and long-bicycle error slope"},
      {"correspond", "build and verify a bicycle partner"},
      {"zindler", "rotation numbers and Zindler certificates of Gamma_{k,n}"},
      {"integrals", "symbolic Z_n / I_n / F_i tables"},
      {"akns", "AKNS frames, STP curves, Darboux correspondence"},
      {"wegner", "Wegner curves and buckled-ring residuals"},
      {"rolling", "sphere and hyperbolic rolling monodromies"},
      {"selftest", "run the deterministic verification suite"}};

  for (const auto& [name, fn] : dispatch) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, fn] : dispatch) {
    if (app.got_subcommand(name)) {
      cfg.command = name;
      try {
        cfg.validate();
        return fn(cfg);
      } catch (const ContractionFailure& e) {
        std::cerr << "numerical diagnostic: " << e.what() << "\n";
        return 3;
      } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
      }
    }
  }
  return 2;
}
