#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bikegeo/numerics.hpp"

namespace bikegeo {

using VecFn = std::function<Eigen::VectorXd(double)>;

// Closed form for a curve: position plus optional exact derivatives. When a
// derivative closure is missing it is replaced by Richardson-extrapolated
// central differences of the level below.
struct AnalyticJet {
  VecFn p, d1, d2, d3;
  bool valid() const { return static_cast<bool>(p); }
};

// Sampled parametrized track in R^n. Closed curves store the wrap-around
// sample duplicated (last row equals first, at t0 + period); stencils and
// quadrature operate on the unique samples and wrap periodically.
// Immutable after construction.
struct Curve {
  int dimension = 0;
  Eigen::VectorXd params;  // strictly increasing sample parameters
  Eigen::MatrixXd points;  // one row per sample
  bool closed = false;
  double period = 0.0;  // defined iff closed
  std::string analytic_id;
  AnalyticJet jet;

  int sample_count() const { return static_cast<int>(params.size()); }
  // Number of samples with the wrap duplicate excluded.
  int unique_count() const { return closed ? sample_count() - 1 : sample_count(); }
  double t0() const { return params[0]; }
  double t1() const { return params[params.size() - 1]; }
  double step() const { return (t1() - t0()) / (sample_count() - 1); }
  // Unique-sample block (drops the wrap duplicate of a closed curve).
  Eigen::MatrixXd unique_points() const { return points.topRows(unique_count()); }

  // Pointwise evaluation; t is wrapped into the fundamental period for closed
  // curves. Falls back to per-coordinate cubic splines when no jet is set.
  Eigen::VectorXd position(double t) const;
  Eigen::VectorXd velocity(double t) const;
  Eigen::VectorXd acceleration(double t) const;
  Eigen::VectorXd jerk(double t) const;

  double length() const;  // arclength over the sampled domain

  void validate() const;  // throws std::invalid_argument on invariant breach

  // internal: spline fallback, built by finalize() when no jet is available
  std::vector<CubicSpline> splines;
  void finalize();

 private:
  double wrap(double t) const;
  Eigen::VectorXd fd_on_position(double t, int order) const;
};

// Analytic id plus parameters; ids: line, circle_multi, gamma_kn (exact
// closed forms installed as jets).
struct CurveSpec {
  std::string id;
  std::map<std::string, double> param;
  double get(const std::string& key, double fallback) const {
    auto it = param.find(key);
    return it == param.end() ? fallback : it->second;
  }
};

Curve build_curve(const CurveSpec& spec, int samples_per_period);

// Curve from an arbitrary closed form; derivative closures are optional.
Curve curve_from_function(int dimension, const AnalyticJet& jet, double t0, double t1,
                          int samples, bool closed, const std::string& id = "custom");

// Curve through raw samples (spline-backed evaluation).
Curve curve_from_samples(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                         bool closed, const std::string& id = "");

// Reparametrize by arclength: m samples, unit speed, length preserved to
// discretization order. Closed curves keep the wrap duplicate.
Curve resample_arclength(const Curve& c, int m);

// Same curve re-evaluated on a uniform grid of the stated size; evaluation
// closures are kept so pairwise grid-aligned checks see exact derivatives.
Curve curve_on_grid(const Curve& src, int samples);

// Signed area of a closed plane curve, (1/2) oint det(Gamma, dGamma) dt.
double signed_planar_area(const Curve& c);

// Gamma_{k,n} building blocks, shared with the correspondence module: the
// bicycle length 1/sqrt(1-(k/n)^2) and the continuous phase phi with
// tan(phi/2) = -a tan(bt/2), phi(0) = 0.
double ell_kn(int k, int n);
double gamma_kn_phase(double t, double a, double b);

// CSV (+ JSON sidecar) round trip; header `t,x1,...,xn`.
void write_curve_csv(const Curve& c, const std::string& path);
Curve read_curve_csv(const std::string& path);

// Seeded smooth closed test track: a unit circle in the first two coordinates
// plus a low-order trigonometric perturbation, with exact derivative closures.
Curve random_smooth_closed_curve(int dimension, Rng& rng, int samples,
                                 int max_mode = 3, double amplitude = 0.25);

}  // namespace bikegeo
