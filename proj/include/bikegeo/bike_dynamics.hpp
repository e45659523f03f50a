#pragma once

#include <complex>
#include <optional>

#include "bikegeo/curve.hpp"
#include "bikegeo/frenet.hpp"

namespace bikegeo {

using cd = std::complex<double>;

// Direction state of the bike: unit vector r on S^{n-1} at parameter t.
struct BikeState {
  double t = 0.0;
  Eigen::VectorXd r;
};

struct BikeTrajectory {
  double ell = 0.0;
  Eigen::VectorXd t;
  Eigen::MatrixXd r;     // one row per step, unit directions
  Eigen::MatrixXd rear;  // gamma = Gamma + ell r
  double norm_drift = 0.0;      // max | |r| - 1 | along the run
  double step_error_est = 0.0;  // Richardson half-step estimate at t1
};

// Integrate ell r' = -v + (v.r) r along the front track. r is renormalized to
// the sphere each step (the equation preserves it; drift is numerical only).
BikeTrajectory integrate_bicycle_sphere(const Curve& front, double ell,
                                        const Eigen::VectorXd& r0, double t0, double t1,
                                        int steps = 0);

// Same flow without the sphere constraint: the equation acts on all of R^n and
// preserves the open unit ball (hyperbolic isometries). Used by the Klein
// distance invariance checks.
Eigen::VectorXd integrate_direction_flow(const Curve& front, double ell,
                                         const Eigen::VectorXd& x0, double t0, double t1,
                                         int steps = 0);

enum class Chart { PlanarFixed, PlanarFrame, SpatialFixed, SpatialFrame, Filament };

// Projective coordinate on the direction sphere: p = tan(theta/2) for n = 2,
// z = (r2 + i r3)/(1 + r1) for n = 3, frame-chart variants Theta/Z, and the
// filament chart W. The swapped (reciprocal) chart covers the antipode of the
// chart's singular point.
struct ProjectiveCoord {
  cd value{0.0, 0.0};
  Chart chart = Chart::PlanarFixed;
  bool at_infinity = false;
};

struct RiccatiTrajectory {
  Chart chart;
  Eigen::VectorXd t;
  Eigen::VectorXcd coord;    // coordinate in the requested chart (inf -> huge)
  Eigen::MatrixXd sphere;    // reconstructed points on S^{n-1}
  int swap_count = 0;        // chart swaps at |coordinate| > 10
  ProjectiveCoord final_coord;
};

// Fixed-chart <-> sphere conversions.
ProjectiveCoord sphere_to_chart(const Eigen::VectorXd& r, Chart chart);
Eigen::VectorXd chart_to_sphere(const ProjectiveCoord& pc);

// Chart value of a sphere direction r at front parameter t; frame charts take
// the Frenet frame of the front at t.
ProjectiveCoord chart_init(const Curve& front, const Eigen::VectorXd& r, Chart chart,
                           double t);

// Planar Riccati forms: fixed chart p' = (1/2l)(-v2 + 2 v1 p + v2 p^2), frame
// chart P' = P/l - (kappa/2)(1 + P^2). The frame chart requires an
// arclength-parametrized front.
RiccatiTrajectory integrate_riccati_planar(const Curve& front, double ell, Chart chart,
                                           const ProjectiveCoord& init, double t0,
                                           double t1, int steps = 0);

// Spatial Riccati forms (n = 3): fixed chart z, frame chart Z, and the
// filament chart W obtained from the frame chart by ell -> -i eps (pass the
// imaginary length through `ell`; only Chart::Filament accepts a non-real
// value).
RiccatiTrajectory integrate_riccati_spatial(const Curve& front, cd ell, Chart chart,
                                            const ProjectiveCoord& init, double t0,
                                            double t1, int steps = 0);

// Element of SO+(n,1): the lifted bicycle flow, J = diag(1,...,1,-1).
struct LorentzMatrix {
  int n = 0;
  double ell = 0.0;
  double t0 = 0.0, t1 = 0.0;
  Eigen::MatrixXd m;  // (n+1) x (n+1)

  double j_residual() const;
  // Projective action on the direction sphere/ball: x -> (Ax)/(Ax)_{n+1}.
  Eigen::VectorXd act(const Eigen::VectorXd& r, bool renormalize = true) const;
};

Eigen::MatrixXd lorentz_J(int n);

// Solve x' = -(1/l) [[0, v],[v^T, 0]] x as a matrix flow from the identity;
// each step is re-projected onto the J-orthogonal group.
LorentzMatrix lorentz_lift_monodromy(const Curve& front, double ell, double t0, double t1,
                                     int steps = 0);

struct RollResult {
  Eigen::MatrixXd monodromy;  // g(t1) in SO(n+1)
  Curve body_track;           // contact curve on the rolling sphere, in R^{n+1}
  double structure_residual = 0.0;
};

// Rolling S^n_ell along the front without slip or twist: g' = (1/l)
// [[0, v],[-v^T, 0]] g; the body track is -ell g^{-1} e_{n+1}.
RollResult roll_sphere(const Curve& front, double ell, int steps = 0);

// Rolling hyperbolic space: the same matrix ODE as the Lorentz lift, shared
// integrator path, so the outputs coincide entrywise.
LorentzMatrix roll_hyperbolic(const Curve& front, double ell, int steps = 0);

struct ContractionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The unique unstable periodic solution Z(t, ell) of the frame-chart Riccati
// equation along a closed arclength front in R^3 (planar fronts allowed,
// tau = 0), found by iterating the time-reversed period map from Z = 0.
struct UnstablePeriodic {
  Eigen::VectorXd t;
  Eigen::VectorXcd Z;        // periodic solution samples
  cd multiplier;             // lambda(ell); inf if exp overflows
  cd ell_log_multiplier;     // ell * log(lambda), from the integral formula
  double max_abs = 0.0;      // sup |Z|
  int iterations = 0;
};

UnstablePeriodic find_unstable_periodic(const Curve& front, double ell, int steps = 0);

// ell * log(lambda(ell)); Taylor coefficients at ell = 0 recovered by
// one-sided finite differences over a sample of small lengths.
cd ell_log_multiplier(const Curve& front, double ell, int steps = 0);
Eigen::VectorXcd multiplier_taylor(const Curve& front, int n_coeffs,
                                   double ell_min = 0.02, double ell_max = 0.35,
                                   int n_points = 12, int unused = 0);

void write_trajectory_csv(const BikeTrajectory& traj, const std::string& path);
void write_lorentz_json(const LorentzMatrix& lm, const std::string& path);

}  // namespace bikegeo
