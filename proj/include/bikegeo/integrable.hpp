#pragma once

#include "bikegeo/correspondence.hpp"

namespace bikegeo {

using CFn = std::function<cd(double)>;

// SU(2)-valued solution of the AKNS system Phi_t = (Q + i lambda A) Phi with
// Q = [[0, q],[-conj q, 0]], A = diag(1/2, -1/2). Phi_lambda is carried along
// via the augmented equation so STP curves need no lambda differencing.
struct AknsFrame {
  double lambda = 0.0;
  Eigen::VectorXd t;
  std::vector<Eigen::Matrix2cd> Phi;
  std::vector<Eigen::Matrix2cd> Phi_lambda;
  CFn q;
  double unitarity_drift = 0.0;
};

AknsFrame akns_integrate(const CFn& q, double lambda, double t0, double t1, int steps,
                         const Eigen::Matrix2cd& Phi0 = Eigen::Matrix2cd::Identity());

// STP curve Gamma = Phi* Phi_lambda in su(2) identified with R^3 through the
// norm |X|^2 = -2 tr(X^2); arclength parametrized with kappa = 2|q| and
// tau = Im(q'/q) - lambda.
Curve stp_curve(const AknsFrame& frame);

// su(2) <-> R^3 identification used throughout (basis u1 = iA plus the two
// fixed complements with [u_i, u_j] = u_k cyclic).
Eigen::Vector3d su2_to_r3(const Eigen::Matrix2cd& X);
Eigen::Matrix2cd r3_to_su2(const Eigen::Vector3d& x);

// Potential of a given space curve: q = (kappa/2) e^{i integral tau}, phase
// anchored at 0 (the leftover global phase is a rigid rotation of the curve).
CFn q_from_curve(const Curve& c);

struct DarbouxResult {
  cd mu;
  CFn q_tilde;
  AknsFrame transformed;        // tilde Phi = U Phi at the frame's lambda
  Curve gamma;                  // STP curve of the input frame
  Curve gamma_tilde;            // STP curve of the transformed family
  double distance_mean = 0.0;   // mean |tilde Gamma - Gamma|
  double distance_dev = 0.0;    // max deviation from the mean (law: const in t)
  double akns_residual = 0.0;   // sup |tilde Phi - re-integrated solution|
};

// Darboux transformation with data (mu, v0): pi the projector on the phi
// direction, U = alpha (I - beta pi), q -> q + i(mu - conj mu)
// conj(phi1) phi2 / |phi|^2.
DarbouxResult darboux_transform(const AknsFrame& frame, cd mu,
                                const Eigen::Vector2cd& v0);

// mu = i eps, lambda = 0: the STP pair is in 2/|eps|-bicycle correspondence.
struct DarbouxBikeReport {
  DarbouxResult transform;
  CorrespondenceResidual correspondence;
  double chord = 0.0;  // 2/|eps|
};
DarbouxBikeReport darboux_bike_check(const AknsFrame& frame, double eps,
                                     const Eigen::Vector2cd& v0);

// Wegner curves: curvature proportional to the distance to the x-axis
// (linear) or to the origin (circular). Integrated in arclength through the
// curvature ODE; the defining relation is a conserved quantity of the flow.
struct WegnerParams {
  bool circular = false;
  double a = 0.0, b = 0.0, c = 0.0;  // c unused for the linear family
  double lambda_el() const { return circular ? 8.0 * a * c - 2.0 * b * b : 2.0 * a * b; }
  double mu_el() const { return circular ? 8.0 * a : 0.0; }
};

struct WegnerInit {
  double y0 = 0.0;      // linear: starting height (on-axis symmetric start)
  double r0 = 1.0;      // circular: starting radius
  bool branch_up = true;
  double length = 0.0;  // integration window; 0 = one closed period (circular)
};

Curve wegner_curve(const WegnerParams& params, const WegnerInit& init, int samples);

// Max pointwise residual of the buckled-ring equation
// kappa'' + kappa^3/2 + lambda kappa - mu on an arclength curve.
double buckled_ring_residual(const Curve& c, double lambda_el, double mu_el);

// Tune the circular-family parameter b by shooting so the curve closes after
// `lobes` radial periods with the given winding; returns the closed curve.
Curve wegner_closed_ring(double a, double r_max, int lobes, int winding, int samples,
                         WegnerParams* out_params = nullptr);

// One explicit Euler step of the planar filament flow
// Gamma' = (kappa^2/2) v + kappa' n, followed by arclength reparametrization.
Curve planar_filament_step(const Curve& c, double dt);

// L2 mismatch of the curvature profiles of two closed curves after the best
// cyclic parameter shift (soliton check: shift-equivalence).
double best_shift_mismatch(const Curve& before, const Curve& after);

}  // namespace bikegeo
