#pragma once

#include <map>

#include "bikegeo/bike_dynamics.hpp"
#include "bikegeo/vendor_json.hpp"

namespace bikegeo {

enum class MonodromyClass { Hyperbolic, Parabolic, Elliptic, Trivial };

std::string to_string(MonodromyClass c);

// Lorentz monodromy with its SL2 reduction for n = 2 (real) or n = 3
// (complex), each defined modulo global sign. The reduction acts on the
// projective coordinate by w = (c + d p)/(a + b p) for [[a,b],[c,d]] (the
// column convention p = y/x).
struct MonodromyElement {
  LorentzMatrix lorentz;
  int n = 0;
  double ell = 0.0;
  bool has_reduction = false;
  Eigen::Matrix2d sl2r;   // n = 2
  Eigen::Matrix2cd sl2c;  // n = 3
  double reduction_residual = 0.0;  // action mismatch over random directions

  cd trace() const;
  // Fractional-linear action in the fixed projective chart (p for n = 2,
  // z = (r2 + i r3)/(1 + r1) for n = 3).
  cd mobius_apply(cd z) const;
  Eigen::VectorXd sphere_apply(const Eigen::VectorXd& r) const;
};

// Recover the SL2 representative by solving the adjoint-action linear system
// of the special isomorphism in least squares; sign fixed by making the
// largest-magnitude entry have positive real part.
MonodromyElement moebius_from_lorentz(const LorentzMatrix& m);

struct FixedPoint {
  Eigen::VectorXd r;   // unit vector on S^{n-1}
  cd chart;            // projective coordinate (may be huge for infinity)
  cd derivative;       // monodromy multiplier at the fixed point
  bool attracting = false;
};

struct MonodromyReport {
  MonodromyClass cls = MonodromyClass::Trivial;
  bool parabolic_ambiguous = false;  // classification fell inside the tolerance band
  bool all_points_fixed = false;     // trivial element
  std::vector<FixedPoint> fixed_points;
  cd trace{0.0, 0.0};
  double rear_length = 0.0;
  double berry_area = 0.0;  // n = 3
  std::map<std::string, double> residuals;
};

MonodromyClass classify(const MonodromyElement& m, bool* ambiguous = nullptr);
std::vector<FixedPoint> fixed_points(const MonodromyElement& m);
cd derivative_at_fixed_point(const MonodromyElement& m, const Eigen::VectorXd& fp);

// Signed rear-track length L = -integral r.v dt along a bike trajectory.
double signed_rear_length(const Curve& front, const BikeTrajectory& traj);

// Algebraic spherical area enclosed by a closed path on S^2: summed signed
// excesses of triangles against a pole off the path. `raw` accumulates
// continuously; the normalized value lies in (-2pi, 2pi], taken mod 4pi.
struct SphericalArea {
  double raw = 0.0;
  double normalized = 0.0;
  Eigen::Vector3d pole;
};
SphericalArea spherical_signed_area(const Eigen::MatrixXd& r_path);
// Same, with the reference pole pinned (refinement passes must share a pole:
// the raw value is defined modulo 4 pi relative to it).
SphericalArea spherical_signed_area(const Eigen::MatrixXd& r_path,
                                    const Eigen::Vector3d& pole);

// Both sides of the monodromy-derivative formula computed independently:
// derivative at a fixed point vs e^{-L/ell + i Omega} (n = 3) or e^{-L/ell}
// (n = 2), plus a finite-difference derivative of the sphere-level map.
struct BerryReport {
  MonodromyClass cls;
  Eigen::VectorXd fixed_point;
  cd m_prime;          // from the SL2 reduction
  cd m_prime_fd;       // finite-difference oracle
  double rear_length = 0.0;
  double berry_area = 0.0;      // in (-2 pi, 2 pi], mod 4 pi
  double berry_area_raw = 0.0;  // continuous-tracking value (pole dependent)
  cd rhs{0.0, 0.0};    // e^{-L/ell + i Omega}
  double residual = 0.0;     // |m_prime - rhs| (relative above 1)
  double fd_residual = 0.0;  // |m_prime - m_prime_fd| (relative above 1)
};
BerryReport berry_check(const Curve& front, double ell, int steps = 0);

// General-n form of the derivative formula: the finite-difference tangent map
// of the monodromy against e^{-L/ell} times discrete Levi-Civita transport
// along r(t). Works from any initial direction.
struct TransportCheck {
  Eigen::MatrixXd tangent_map;      // (n-1) x (n-1) in transported bases
  Eigen::MatrixXd predicted;        // e^{-L/ell} P
  double residual = 0.0;
  double rear_length = 0.0;
};
TransportCheck berry_transport_check(const Curve& front, double ell,
                                     const Eigen::VectorXd& r0, int steps = 0);

// Skew-symmetric area operator of a closed curve plus the slope of the
// planimeter error ||r(L) - r0 - eps^2 A r0|| over a decreasing eps sample.
struct AreaBivector {
  Eigen::MatrixXd matrix;    // integral dGamma Gamma^T dt (skew)
  Eigen::Vector3d axial;     // n = 3: (1/2) integral Gamma x dGamma
};
struct PlanimeterReport {
  AreaBivector area;
  std::vector<double> eps;
  std::vector<double> error;
  double slope = 0.0;
};
AreaBivector area_bivector(const Curve& front);
PlanimeterReport planimeter_check(const Curve& front, const std::vector<double>& eps_list,
                                  const Eigen::VectorXd& r0);

// Hyperbolic distance of the Klein ball model with curvature -1/ell^2,
// computed from the cross-ratio along the chord.
double klein_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double ell);

nlohmann::json monodromy_report_json(const MonodromyElement& elem,
                                     const MonodromyReport& rep);
MonodromyReport monodromy_report(const Curve& front, double ell, int steps = 0);

}  // namespace bikegeo
