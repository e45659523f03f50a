#pragma once

#include "bikegeo/moebius.hpp"

namespace bikegeo {

// Glide reflection G_{UV}: reflect about the line UV, then translate by V - U.
Eigen::VectorXd glide_reflect(const Eigen::VectorXd& U, const Eigen::VectorXd& V,
                              const Eigen::VectorXd& x);

// Darboux butterfly: a parallelogram folded about the diagonal AC; D is the
// reflection of A - B + C about the line AC.
struct Butterfly {
  Eigen::VectorXd A, B, C, D;
};
Butterfly butterfly_complete(const Eigen::VectorXd& A, const Eigen::VectorXd& B,
                             const Eigen::VectorXd& C);

// Partner track Gamma + 2 ell r with r solving the ell-bicycle equation; in
// 2 ell-bicycle correspondence with the front. Closed iff the direction
// returns to its start.
Curve bicycle_partner(const Curve& front, double ell, const Eigen::VectorXd& r0,
                      int steps = 0);

struct CorrespondenceResidual {
  double chord_dev = 0.0;     // max | ||G1-G2|| - 2 ell |
  double tangency_res = 0.0;  // max angle between the chord and the midpoint velocity
  double glide_res = 0.0;     // max velocity mismatch in the reflection identity
};
CorrespondenceResidual verify_correspondence(const Curve& c1, const Curve& c2,
                                             double two_ell);

struct BianchiReport {
  Curve D;
  CorrespondenceResidual ad;  // (A, D) at chord ell2
  CorrespondenceResidual cd_res;  // (C, D) at chord ell1
  double coplanarity = 0.0;   // max distance of D(t) from the plane of A,B,C
  int degenerate_samples = 0;
};
BianchiReport bianchi_check(const Curve& A, const Curve& B, const Curve& C, double ell1,
                            double ell2);

struct ConjugacyRow {
  double lambda = 0.0;
  double lorentz_trace_1 = 0.0, lorentz_trace_2 = 0.0;
  cd sl2_trace_1{0, 0}, sl2_trace_2{0, 0};
  double lorentz_rel_err = 0.0;
  double sl2_err = 0.0;  // min over the global sign ambiguity
};
std::vector<ConjugacyRow> monodromy_conjugacy_check(const Curve& c1, const Curve& c2,
                                                    const std::vector<double>& lambdas);

// The closed plane curve in 2 ell_{k,n}-bicycle correspondence with the n-fold
// circle, anchored at Gamma(0) = 1 + 2 ell_{k,n}; arclength of period 2 pi n.
Curve gamma_kn(int k, int n, int samples);

// Rotation numbers of Gamma_{k,n}: the n-k-1 solutions of
// n tan(k pi rho) = k tan(n pi rho) in (0,1).
std::vector<double> rotation_numbers(int k, int n);

struct ZindlerCertificate {
  double rotation_number = 0.0;
  double chord_length = 0.0;  // 2 lambda, mean chord
  double chord_dev = 0.0;
  double tangency_res = 0.0;  // radians
  double chord_tol = 0.0;
  double tangency_tol = 0.0;
  bool pass = false;
};
ZindlerCertificate zindler_verify(const Curve& c, double rho, double tol_scale = 1e-6);

// Best sphere centered on the z axis through a point cloud; used by the
// spherical-partner property of the Gamma_{k,n} family.
struct SphereFit {
  double center_z = 0.0;
  double radius = 0.0;
  double residual = 0.0;
};
SphereFit fit_sphere_on_axis(const Eigen::MatrixXd& points);

}  // namespace bikegeo
