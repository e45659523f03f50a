#pragma once

#include <cstdint>
#include <functional>

#include "bikegeo/curve.hpp"

namespace bikegeo {

// Frenet frame data along an arclength-parametrized curve. Samples cover the
// unique points (wrap duplicate dropped); centered 4th-order stencils, wrapping
// periodically on closed curves.
//
// For n = 2 the frame {v, n} is positively oriented and the curvature is
// signed accordingly (kappa = +1 on the CCW unit circle). For n = 3 kappa >= 0
// and the torsion is flagged unavailable where kappa falls below
// 1e-8 / (mean sample spacing).
struct FrenetData {
  int dimension = 0;
  double h = 0.0;  // arclength step
  bool closed = false;
  Eigen::VectorXd params;
  Eigen::MatrixXd tangent;
  Eigen::MatrixXd normal;
  Eigen::MatrixXd binormal;  // n = 3 only
  Eigen::VectorXd curvature;
  Eigen::VectorXd torsion;                // n = 3 only; NaN where invalid
  std::vector<std::uint8_t> torsion_valid;
  Eigen::MatrixXd darboux;  // n = 3: Omega = tau E1 + kappa E3 in frame coords

  // Continuous evaluators for the moving-frame integrators; exact-jet backed
  // when the curve has one, otherwise periodic splines through the samples.
  std::function<double(double)> kappa_at;
  std::function<double(double)> tau_at;
};

FrenetData frenet_data(const Curve& c);

}  // namespace bikegeo
