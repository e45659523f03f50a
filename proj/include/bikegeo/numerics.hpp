#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bikegeo {

constexpr double kPi = 3.14159265358979323846;

// Finite-difference weights on arbitrary nodes (Fornberg's recursion).
// Returns weights w such that f^(m)(x0) ~= sum_i w[i] f(x[i]).
std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m);

// Derivative of uniformly sampled data. For periodic data the sample set must
// exclude the wrap duplicate; stencils wrap around. Open data uses offset
// stencils near the ends. Centered stencils are 4th order.
Eigen::MatrixXd fd_derivative(const Eigen::MatrixXd& samples, double h, int order,
                              bool periodic, int stencil_width = 7);

// Trapezoid rule over one period of a periodic integrand sampled at m uniform
// points (wrap sample excluded). Spectrally accurate for smooth data.
double trapezoid_periodic(const Eigen::VectorXd& f, double h);
std::complex<double> trapezoid_periodic(const Eigen::VectorXcd& f, double h);

// Composite Simpson on a uniform grid including both endpoints.
double simpson(const Eigen::VectorXd& f, double h);

// Cumulative trapezoid, result[0] = 0.
Eigen::VectorXd cumtrapz(const Eigen::VectorXd& f, double h);

// Adaptive Simpson quadrature (used as an independent oracle in tests and for
// arclength tables of analytic curves).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 40);

// Cubic spline through (x, y) with x strictly increasing. Periodic splines
// expect y.front() == y.back() and identify the endpoints.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y, bool periodic);

  double operator()(double t) const;
  double derivative(double t, int order = 1) const;  // order <= 3
  bool valid() const { return !x_.empty(); }

 private:
  int find_interval(double& t) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at nodes
  bool periodic_ = false;
};

// Classic fixed-step RK4. Post is applied after every step (renormalization
// hooks); it defaults to the identity.
template <class State, class Rhs, class Post>
State rk4(State y, double t0, double t1, int steps, Rhs f, Post post) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    State k1 = f(t, y);
    State k2 = f(t + h / 2, y + (h / 2) * k1);
    State k3 = f(t + h / 2, y + (h / 2) * k2);
    State k4 = f(t + h, y + h * k3);
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + (i + 1) * h;
    y = post(y);
  }
  return y;
}

template <class State, class Rhs>
State rk4(State y, double t0, double t1, int steps, Rhs f) {
  return rk4(y, t0, t1, steps, f, [](State s) { return s; });
}

// RK4 that records the state at every grid point (steps+1 entries).
template <class State, class Rhs, class Post>
std::vector<State> rk4_path(State y, double t0, double t1, int steps, Rhs f, Post post) {
  std::vector<State> out;
  out.reserve(steps + 1);
  out.push_back(y);
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    double t = t0 + i * h;
    State k1 = f(t, y);
    State k2 = f(t + h / 2, y + (h / 2) * k1);
    State k3 = f(t + h / 2, y + (h / 2) * k2);
    State k4 = f(t + h, y + h * k3);
    y = y + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    y = post(y);
    out.push_back(y);
  }
  return out;
}

// Least-squares slope of log(err) against log(eps); used by the planimeter and
// bird's-eye order checks.
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err);

// Deterministic 64-bit generator (splitmix64). All randomized suites seed one
// of these explicitly; outputs are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      // Box-Muller; deterministic given the stream position.
      double u1 = std::max(uniform(), 1e-300), u2 = uniform();
      v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    v.normalize();
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace bikegeo
