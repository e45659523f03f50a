#include "bikegeo/numerics.hpp"

#include <algorithm>

namespace bikegeo {

std::vector<double> fd_weights(double x0, const std::vector<double>& x, int m) {
  // B. Fornberg, "Generation of finite difference formulas on arbitrarily
  // spaced grids", Math. Comp. 51 (1988).
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0;
    double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

Eigen::MatrixXd fd_derivative(const Eigen::MatrixXd& samples, double h, int order,
                              bool periodic, int stencil_width) {
  const int m = static_cast<int>(samples.rows());
  const int cols = static_cast<int>(samples.cols());
  const int w = stencil_width;
  const int half = w / 2;
  if (m < w) throw std::invalid_argument("fd_derivative: too few samples for stencil");

  Eigen::MatrixXd out(m, cols);
  std::vector<double> nodes(w);
  for (int k = 0; k < w; ++k) nodes[k] = (k - half) * h;
  const std::vector<double> wc = fd_weights(0.0, nodes, order);

  if (periodic) {
    for (int i = 0; i < m; ++i) {
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(cols);
      for (int k = 0; k < w; ++k) {
        int j = ((i + k - half) % m + m) % m;
        acc += wc[k] * samples.row(j);
      }
      out.row(i) = acc;
    }
    return out;
  }

  for (int i = 0; i < m; ++i) {
    int lo = std::clamp(i - half, 0, m - w);
    std::vector<double> xs(w);
    for (int k = 0; k < w; ++k) xs[k] = (lo + k - i) * h;
    std::vector<double> wk = (lo == i - half) ? wc : fd_weights(0.0, xs, order);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(cols);
    for (int k = 0; k < w; ++k) acc += wk[k] * samples.row(lo + k);
    out.row(i) = acc;
  }
  return out;
}

double trapezoid_periodic(const Eigen::VectorXd& f, double h) { return f.sum() * h; }

std::complex<double> trapezoid_periodic(const Eigen::VectorXcd& f, double h) {
  return f.sum() * h;
}

double simpson(const Eigen::VectorXd& f, double h) {
  const int n = static_cast<int>(f.size());
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  double s = 0.0;
  int i = 0;
  for (; i + 2 < n; i += 2) s += (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (i + 1 < n) s += 0.5 * h * (f[i] + f[i + 1]);  // odd tail
  return s;
}

Eigen::VectorXd cumtrapz(const Eigen::VectorXd& f, double h) {
  Eigen::VectorXd out(f.size());
  out[0] = 0.0;
  for (int i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

namespace {
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, bool periodic)
    : x_(std::move(x)), y_(std::move(y)), periodic_(periodic) {
  const int n = static_cast<int>(x_.size());
  if (n < 3) throw std::invalid_argument("CubicSpline: need at least 3 nodes");
  m_.assign(n, 0.0);

  if (!periodic_) {
    // Natural spline: tridiagonal solve for interior second derivatives.
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i + 1 < n; ++i) {
      double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
      a[i] = hl;
      b[i] = 2.0 * (hl + hr);
      c[i] = hr;
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    for (int i = 1; i < n; ++i) {
      double f = a[i] / b[i - 1];
      b[i] -= f * c[i - 1];
      d[i] -= f * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    return;
  }

  // Periodic spline over the n-1 unique nodes; cyclic system solved densely
  // (node counts here are modest).
  const int u = n - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(u, u);
  Eigen::VectorXd rhs(u);
  auto hof = [&](int i) { return x_[i + 1] - x_[i]; };
  for (int i = 0; i < u; ++i) {
    int im = (i - 1 + u) % u, ip = (i + 1) % u;
    double hl = hof((i - 1 + u) % u), hr = hof(i);
    A(i, im) += hl;
    A(i, i) += 2.0 * (hl + hr);
    A(i, ip) += hr;
    double yl = y_[(i - 1 + u) % u], yc = y_[i], yr = y_[i + 1];
    rhs[i] = 6.0 * ((yr - yc) / hr - (yc - yl) / hl);
  }
  Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  for (int i = 0; i < u; ++i) m_[i] = sol[i];
  m_[n - 1] = m_[0];
}

int CubicSpline::find_interval(double& t) const {
  const double a = x_.front(), b = x_.back();
  if (periodic_) {
    double span = b - a;
    t = t - span * std::floor((t - a) / span);
  } else {
    t = std::clamp(t, a, b);
  }
  int idx = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(x_.size()) - 2);
}

double CubicSpline::operator()(double t) const {
  int i = find_interval(t);
  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double t, int order) const {
  int i = find_interval(t);
  double h = x_[i + 1] - x_[i];
  double a = (x_[i + 1] - t) / h, b = (t - x_[i]) / h;
  switch (order) {
    case 1:
      return (y_[i + 1] - y_[i]) / h - (3.0 * a * a - 1.0) * h * m_[i] / 6.0 +
             (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
    case 2:
      return a * m_[i] + b * m_[i + 1];
    case 3:
      return (m_[i + 1] - m_[i]) / h;
    default:
      throw std::invalid_argument("CubicSpline::derivative: order must be 1..3");
  }
}

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size() || eps.size() < 2)
    throw std::invalid_argument("loglog_slope: need matching lists, length >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(eps.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(eps[i]), y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bikegeo
