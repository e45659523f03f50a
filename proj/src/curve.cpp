#include "bikegeo/curve.hpp"

#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "bikegeo/io.hpp"

namespace bikegeo {

namespace {

// Richardson-extrapolated central difference of a vector closure: 4th-order
// stencil at steps h and h/2 combined to 6th order.
Eigen::VectorXd richardson_derivative(const VecFn& f, double t, int order) {
  auto stencil = [&](double h) -> Eigen::VectorXd {
    switch (order) {
      case 1:
        return (f(t - 2 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2 * h)) / (12 * h);
      case 2:
        return (-f(t - 2 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) -
                f(t + 2 * h)) /
               (12 * h * h);
      default:
        return (f(t - 3 * h) - 8.0 * f(t - 2 * h) + 13.0 * f(t - h) - 13.0 * f(t + h) +
                8.0 * f(t + 2 * h) - f(t + 3 * h)) /
               (8 * h * h * h);
    }
  };
  const double h = (order < 3) ? 1e-2 : 2e-2;
  return (16.0 * stencil(h / 2) - stencil(h)) / 15.0;
}

int gcd_int(int a, int b) { return std::gcd(a, b); }

}  // namespace

double Curve::wrap(double t) const {
  if (!closed) return t;
  const double a = t0();
  return t - period * std::floor((t - a) / period);
}

Eigen::VectorXd Curve::position(double t) const {
  t = wrap(t);
  if (jet.valid()) return jet.p(t);
  Eigen::VectorXd out(dimension);
  for (int i = 0; i < dimension; ++i) out[i] = splines[i](t);
  return out;
}

Eigen::VectorXd Curve::fd_on_position(double t, int order) const {
  if (jet.valid()) return richardson_derivative(jet.p, t, order);
  Eigen::VectorXd out(dimension);
  for (int i = 0; i < dimension; ++i) out[i] = splines[i].derivative(t, order);
  return out;
}

Eigen::VectorXd Curve::velocity(double t) const {
  t = wrap(t);
  if (jet.d1) return jet.d1(t);
  return fd_on_position(t, 1);
}

Eigen::VectorXd Curve::acceleration(double t) const {
  t = wrap(t);
  if (jet.d2) return jet.d2(t);
  if (jet.d1) return richardson_derivative(jet.d1, t, 1);
  return fd_on_position(t, 2);
}

Eigen::VectorXd Curve::jerk(double t) const {
  t = wrap(t);
  if (jet.d3) return jet.d3(t);
  if (jet.d2) return richardson_derivative(jet.d2, t, 1);
  if (jet.d1) return richardson_derivative(jet.d1, t, 2);
  return fd_on_position(t, 3);
}

double Curve::length() const {
  // Cumulative Simpson with midpoint evaluations; 4th order in the fine step.
  const int n = std::max(4096, 2 * (sample_count() - 1));
  const double a = t0(), h = (t1() - a) / n;
  double s = 0.0;
  double f0 = velocity(a).norm();
  for (int i = 0; i < n; ++i) {
    double fm = velocity(a + (i + 0.5) * h).norm();
    double f1 = velocity(a + (i + 1.0) * h).norm();
    s += h / 6.0 * (f0 + 4.0 * fm + f1);
    f0 = f1;
  }
  return s;
}

void Curve::validate() const {
  if (dimension < 2) throw std::invalid_argument("Curve: dimension must be >= 2");
  if (points.cols() != dimension) throw std::invalid_argument("Curve: point width mismatch");
  if (points.rows() != params.size())
    throw std::invalid_argument("Curve: sample count mismatch");
  if (closed && unique_count() < 8)
    throw std::invalid_argument("Curve: closed curve needs at least 8 samples");

  double scale = (points.colwise().maxCoeff() - points.colwise().minCoeff()).norm();
  scale = std::max(scale, 1e-12);
  for (int i = 1; i < sample_count(); ++i) {
    if (!(params[i] > params[i - 1]))
      throw std::invalid_argument("Curve: parameters must be strictly increasing");
    if ((points.row(i) - points.row(i - 1)).norm() < 1e-13 * scale)
      throw std::invalid_argument("Curve: consecutive samples coincide");
  }
  if (closed) {
    if ((points.row(points.rows() - 1) - points.row(0)).norm() > 1e-6 * scale)
      throw std::invalid_argument("Curve: closed curve does not wrap to its start");
    if (std::abs((t1() - t0()) - period) > 1e-9 * std::abs(period))
      throw std::invalid_argument("Curve: period does not match parameter span");
  }
}

void Curve::finalize() {
  if (!jet.valid()) {
    splines.clear();
    splines.reserve(dimension);
    std::vector<double> xs(params.data(), params.data() + params.size());
    for (int c = 0; c < dimension; ++c) {
      std::vector<double> ys(sample_count());
      for (int i = 0; i < sample_count(); ++i) ys[i] = points(i, c);
      if (closed) ys.back() = ys.front();
      splines.emplace_back(xs, ys, closed);
    }
  }
  validate();
}

Curve curve_from_function(int dimension, const AnalyticJet& jet, double t0, double t1,
                          int samples, bool closed, const std::string& id) {
  Curve c;
  c.dimension = dimension;
  c.closed = closed;
  c.period = closed ? (t1 - t0) : 0.0;
  c.analytic_id = id;
  c.jet = jet;
  const int rows = closed ? samples + 1 : samples;
  c.params.resize(rows);
  c.points.resize(rows, dimension);
  const double h = (t1 - t0) / (closed ? samples : samples - 1);
  for (int i = 0; i < rows; ++i) {
    c.params[i] = t0 + i * h;
    c.points.row(i) = jet.p(c.params[i]).transpose();
  }
  if (closed) c.points.row(rows - 1) = c.points.row(0);  // exact wrap
  c.finalize();
  return c;
}

Curve curve_from_samples(const Eigen::VectorXd& params, const Eigen::MatrixXd& points,
                         bool closed, const std::string& id) {
  Curve c;
  c.dimension = static_cast<int>(points.cols());
  c.params = params;
  c.points = points;
  c.closed = closed;
  c.period = closed ? (params[params.size() - 1] - params[0]) : 0.0;
  c.analytic_id = id;
  c.finalize();
  return c;
}

double ell_kn(int k, int n) {
  double b = static_cast<double>(k) / n;
  return 1.0 / std::sqrt(1.0 - b * b);
}

double gamma_kn_phase(double t, double a, double b) {
  // Continuous branch of tan(phi/2) = -a tan(bt/2), phi(0) = 0. The atan2
  // form keeps the branch index consistent with the angle at the tan poles.
  const double u = 0.5 * b * t;
  const double K = std::round(u / kPi);
  const double x = u - K * kPi;  // in [-pi/2, pi/2]
  return 2.0 * (std::atan2(-a * std::sin(x), std::cos(x)) - K * kPi);
}

namespace {

Curve build_line(const CurveSpec& spec, int samples) {
  const double T = spec.get("T", 10.0);
  const int dim = static_cast<int>(spec.get("dimension", 2));
  AnalyticJet jet;
  jet.p = [dim](double t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = t;
    return v;
  };
  jet.d1 = [dim](double) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = 1.0;
    return v;
  };
  jet.d2 = [dim](double) { return Eigen::VectorXd::Zero(dim); };
  jet.d3 = jet.d2;
  return curve_from_function(dim, jet, 0.0, T, samples, false, "line");
}

Curve build_circle_multi(const CurveSpec& spec, int samples) {
  const int folds = static_cast<int>(spec.get("n_folds", 1));
  const double R = spec.get("radius", 1.0);
  const int dim = static_cast<int>(spec.get("dimension", 2));
  if (folds < 1) throw std::invalid_argument("circle_multi: n_folds must be >= 1");
  if (dim != 2 && dim != 3) throw std::invalid_argument("circle_multi: dimension 2 or 3");
  auto embed = [dim](double x, double y) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = x;
    v[1] = y;
    return v;
  };
  AnalyticJet jet;
  jet.p = [=](double t) { return embed(R * std::cos(t), R * std::sin(t)); };
  jet.d1 = [=](double t) { return embed(-R * std::sin(t), R * std::cos(t)); };
  jet.d2 = [=](double t) { return embed(-R * std::cos(t), -R * std::sin(t)); };
  jet.d3 = [=](double t) { return embed(R * std::sin(t), -R * std::cos(t)); };
  return curve_from_function(dim, jet, 0.0, 2.0 * kPi * folds, samples, true,
                             "circle_multi");
}

Curve build_gamma_kn(const CurveSpec& spec, int samples) {
  const int k = static_cast<int>(spec.get("k", 1));
  const int n = static_cast<int>(spec.get("n", 2));
  if (k < 1 || k >= n) throw std::invalid_argument("gamma_kn: need 1 <= k < n");
  if (gcd_int(k, n) != 1)
    throw std::invalid_argument("gamma_kn: (k,n) must be coprime; a d-fold cover of the "
                                "reduced pair is not generated");
  const double nk = static_cast<double>(n) / k;
  const double a = nk + std::sqrt(nk * nk - 1.0);
  const double b = static_cast<double>(k) / n;
  const double ell = ell_kn(k, n);

  // Gamma(t) = e^{it} (1 + 2 ell e^{i phi}), with phi' = -1 - cos(phi)/ell.
  auto phi = [=](double t) { return gamma_kn_phase(t, a, b); };
  auto phid = [=](double p) { return -1.0 - std::cos(p) / ell; };
  auto to_vec = [](std::complex<double> z) {
    Eigen::VectorXd v(2);
    v[0] = z.real();
    v[1] = z.imag();
    return v;
  };
  const std::complex<double> I(0.0, 1.0);
  AnalyticJet jet;
  jet.p = [=](double t) {
    return to_vec(std::exp(I * t) * (1.0 + 2.0 * ell * std::exp(I * phi(t))));
  };
  // Derivatives collapse through 1 + phi' = -cos(phi)/ell:
  //   d1 = -i e^{it} e^{2 i phi},  d2 = d1 . i(1 + 2 phi'),
  //   d3 = d1 . [ (i(1+2 phi'))^2 + 2 i phi'' ].
  jet.d1 = [=](double t) {
    return to_vec(-I * std::exp(I * t) * std::exp(2.0 * I * phi(t)));
  };
  jet.d2 = [=](double t) {
    double p = phi(t);
    std::complex<double> d1 = -I * std::exp(I * t) * std::exp(2.0 * I * p);
    return to_vec(d1 * I * (1.0 + 2.0 * phid(p)));
  };
  jet.d3 = [=](double t) {
    double p = phi(t);
    double pd = phid(p);
    double pdd = std::sin(p) * pd / ell;
    std::complex<double> d1 = -I * std::exp(I * t) * std::exp(2.0 * I * p);
    std::complex<double> w = I * (1.0 + 2.0 * pd);
    return to_vec(d1 * (w * w + 2.0 * I * pdd));
  };
  return curve_from_function(2, jet, 0.0, 2.0 * kPi * n, samples, true, "gamma_kn");
}

}  // namespace

Curve build_curve(const CurveSpec& spec, int samples_per_period) {
  if (samples_per_period < 8)
    throw std::invalid_argument("build_curve: need at least 8 samples per period");
  if (spec.id == "line") return build_line(spec, samples_per_period);
  if (spec.id == "circle_multi") return build_circle_multi(spec, samples_per_period);
  if (spec.id == "gamma_kn") return build_gamma_kn(spec, samples_per_period);
  throw std::invalid_argument("build_curve: unknown analytic id '" + spec.id + "'");
}

Curve resample_arclength(const Curve& c, int m) {
  if (m < (c.closed ? 8 : 2)) throw std::invalid_argument("resample_arclength: m too small");

  // Arclength table on a fine grid (cumulative Simpson with midpoints).
  const int n = std::max({4096, 8 * m, 4 * c.unique_count()});
  const double a = c.t0(), h = (c.t1() - a) / n;
  std::vector<double> tg(n + 1), sg(n + 1);
  sg[0] = 0.0;
  tg[0] = a;
  double f0 = c.velocity(a).norm();
  const double degeneracy_floor = 1e-10;
  for (int i = 0; i < n; ++i) {
    double fm = c.velocity(a + (i + 0.5) * h).norm();
    double f1 = c.velocity(a + (i + 1.0) * h).norm();
    if (fm < degeneracy_floor || f1 < degeneracy_floor)
      throw std::invalid_argument("resample_arclength: near-zero speed (degenerate curve)");
    sg[i + 1] = sg[i] + h / 6.0 * (f0 + 4.0 * fm + f1);
    tg[i + 1] = a + (i + 1) * h;
    f0 = f1;
  }
  const double L = sg.back();

  auto tinv = std::make_shared<CubicSpline>(sg, tg, false);
  // the source curve stays alive inside the jet closures
  auto keep = std::make_shared<Curve>(c);

  AnalyticJet jet;
  jet.p = [keep, tinv](double s) { return keep->position((*tinv)(s)); };
  jet.d1 = [keep, tinv](double s) {
    Eigen::VectorXd v = keep->velocity((*tinv)(s));
    return Eigen::VectorXd(v / v.norm());
  };
  jet.d2 = [keep, tinv](double s) {
    double t = (*tinv)(s);
    Eigen::VectorXd v = keep->velocity(t);
    Eigen::VectorXd acc = keep->acceleration(t);
    double n2 = v.squaredNorm();
    Eigen::VectorXd vh = v / std::sqrt(n2);
    return Eigen::VectorXd((acc - vh.dot(acc) * vh) / n2);
  };
  // d3 falls back to differencing d2.

  Curve out = curve_from_function(c.dimension, jet, 0.0, L, m, c.closed, c.analytic_id);
  return out;
}

Curve curve_on_grid(const Curve& src, int samples) {
  auto keep = std::make_shared<Curve>(src);
  AnalyticJet jet;
  jet.p = [keep](double t) { return keep->position(t); };
  jet.d1 = [keep](double t) { return keep->velocity(t); };
  jet.d2 = [keep](double t) { return keep->acceleration(t); };
  return curve_from_function(src.dimension, jet, src.t0(), src.t1(), samples, src.closed,
                             src.analytic_id);
}

double signed_planar_area(const Curve& c) {
  if (!c.closed) throw std::invalid_argument("signed_planar_area: curve must be closed");
  if (c.dimension != 2) throw std::invalid_argument("signed_planar_area: requires n = 2");
  const int m = c.unique_count();
  const double h = c.step();
  Eigen::VectorXd f(m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd p = c.points.row(i);
    Eigen::VectorXd v = c.velocity(c.params[i]);
    f[i] = 0.5 * (p[0] * v[1] - p[1] * v[0]);
  }
  return trapezoid_periodic(f, h);
}

Curve random_smooth_closed_curve(int dimension, Rng& rng, int samples, int max_mode,
                                 double amplitude) {
  // coefficient tables [dim][mode] for cos and sin
  auto coeffs = std::make_shared<Eigen::MatrixXd>(dimension, 2 * max_mode);
  for (int d = 0; d < dimension; ++d)
    for (int m = 0; m < max_mode; ++m) {
      double decay = amplitude / ((m + 1) * (m + 1));
      (*coeffs)(d, 2 * m) = rng.uniform(-decay, decay);
      (*coeffs)(d, 2 * m + 1) = rng.uniform(-decay, decay);
    }
  auto eval = [coeffs, dimension, max_mode](double t, int deriv) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension);
    // base circle in the first two coordinates
    double c = std::cos(t + deriv * kPi / 2.0), s = std::sin(t + deriv * kPi / 2.0);
    out[0] += c;
    out[1] += s;
    for (int d = 0; d < dimension; ++d)
      for (int m = 0; m < max_mode; ++m) {
        double w = m + 1.0;
        double pw = std::pow(w, deriv);
        out[d] += (*coeffs)(d, 2 * m) * pw * std::cos(w * t + deriv * kPi / 2.0);
        out[d] += (*coeffs)(d, 2 * m + 1) * pw * std::sin(w * t + deriv * kPi / 2.0);
      }
    return out;
  };
  AnalyticJet jet;
  jet.p = [eval](double t) { return eval(t, 0); };
  jet.d1 = [eval](double t) { return eval(t, 1); };
  jet.d2 = [eval](double t) { return eval(t, 2); };
  jet.d3 = [eval](double t) { return eval(t, 3); };
  return curve_from_function(dimension, jet, 0.0, 2.0 * kPi, samples, true, "random");
}

void write_curve_csv(const Curve& c, const std::string& path) {
  std::ostringstream out;
  out << "t";
  for (int i = 1; i <= c.dimension; ++i) out << ",x" << i;
  out << "\n";
  for (int r = 0; r < c.sample_count(); ++r) {
    out << format_double(c.params[r]);
    for (int i = 0; i < c.dimension; ++i) out << "," << format_double(c.points(r, i));
    out << "\n";
  }
  atomic_write(path, out.str());

  nlohmann::json meta;
  meta["dimension"] = c.dimension;
  meta["closed"] = c.closed;
  meta["period"] = c.period;
  meta["analytic_id"] = c.analytic_id;
  write_json(path + ".json", meta);
}

Curve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  int cols = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
  if (cols < 3) throw std::runtime_error("curve CSV: expected t,x1,...,xn header");

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != cols)
      throw std::runtime_error("curve CSV: ragged row");
    rows.push_back(std::move(row));
  }

  Eigen::VectorXd params(rows.size());
  Eigen::MatrixXd pts(rows.size(), cols - 1);
  for (size_t i = 0; i < rows.size(); ++i) {
    params[static_cast<int>(i)] = rows[i][0];
    for (int j = 1; j < cols; ++j) pts(static_cast<int>(i), j - 1) = rows[i][j];
  }

  bool closed = false;
  std::string id;
  try {
    nlohmann::json meta = read_json(path + ".json");
    closed = meta.value("closed", false);
    id = meta.value("analytic_id", "");
  } catch (const std::exception&) {
    // no sidecar: treat as an open sampled curve
  }
  return curve_from_samples(params, pts, closed, id);
}

}  // namespace bikegeo
