#include "bikegeo/diffpoly.hpp"

#include <sstream>

namespace bikegeo::diffpoly {

int Monomial::weight() const {
  int w = 0;
  for (const auto& f : factors) w += f.power * (f.order + 1);
  return w;
}

bool Monomial::operator<(const Monomial& rhs) const {
  // lexicographic in (symbol, derivative order), exponents descending
  size_t i = 0, j = 0;
  while (i < factors.size() && j < rhs.factors.size()) {
    const Factor& a = factors[i];
    const Factor& b = rhs.factors[j];
    if (a.sym != b.sym) return a.sym < b.sym;
    if (a.order != b.order) return a.order < b.order;
    if (a.power != b.power) return a.power > b.power;
    ++i;
    ++j;
  }
  return factors.size() < rhs.factors.size();
}

DiffPoly DiffPoly::symbol(Sym s, int order, int power) {
  DiffPoly p;
  Monomial m;
  if (power != 0) m.factors.push_back({static_cast<int>(s), order, power});
  p.add_term(m, CRat(1));
  return p;
}

void DiffPoly::add_term(const Monomial& m, const CRat& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int DiffPoly::weight() const {
  if (terms_.empty()) return -1;
  int w = terms_.begin()->first.weight();
  for (const auto& [m, c] : terms_)
    if (m.weight() != w)
      throw std::logic_error("DiffPoly::weight: polynomial is not homogeneous");
  return w;
}

bool DiffPoly::is_homogeneous() const {
  if (terms_.empty()) return true;
  int w = terms_.begin()->first.weight();
  for (const auto& [m, c] : terms_)
    if (m.weight() != w) return false;
  return true;
}

DiffPoly DiffPoly::real_part() const {
  DiffPoly out;
  for (const auto& [m, c] : terms_) out.add_term(m, CRat(c.re));
  return out;
}

DiffPoly DiffPoly::imag_part() const {
  DiffPoly out;
  for (const auto& [m, c] : terms_) out.add_term(m, CRat(c.im));
  return out;
}

DiffPoly DiffPoly::conj() const {
  DiffPoly out;
  for (const auto& [m, c] : terms_) out.add_term(m, c.conj());
  return out;
}

DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out = a;
  for (const auto& [m, c] : b.terms_) out.add_term(m, c);
  return out;
}

DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out = a;
  for (const auto& [m, c] : b.terms_) out.add_term(m, -c);
  return out;
}

DiffPoly operator-(const DiffPoly& a) {
  DiffPoly out;
  for (const auto& [m, c] : a.terms_) out.add_term(m, -c);
  return out;
}

namespace {

Monomial merge_monomials(const Monomial& a, const Monomial& b) {
  Monomial out;
  size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size() ||
        (i < a.factors.size() &&
         std::pair{a.factors[i].sym, a.factors[i].order} <
             std::pair{b.factors[j].sym, b.factors[j].order})) {
      out.factors.push_back(a.factors[i++]);
    } else if (i == a.factors.size() ||
               std::pair{b.factors[j].sym, b.factors[j].order} <
                   std::pair{a.factors[i].sym, a.factors[i].order}) {
      out.factors.push_back(b.factors[j++]);
    } else {
      Factor f = a.factors[i];
      f.power += b.factors[j].power;
      out.factors.push_back(f);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
  DiffPoly out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(merge_monomials(ma, mb), ca * cb);
  return out;
}

DiffPoly operator*(const CRat& c, const DiffPoly& a) {
  DiffPoly out;
  for (const auto& [m, v] : a.terms_) out.add_term(m, c * v);
  return out;
}

DiffPoly dp_derivative(const DiffPoly& p) {
  DiffPoly out;
  for (const auto& [m, c] : p.terms()) {
    for (size_t k = 0; k < m.factors.size(); ++k) {
      // d/dt of factor k, Leibniz style
      Monomial rest;
      for (size_t i = 0; i < m.factors.size(); ++i) {
        if (i == k) continue;
        rest.factors.push_back(m.factors[i]);
      }
      const Factor& f = m.factors[k];
      Monomial dfk;  // f.power * sym^{(order)}^{power-1} * sym^{(order+1)}
      if (f.power > 1) dfk.factors.push_back({f.sym, f.order, f.power - 1});
      dfk.factors.push_back({f.sym, f.order + 1, 1});
      std::sort(dfk.factors.begin(), dfk.factors.end(),
                [](const Factor& x, const Factor& y) {
                  return std::pair{x.sym, x.order} < std::pair{y.sym, y.order};
                });
      out.add_term(merge_monomials(rest, dfk), c * CRat(f.power));
    }
  }
  return out;
}

std::vector<DiffPoly> zn_series(int N) {
  std::vector<DiffPoly> Z;
  Z.push_back(DiffPoly());  // Z_0 = 0
  const DiffPoly k = kappa();
  const DiffPoly it = irat(1) * tau();
  for (int n = 1; n <= N; ++n) {
    // [f]_{n-1} with f = i tau Z + (kappa/2)(1 + Z^2)
    DiffPoly fcoef = it * Z[n - 1];
    if (n - 1 == 0) fcoef = fcoef + rat(1, 2) * k;
    DiffPoly sq;
    for (int a = 0; a <= n - 1; ++a) {
      int b = n - 1 - a;
      if (a < static_cast<int>(Z.size()) && b < static_cast<int>(Z.size()))
        sq = sq + Z[a] * Z[b];
    }
    fcoef = fcoef + rat(1, 2) * (k * sq);
    Z.push_back(dp_derivative(Z[n - 1]) + fcoef);
  }
  return Z;
}

std::vector<MonodromyIntegrand> monodromy_integrands(int N) {
  std::vector<DiffPoly> Z = zn_series(std::max(0, N - 1));
  std::vector<MonodromyIntegrand> out;
  for (int n = 0; n <= N; ++n) {
    MonodromyIntegrand mi;
    if (n == 0) {
      mi.raw = DiffPoly(rat(1));
    } else {
      mi.raw = -(kappa() * Z[n - 1]);
      if (n == 1) mi.raw = mi.raw - irat(1) * tau();
    }
    // parity projection: real for even n, imaginary for odd n
    DiffPoly projected =
        (n % 2 == 0) ? mi.raw.real_part() : irat(1) * mi.raw.imag_part();
    DiffPoly dropped = mi.raw - projected;
    if (dropped.is_zero()) {
      mi.canonical = projected;
      mi.parity_verified = true;
    } else {
      TotalDerivativeResult td = equal_mod_total_derivative(dropped, DiffPoly());
      if (td.equal) {
        mi.canonical = projected;
        mi.parity_verified = true;
        mi.dropped_witness = td.witness;
      } else {
        mi.canonical = mi.raw;  // parity not established: report, don't assert
        mi.parity_verified = false;
      }
    }
    out.push_back(std::move(mi));
  }
  return out;
}

std::vector<FrameField> filament_fields(int N) {
  std::vector<FrameField> x;
  FrameField x0;
  x0.comp = {DiffPoly(rat(-1)), DiffPoly(), DiffPoly()};  // -v
  x.push_back(x0);
  const DiffPoly k = kappa();
  const DiffPoly t = tau();
  for (int i = 0; i + 1 <= N; ++i) {
    const auto& [av, bn, cb] = x[i].comp;
    FrameField nx;
    // v x x_{i+1} = -(b comp of x_{i+1}) n + (n comp of x_{i+1}) b matched
    // against the frame derivative of x_i:
    nx.comp[1] = dp_derivative(cb) + t * bn;           // n component
    nx.comp[2] = t * cb - k * av - dp_derivative(bn);  // b component
    // normalization x.x = 1: v-component from the lower-order products
    DiffPoly sum;
    for (int p = 1; p <= i; ++p) {
      int q = i + 1 - p;
      if (q < 1 || q > i) continue;
      sum = sum + x[p].comp[0] * x[q].comp[0] + x[p].comp[1] * x[q].comp[1] +
            x[p].comp[2] * x[q].comp[2];
    }
    nx.comp[0] = rat(1, 2) * sum;
    x.push_back(nx);
  }
  return x;
}

std::vector<FilamentIntegrand> filament_integrands(int N) {
  std::vector<FilamentIntegrand> out;
  const DiffPoly k = kappa();
  const DiffPoly t = tau();
  std::vector<DiffPoly> printed = {
      DiffPoly(rat(1)),
      t,
      k * k,
      k * k * t,
      kappa(1) * kappa(1) + k * k * t * t - rat(1, 4) * (k * k * k * k),
  };
  std::vector<FrameField> fields;
  if (N > 5) fields = filament_fields(N - 1);
  for (int i = 1; i <= N; ++i) {
    FilamentIntegrand fi;
    if (i <= 5) {
      fi.density = printed[i - 1];
    } else {
      fi.density = fields[i - 1].comp[0];  // v-component of the hierarchy
      fi.experimental = true;
    }
    out.push_back(std::move(fi));
  }
  return out;
}

namespace {

// All monomials of the given weight (parts kappa^{(j)}, tau^{(j)} of weight
// j+1), enumerated deterministically.
void enumerate_monomials(int weight, int min_key, Monomial& cur,
                         std::vector<Monomial>& out) {
  if (weight == 0) {
    Monomial m = cur;
    std::sort(m.factors.begin(), m.factors.end(), [](const Factor& a, const Factor& b) {
      return std::pair{a.sym, a.order} < std::pair{b.sym, b.order};
    });
    out.push_back(m);
    return;
  }
  // factor keys: key = 2*order + sym, weight of one power = order + 1
  for (int key = min_key; key / 2 + 1 <= weight; ++key) {
    int order = key / 2, sym = key % 2;
    int unit = order + 1;
    for (int power = 1; power * unit <= weight; ++power) {
      cur.factors.push_back({sym, order, power});
      enumerate_monomials(weight - power * unit, key + 1, cur, out);
      cur.factors.pop_back();
    }
  }
}

std::vector<Monomial> monomial_basis(int weight) {
  std::vector<Monomial> out;
  Monomial cur;
  if (weight == 0) {
    out.push_back(cur);
    return out;
  }
  enumerate_monomials(weight, 0, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

// Exact Gaussian elimination over the Gaussian rationals: solve A x = b,
// returns false if inconsistent.
bool solve_exact(std::vector<std::vector<CRat>>& A, std::vector<CRat>& b,
                 std::vector<CRat>& x) {
  const int rows = static_cast<int>(A.size());
  const int cols = rows ? static_cast<int>(A[0].size()) : 0;
  std::vector<int> pivot_col_of_row;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int sel = -1;
    for (int i = r; i < rows; ++i)
      if (!A[i][c].is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(A[sel], A[r]);
    std::swap(b[sel], b[r]);
    CRat inv = CRat(1) / A[r][c];
    for (int j = c; j < cols; ++j) A[r][j] = A[r][j] * inv;
    b[r] = b[r] * inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || A[i][c].is_zero()) continue;
      CRat f = A[i][c];
      for (int j = c; j < cols; ++j) A[i][j] = A[i][j] - f * A[r][j];
      b[i] = b[i] - f * b[r];
    }
    pivot_col_of_row.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (!b[i].is_zero()) return false;  // inconsistent
  x.assign(cols, CRat(0));
  for (int i = 0; i < r; ++i) x[pivot_col_of_row[i]] = b[i];
  return true;
}

}  // namespace

TotalDerivativeResult equal_mod_total_derivative(const DiffPoly& p, const DiffPoly& q) {
  TotalDerivativeResult res;
  DiffPoly d = p - q;
  if (d.is_zero()) {
    res.equal = true;
    return res;
  }

  // split by weight; each graded component must be an exact derivative
  std::map<int, DiffPoly> by_weight;
  for (const auto& [m, c] : d.terms()) by_weight[m.weight()].add_term(m, c);

  DiffPoly witness;
  for (auto& [w, comp] : by_weight) {
    if (w == 0) {
      res.equal = false;  // nonzero constants are never exact derivatives
      return res;
    }
    std::vector<Monomial> wbasis = monomial_basis(w - 1);
    std::vector<DiffPoly> images;
    images.reserve(wbasis.size());
    std::map<Monomial, int> row_of;
    for (const auto& m : wbasis) {
      DiffPoly mono;
      mono.add_term(m, CRat(1));
      DiffPoly der = dp_derivative(mono);
      for (const auto& [mm, cc] : der.terms())
        if (!row_of.count(mm)) row_of.emplace(mm, static_cast<int>(row_of.size()));
      images.push_back(std::move(der));
    }
    for (const auto& [mm, cc] : comp.terms())
      if (!row_of.count(mm)) row_of.emplace(mm, static_cast<int>(row_of.size()));

    const int rows = static_cast<int>(row_of.size());
    const int cols = static_cast<int>(wbasis.size());
    std::vector<std::vector<CRat>> A(rows, std::vector<CRat>(cols, CRat(0)));
    std::vector<CRat> rhs(rows, CRat(0));
    for (int c = 0; c < cols; ++c)
      for (const auto& [mm, cc] : images[c].terms()) A[row_of[mm]][c] = cc;
    for (const auto& [mm, cc] : comp.terms()) rhs[row_of[mm]] = cc;

    std::vector<CRat> sol;
    if (!solve_exact(A, rhs, sol)) {
      res.equal = false;
      return res;
    }
    for (int c = 0; c < cols; ++c) witness.add_term(wbasis[c], sol[c]);
  }
  res.equal = true;
  res.witness = witness;
  return res;
}

std::complex<double> evaluate_on_curve(const DiffPoly& p, const FrenetData& geo,
                                       bool closed) {
  const int m = static_cast<int>(geo.curvature.size());
  // required derivative orders
  int max_order[2] = {0, 0};
  bool need_tau = false;
  for (const auto& [mono, c] : p.terms())
    for (const auto& f : mono.factors) {
      max_order[f.sym] = std::max(max_order[f.sym], f.order);
      if (f.sym == 1) need_tau = true;
    }
  if (max_order[0] > 4 || max_order[1] > 4)
    throw std::invalid_argument(
        "evaluate_on_curve: derivative order exceeds stencil capability (max 4)");
  if (need_tau && geo.dimension == 3)
    for (int i = 0; i < m; ++i)
      if (!geo.torsion_valid[i])
        throw std::invalid_argument("evaluate_on_curve: torsion unavailable at a sample");

  // derivative tables: deriv[sym][order] is an m-vector
  std::vector<std::vector<Eigen::VectorXd>> deriv(2);
  Eigen::MatrixXd kap = geo.curvature;
  Eigen::MatrixXd tu = (geo.dimension == 3 && geo.torsion.size() == m)
                           ? Eigen::MatrixXd(geo.torsion)
                           : Eigen::MatrixXd(Eigen::VectorXd::Zero(m));
  deriv[0].push_back(kap.col(0));
  deriv[1].push_back(tu.col(0));
  for (int sym = 0; sym < 2; ++sym) {
    Eigen::MatrixXd base = (sym == 0) ? kap : tu;
    for (int o = 1; o <= max_order[sym]; ++o)
      deriv[sym].push_back(fd_derivative(base, geo.h, o, closed).col(0));
  }

  Eigen::VectorXcd integrand = Eigen::VectorXcd::Zero(m);
  for (const auto& [mono, c] : p.terms()) {
    std::complex<double> coeff(static_cast<double>(c.re), static_cast<double>(c.im));
    for (int i = 0; i < m; ++i) {
      double prod = 1.0;
      for (const auto& f : mono.factors)
        prod *= std::pow(deriv[f.sym][f.order][i], f.power);
      integrand[i] += coeff * prod;
    }
  }
  if (closed) return trapezoid_periodic(integrand, geo.h);
  std::complex<double> re = simpson(integrand.real(), geo.h);
  std::complex<double> im = simpson(integrand.imag(), geo.h);
  return re + std::complex<double>(0, 1) * im;
}

std::string DiffPoly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    std::string cs;
    {
      std::ostringstream co;
      bool has_re = (c.re != 0), has_im = (c.im != 0);
      if (has_re && has_im)
        co << "(" << c.re << (c.im > 0 ? "+" : "") << c.im << "i)";
      else if (has_im)
        co << c.im << "i";
      else
        co << c.re;
      cs = co.str();
    }
    if (!first) out << " + ";
    first = false;
    out << cs;
    for (const auto& f : m.factors) {
      out << "*" << (f.sym == 0 ? "kappa" : "tau");
      for (int i = 0; i < f.order; ++i) out << "'";
      if (f.power > 1) out << "^" << f.power;
    }
  }
  return out.str();
}

nlohmann::json DiffPoly::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : terms_) {
    nlohmann::json term;
    term["coeff_re"] = static_cast<double>(c.re);
    term["coeff_im"] = static_cast<double>(c.im);
    term["factors"] = nlohmann::json::array();
    for (const auto& f : m.factors) {
      term["factors"].push_back({{"symbol", f.sym == 0 ? "kappa" : "tau"},
                                 {"deriv_order", f.order},
                                 {"power", f.power}});
    }
    terms.push_back(term);
  }
  return terms;
}

}  // namespace bikegeo::diffpoly
