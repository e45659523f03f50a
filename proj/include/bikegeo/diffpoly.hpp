#pragma once

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <vector>

#include "bikegeo/frenet.hpp"
#include "bikegeo/vendor_json.hpp"

namespace bikegeo::diffpoly {

using Rat = boost::multiprecision::cpp_rational;

// Gaussian rational: exact complex coefficients, no floating point inside the
// algebra.
struct CRat {
  Rat re{0}, im{0};

  CRat() = default;
  CRat(long n) : re(n) {}
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  CRat conj() const { return {re, -im}; }
  friend CRat operator+(const CRat& a, const CRat& b) { return {a.re + b.re, a.im + b.im}; }
  friend CRat operator-(const CRat& a, const CRat& b) { return {a.re - b.re, a.im - b.im}; }
  friend CRat operator-(const CRat& a) { return {-a.re, -a.im}; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRat operator/(const CRat& a, const CRat& b) {
    Rat d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
};

inline CRat rat(long num, long den = 1) { return CRat(Rat(num) / Rat(den)); }
inline CRat irat(long num, long den = 1) { return CRat(Rat(0), Rat(num) / Rat(den)); }

enum class Sym : int { Kappa = 0, Tau = 1 };

// kappa^{(order)} or tau^{(order)} raised to a positive power.
struct Factor {
  int sym = 0;    // 0 = kappa, 1 = tau
  int order = 0;  // arclength derivative order
  int power = 1;

  friend auto operator<=>(const Factor&, const Factor&) = default;
};

// Product of factors, sorted by (symbol, derivative order); exponents merged.
// Scaling weight: kappa^{(j)} and tau^{(j)} carry weight j + 1.
struct Monomial {
  std::vector<Factor> factors;  // canonical: sorted, powers >= 1

  int weight() const;
  bool operator<(const Monomial& rhs) const;
  bool operator==(const Monomial& rhs) const { return factors == rhs.factors; }
};

// Complex-rational differential polynomial in kappa, tau and their arclength
// derivatives, kept in canonical form (sorted monomials, merged terms, zero
// coefficients dropped).
class DiffPoly {
 public:
  DiffPoly() = default;
  DiffPoly(CRat c) { add_term(Monomial{}, c); }

  static DiffPoly symbol(Sym s, int order = 0, int power = 1);

  void add_term(const Monomial& m, const CRat& c);
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, CRat>& terms() const { return terms_; }

  // weight of a homogeneous polynomial; -1 for 0; throws if mixed
  int weight() const;
  bool is_homogeneous() const;

  DiffPoly real_part() const;  // terms with Re(coeff)
  DiffPoly imag_part() const;  // terms with Im(coeff), as a real polynomial
  DiffPoly conj() const;

  friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator-(const DiffPoly& a);
  friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);
  friend DiffPoly operator*(const CRat& c, const DiffPoly& a);
  friend bool operator==(const DiffPoly& a, const DiffPoly& b) {
    return a.terms_ == b.terms_;
  }

  std::string str() const;
  nlohmann::json to_json() const;  // machine-readable term list

 private:
  std::map<Monomial, CRat> terms_;
};

// Leibniz-expanded arclength derivative; raises homogeneous weight by 1.
DiffPoly dp_derivative(const DiffPoly& p);

// convenience constructors
inline DiffPoly kappa(int order = 0, int power = 1) {
  return DiffPoly::symbol(Sym::Kappa, order, power);
}
inline DiffPoly tau(int order = 0, int power = 1) {
  return DiffPoly::symbol(Sym::Tau, order, power);
}

// Coefficients Z_0..Z_N of the formal power series solving ell Z' = Z - ell f,
// f = i tau Z + (kappa/2)(1 + Z^2).
std::vector<DiffPoly> zn_series(int N);

// Monodromy integrands: coefficient of ell^n in (1 - i ell tau - ell kappa Z).
// The canonical form is the parity projection (real for even n, imaginary for
// odd n) whenever the discarded part is an exact derivative; raw keeps the
// unprojected coefficient.
struct MonodromyIntegrand {
  DiffPoly canonical;
  DiffPoly raw;
  bool parity_verified = false;
  DiffPoly dropped_witness;  // d(witness)/dt = raw - canonical when verified
};
std::vector<MonodromyIntegrand> monodromy_integrands(int N);

// Filament hierarchy fields x_0..x_N in the Frenet basis, from the recursion
// x_i' = v x x_{i+1} with the normalization x.x = 1 fixing the v-components
// order by order (x_0 = -v).
struct FrameField {
  std::array<DiffPoly, 3> comp;  // (v, n, b) components
};
std::vector<FrameField> filament_fields(int N);

// Filament integrands F_1..F_N: the five printed densities exactly; beyond
// F_5 the v-component of the hierarchy per index, tagged experimental.
struct FilamentIntegrand {
  DiffPoly density;
  bool experimental = false;
};
std::vector<FilamentIntegrand> filament_integrands(int N);

// Decide p - q = d(w)/dt for some differential polynomial w. The grading
// forces weight(w) = weight(p) - 1, so the basis is finite and the answer is
// always conclusive for homogeneous inputs (mixed weights are split).
struct TotalDerivativeResult {
  bool equal = false;
  bool conclusive = true;
  DiffPoly witness;
};
TotalDerivativeResult equal_mod_total_derivative(const DiffPoly& p, const DiffPoly& q);

// Quadrature of the integrand along a sampled curve; kappa/tau derivative
// samples from centered stencils (order <= 4).
std::complex<double> evaluate_on_curve(const DiffPoly& p, const FrenetData& geo,
                                       bool closed);

}  // namespace bikegeo::diffpoly
