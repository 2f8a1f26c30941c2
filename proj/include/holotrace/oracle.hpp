#pragma once

// Spectral ground truth on S^1: zeta sums sum_k a(k) lambda(k)^{-z} of
// multiplier models continued through Hurwitz zeta, their contour Laurent
// data, the matching symbol-side power families, and the Poisson correction
// between lattice sums and symbol integrals.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "holotrace/core.hpp"
#include "holotrace/hurwitz.hpp"
#include "holotrace/laurent.hpp"
#include "holotrace/quadrature.hpp"
#include "holotrace/series.hpp"
#include "holotrace/symbols.hpp"
#include "holotrace/zeta.hpp"

namespace holotrace {

// sum_j coeffs[j] |k|^{degree - j}.
struct PolyTail {
  double degree = 0.0;
  std::vector<double> coeffs;

  double operator()(double k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0.0) s += coeffs[j] * std::pow(k, degree - static_cast<double>(j));
    return s;
  }
};

// Even multipliers on Z: values from `*_small[|k|]` for |k| < k0 and from the
// tails for |k| >= k0. Without a_tail, a vanishes for |k| >= k0.
struct MultiplierModel {
  std::string name = "model";
  int k0 = 1;
  std::vector<double> a_small, lambda_small;
  std::optional<PolyTail> a_tail;
  PolyTail lambda_tail;
  std::string bracket = "psi";  // smooth extension to R: "psi" or "polynomial"

  double a(int k) const {
    int m = std::abs(k);
    if (m < k0) return m < static_cast<int>(a_small.size()) ? a_small[m] : 0.0;
    return a_tail ? (*a_tail)(m) : 0.0;
  }
  double lambda(int k) const {
    int m = std::abs(k);
    if (m < k0) return lambda_small.at(m);
    return lambda_tail(m);
  }
};

inline void validate_model(const MultiplierModel& m) {
  if (m.k0 < 1) throw error(errc::config, "k0 must be at least 1");
  if (static_cast<int>(m.lambda_small.size()) < m.k0) throw error(errc::config, "lambda_small needs k0 values");
  if (m.lambda_tail.coeffs.empty() || !(m.lambda_tail.coeffs[0] > 0.0) || !(m.lambda_tail.degree > 0.0))
    throw error(errc::config, "lambda tail needs positive leading coefficient and positive degree");
  if (m.bracket != "psi" && m.bracket != "polynomial") throw error(errc::config, "bracket must be psi or polynomial");
  for (int k = 0; k < std::max(m.k0, 16) + 64; ++k)
    if (!(m.lambda(k) > 0.0)) throw error(errc::admissibility, "lambda must be positive on Z");
}

inline MultiplierModel harmonic_model() {
  MultiplierModel m;
  m.name = "harmonic";
  m.k0 = 1;
  m.a_small = {1.0};
  m.lambda_small = {1.0};
  m.a_tail = PolyTail{0.0, {1.0}};
  m.lambda_tail = PolyTail{1.0, {1.0}};
  m.bracket = "psi";
  return m;
}

inline MultiplierModel shifted_laplacian_model() {
  MultiplierModel m;
  m.name = "shifted_laplacian";
  m.k0 = 1;
  m.a_small = {1.0};
  m.lambda_small = {1.0};
  m.a_tail = PolyTail{0.0, {1.0}};
  m.lambda_tail = PolyTail{2.0, {1.0, 0.0, 1.0}};
  m.bracket = "polynomial";
  return m;
}

inline MultiplierModel finite_support_model() {
  MultiplierModel m;
  m.name = "finite_support";
  m.k0 = 4;
  m.a_small = {1.0, 1.0, 1.0, 1.0};
  m.lambda_small = {1.0, 1.0, 2.0, 3.0};
  m.lambda_tail = PolyTail{1.0, {1.0}};
  return m;
}

namespace detail {

inline int direct_cut(const MultiplierModel& m) { return std::max(m.k0, 16); }

// e_i(z) with f_z(k) = sum_i e_i(z) k^{d_a - d z - i} for k >= k1, to order I.
inline std::vector<cplx> tail_coefficients(const MultiplierModel& m, cplx z, int I) {
  const auto& lt = m.lambda_tail.coeffs;
  double c0 = lt[0];
  std::vector<cplx> v(I + 1, 0.0);  // v(t) = sum_{j>=1} (c_j/c0) t^j
  for (std::size_t j = 1; j < lt.size() && static_cast<int>(j) <= I; ++j) v[j] = lt[j] / c0;
  // sum_m binom(-z, m) v^m; v^m starts at order m.
  std::vector<cplx> S(I + 1, 0.0), vm(I + 1, 0.0);
  vm[0] = 1.0;
  cplx bin = 1.0;
  for (int mm = 0; mm <= I; ++mm) {
    for (int i = 0; i <= I; ++i) S[i] += bin * vm[i];
    bin *= (-z - static_cast<double>(mm)) / static_cast<double>(mm + 1);
    vm = series_product(vm, v, I);
    bool zero = std::all_of(vm.begin(), vm.end(), [](cplx c) { return c == 0.0; });
    if (zero) break;
  }
  std::vector<cplx> A(I + 1, 0.0);
  for (std::size_t j = 0; j < m.a_tail->coeffs.size() && static_cast<int>(j) <= I; ++j) A[j] = m.a_tail->coeffs[j];
  auto e = series_product(A, S, I);
  cplx pw = std::exp(-z * std::log(c0));
  for (auto& c : e) c *= pw;
  return e;
}

}  // namespace detail

// Candidate poles (1 + d_a - i)/d, i >= 0, with Re above `lo`.
inline std::vector<cplx> multiplier_pole_candidates(const MultiplierModel& m, double lo = -8.0) {
  std::vector<cplx> out;
  if (!m.a_tail) return out;
  double d = m.lambda_tail.degree, da = m.a_tail->degree;
  for (int i = 0; ; ++i) {
    double z = (1.0 + da - i) / d;
    if (z <= lo) break;
    out.push_back(z);
  }
  return out;
}

// sum_k a(k) lambda(k)^{-z}, continued meromorphically.
inline cplx multiplier_zeta(const MultiplierModel& m, cplx z) {
  int k1 = detail::direct_cut(m);
  cplx total = 0.0;
  for (int k = -(k1 - 1); k <= k1 - 1; ++k) {
    double ak = m.a(k);
    if (ak != 0.0) total += ak * std::exp(-z * std::log(m.lambda(k)));
  }
  if (!m.a_tail) return total;
  double d = m.lambda_tail.degree, da = m.a_tail->degree;
  const int Imax = 160;
  auto e = detail::tail_coefficients(m, z, Imax);
  cplx tail = 0.0;
  int quiet = 0;
  for (int i = 0; i <= Imax; ++i) {
    if (e[i] == 0.0) {
      if (++quiet >= 8) return total + tail;
      continue;
    }
    cplx s = d * z - da + static_cast<double>(i);
    if (std::abs(s - 1.0) < 1e-13)
      throw pole_error("multiplier zeta evaluated at a pole", z, 2.0 * e[i] / d);
    cplx term = 2.0 * e[i] * hurwitz_zeta(s, static_cast<double>(k1));
    tail += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(tail))) {
      if (++quiet >= 8) return total + tail;
    } else {
      quiet = 0;
    }
  }
  throw error(errc::accuracy, "tail expansion of the multiplier zeta did not converge");
}

inline double multiplier_ring_radius(const MultiplierModel& m, cplx z0) {
  double gap = std::numeric_limits<double>::infinity();
  for (auto p : multiplier_pole_candidates(m, z0.real() - 8.0))
    if (std::abs(p - z0) > 1e-9) gap = std::min(gap, std::abs(p - z0));
  return std::isfinite(gap) ? std::min(0.5, 0.25 * gap) : 0.5;
}

inline LaurentSeries spectral_laurent(const MultiplierModel& m, cplx z0, int K, double ring_radius = 0.0,
                                      int points = default_ring_points, int threads = 1, int J = 3) {
  validate_model(m);
  double r = ring_radius > 0.0 ? ring_radius : multiplier_ring_radius(m, z0);
  for (auto p : multiplier_pole_candidates(m, z0.real() - 2.0 * r - 1.0))
    if (std::abs(p - z0) > 1e-9 && std::abs(p - z0) <= r * (1.0 + 1e-6))
      throw error(errc::config, "contour ring touches or encloses another pole candidate");
  return contour_laurent([&](cplx z) { return multiplier_zeta(m, z); }, z0, K, r, points, J, threads);
}

// Symbol-side counterpart: q = psi lambda_tail(|xi|), a = psi a_tail(|xi|) on
// the S^1 model, family a q^{-z}.
inline EllipticModelSymbol model_q(const MultiplierModel& m) {
  SymbolExpansion q(1, m.lambda_tail.degree);
  for (std::size_t j = 0; j < m.lambda_tail.coeffs.size(); ++j)
    if (m.lambda_tail.coeffs[j] != 0.0)
      q = add(q, make_power_symbol(1, m.lambda_tail.degree - static_cast<double>(j), m.lambda_tail.coeffs[j]));
  return EllipticModelSymbol(q);
}

inline SymbolExpansion model_a(const MultiplierModel& m) {
  if (!m.a_tail) return zero_symbol(1, 0.0);
  SymbolExpansion a(1, m.a_tail->degree);
  for (std::size_t j = 0; j < m.a_tail->coeffs.size(); ++j)
    if (m.a_tail->coeffs[j] != 0.0)
      a = add(a, make_power_symbol(1, m.a_tail->degree - static_cast<double>(j), m.a_tail->coeffs[j]));
  return a;
}

// Depth reaching every pole with Re z > window_lo.
inline int model_depth(const MultiplierModel& m, double window_lo = -2.0) {
  double d = m.lambda_tail.degree, da = m.a_tail ? m.a_tail->degree : 0.0;
  return std::max(default_depth(1), static_cast<int>(std::ceil(1.0 + da - d * window_lo)) + 2);
}

inline HolomorphicFamily model_family(const MultiplierModel& m, int depth = 0) {
  if (depth <= 0) depth = model_depth(m);
  return power_family(model_a(m), model_q(m), zeta_exponent(), depth);
}

// 2 pi fp int sigma(z): the model trace of the symbol-side family.
inline cplx symbol_zeta(const HolomorphicFamily& F, cplx z) {
  return finite_part_integral(slice(F, z), XEval::circle());
}

struct PoissonResult {
  cplx value = 0.0;          // sum_{0<|m|<=M} fhat(2 pi m)
  cplx integral = 0.0;       // int_R f_z
  cplx half_delta = 0.0;     // value(M) - value(M/2)
  double tail_bound = 0.0;   // bound on the neglected |xi| > X part
  int M_used = 0;
};

namespace detail {

// C-infinity transition from 0 on (-inf, lo] to 1 on [hi, inf).
inline double smooth_transition(double x, double lo, double hi) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  double t = (x - lo) / (hi - lo);
  double f = std::exp(-1.0 / t), g = std::exp(-1.0 / (1.0 - t));
  return f / (f + g);
}

}  // namespace detail

// Smooth extension of the model to R used by the Poisson correction; agrees
// with the model at every integer.
inline cplx model_extension(const MultiplierModel& m, double xi, cplx z) {
  double x = std::abs(xi);
  double a, l;
  if (m.bracket == "polynomial") {
    a = (*m.a_tail)(x);
    l = m.lambda_tail(x);
  } else {
    double chi = detail::smooth_transition(x, 0.25, 0.75);
    a = (1.0 - chi) * m.a_small[0] + chi * (*m.a_tail)(x);
    l = (1.0 - chi) * m.lambda_small[0] + chi * m.lambda_tail(x);
  }
  return a * std::exp(-z * std::log(l));
}

inline PoissonResult poisson_correction(const MultiplierModel& m, cplx z, int M_max) {
  validate_model(m);
  if (!m.a_tail) throw error(errc::unsupported, "Poisson correction needs a tail for a");
  if (m.bracket == "psi" && m.k0 != 1) throw error(errc::config, "psi bracket requires k0 = 1");
  if (m.bracket == "polynomial") {
    auto even_poly = [](const PolyTail& t) {
      for (std::size_t j = 0; j < t.coeffs.size(); ++j) {
        double e = t.degree - static_cast<double>(j);
        if (t.coeffs[j] != 0.0 && (e < 0.0 || std::abs(e / 2.0 - std::round(e / 2.0)) > 1e-12)) return false;
      }
      return true;
    };
    if (!even_poly(m.lambda_tail) || !even_poly(*m.a_tail))
      throw error(errc::config, "polynomial bracket requires even polynomial tails");
  }
  double sigma = (m.lambda_tail.degree * z - m.a_tail->degree).real();
  if (!(sigma > 1.0))
    throw error(errc::accuracy, "Poisson correction is only evaluated for Re(d z - d_a) > 1");
  PoissonResult r;
  r.M_used = std::max(0, M_max);
  // Integrate over [0, X] with panels resolving frequency M; beyond X the
  // integrand is below the reported bound.
  double X = std::min(4096.0, std::ceil(std::pow(1e12, 1.0 / (sigma - 1.0)) + 1.0));
  X = std::max(X, 8.0);
  cplx lead = std::abs(m.a_tail->coeffs[0]) * std::exp(-z * std::log(m.lambda_tail.coeffs[0]));
  r.tail_bound = 2.0 * std::abs(lead) * std::pow(X, 1.0 - sigma) / (sigma - 1.0);
  int per_unit = std::max(2, 2 * r.M_used);
  const GaussRule& g = gauss_legendre(16);
  std::vector<cplx> fhat(r.M_used + 1, 0.0);  // int_0^X f cos(2 pi m x)
  std::vector<double> breaks{0.0, 0.25, 0.75, 1.0};
  auto panel = [&](double a, double b) {
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double x = c + h * g.x[i];
      cplx f = h * g.w[i] * model_extension(m, x, z);
      // cos(2 pi m x) by rotation
      cplx rot = std::polar(1.0, two_pi * x), cur = 1.0;
      for (int mm = 0; mm <= r.M_used; ++mm) {
        fhat[mm] += f * cur.real();
        cur *= rot;
      }
    }
  };
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    int sub = std::max(1, per_unit / 2);
    for (int s = 0; s < sub; ++s)
      panel(breaks[b] + (breaks[b + 1] - breaks[b]) * s / sub, breaks[b] + (breaks[b + 1] - breaks[b]) * (s + 1) / sub);
  }
  for (int u = 1; u < static_cast<int>(X); ++u)
    for (int s = 0; s < per_unit; ++s) panel(u + static_cast<double>(s) / per_unit, u + static_cast<double>(s + 1) / per_unit);
  r.integral = 2.0 * fhat[0];
  cplx half = 0.0;
  for (int mm = 1; mm <= r.M_used; ++mm) {
    r.value += 4.0 * fhat[mm];  // f even: fhat(2 pi m) = fhat(-2 pi m) = 2 int_0^inf f cos
    if (mm <= r.M_used / 2) half += 4.0 * fhat[mm];
  }
  r.half_delta = r.value - half;
  return r;
}

}  // namespace holotrace
