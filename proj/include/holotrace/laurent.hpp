#pragma once

// Laurent expansion of z -> fp int sigma(z) at z0: the analytic assembly from
// residues and L_k symbols, the contour-fit oracle, the density invariance
// check under linear changes of variables, and model traces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "holotrace/core.hpp"
#include "holotrace/families.hpp"
#include "holotrace/finitepart.hpp"
#include "holotrace/series.hpp"
#include "holotrace/symbols.hpp"

namespace holotrace {

// f(z) = sum_j principal[j-1] (z-z0)^{-j} + sum_k regular[k] (z-z0)^k / k!.
struct LaurentSeries {
  cplx z0 = 0.0;
  std::vector<cplx> principal;
  std::vector<cplx> regular;
  int K = 0;
  std::string method = "analytic";
  double fit_residual = 0.0;  // empirical only
  double ring_radius = 0.0;   // empirical only
  int points = 0;             // empirical only

  cplx residue() const { return principal.empty() ? cplx(0.0) : principal[0]; }
  cplx eval(cplx z) const {
    cplx h = z - z0, v = 0.0;
    for (std::size_t j = 0; j < principal.size(); ++j) v += principal[j] / std::pow(h, static_cast<int>(j) + 1);
    for (std::size_t k = 0; k < regular.size(); ++k) v += regular[k] * std::pow(h, static_cast<int>(k)) / factorial(static_cast<int>(k));
    return v;
  }
};

inline constexpr int default_laurent_K = 4;
inline constexpr int default_ring_points = 64;

// Values f(z_t) computed on up to `threads` workers; order of results is fixed.
inline std::vector<cplx> parallel_values(const std::function<cplx(cplx)>& f, const std::vector<cplx>& zs, int threads) {
  std::vector<cplx> out(zs.size());
  int T = std::max(1, std::min<int>(threads, static_cast<int>(zs.size())));
  if (T == 1) {
    for (std::size_t i = 0; i < zs.size(); ++i) out[i] = f(zs[i]);
    return out;
  }
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < T; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t i = t; i < zs.size(); i += T) out[i] = f(zs[i]);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

inline cplx family_finite_part(const HolomorphicFamily& F, cplx z, const XEval& xe = {}) {
  return finite_part_integral(slice(F, z), xe);
}

// Analytic Laurent data of fp int sigma(z) around z0 for a base family.
inline LaurentSeries laurent_expansion(const HolomorphicFamily& F, cplx z0, int K, const XEval& xe = {}) {
  if (K < 0) throw error(errc::invalid_argument, "K must be nonnegative");
  require_in_domain(F, z0);
  LaurentSeries L;
  L.z0 = z0;
  L.K = K;
  L.method = "analytic";
  auto j0 = critical_offset(F, z0);
  bool in_P = j0 && *j0 < F.depth;
  if (in_P && F.z_derivatives > 0)
    throw error(errc::unsupported, "analytic Laurent data at a pole needs a family of log degree 0");
  if (in_P) {
    cplx ap = F.order.derivative(z0, 1);
    if (std::abs(ap) < 1e-12) throw error(errc::non_critical, "alpha'(z0) = 0 at a point of P");
    L.principal.push_back(-residue_density(slice(F, z0), xe) / ap);
  }
  for (int k = 0; k <= K; ++k) {
    cplx c = finite_part_integral(slice(derivative_family(F, k), z0), xe);
    if (in_P) c -= log_residue(L_k_symbol(F, z0, k), 0, xe);
    L.regular.push_back(c);
  }
  return L;
}

// Distance from z0 to the nearest obstruction: another point of P, a declared
// singular point, or the domain boundary.
inline double pole_gap(const HolomorphicFamily& F, cplx z0, double search_radius = 4.0) {
  double gap = std::numeric_limits<double>::infinity();
  double sr = std::isfinite(F.domain.radius) ? std::min(search_radius, F.domain.radius + std::abs(z0 - F.domain.center))
                                             : search_radius;
  for (auto p : pole_set(F, z0, sr))
    if (std::abs(p - z0) > 1e-9) gap = std::min(gap, std::abs(p - z0));
  for (auto s : F.singular_points) gap = std::min(gap, std::abs(s - z0));
  return gap;
}

inline double default_ring_radius(const HolomorphicFamily& F, cplx z0) {
  double gap = pole_gap(F, z0);
  double r = std::isfinite(gap) ? 0.25 * gap : 0.5;
  if (std::isfinite(F.domain.radius)) r = std::min(r, 0.5 * (F.domain.radius - std::abs(z0 - F.domain.center)));
  return std::min(r, 0.5);
}

// Laurent data of an arbitrary function from a trapezoid contour fit on the
// ring |z - z0| = r. Principal part reported to order J.
inline LaurentSeries contour_laurent(const std::function<cplx(cplx)>& f, cplx z0, int K, double r, int points, int J,
                                     int threads = 1) {
  if (!(r > 0.0)) throw error(errc::config, "ring radius must be positive");
  if (points < 2 * (K + J + 2)) throw error(errc::config, "too few ring points for the requested orders");
  std::vector<cplx> zs(points);
  for (int t = 0; t < points; ++t) zs[t] = ring_point(z0, r, t, points);
  std::vector<cplx> v = parallel_values(f, zs, threads);
  RingSamples S{z0, r, v};
  LaurentSeries L;
  L.z0 = z0;
  L.K = K;
  L.method = "empirical";
  L.ring_radius = r;
  L.points = points;
  for (int j = 1; j <= J; ++j) L.principal.push_back(ring_coefficient(S, -j));
  for (int k = 0; k <= K; ++k) L.regular.push_back(factorial(k) * ring_coefficient(S, k));
  // Residual of the truncated series at interior points off the ring nodes.
  std::vector<cplx> probes;
  for (int t = 0; t < 4; ++t) probes.push_back(z0 + std::polar(0.5 * r, two_pi * (t + 0.5) / 4));
  std::vector<cplx> pv = parallel_values(f, probes, threads);
  double res = 0.0;
  for (std::size_t t = 0; t < probes.size(); ++t) res = std::max(res, std::abs(L.eval(probes[t]) - pv[t]));
  L.fit_residual = res;
  return L;
}

inline LaurentSeries empirical_laurent(const HolomorphicFamily& F, cplx z0, int K, double ring_radius = 0.0,
                                       int points = default_ring_points, const XEval& xe = {}, int threads = 1,
                                       int J = 0) {
  require_in_domain(F, z0);
  double r = ring_radius > 0.0 ? ring_radius : default_ring_radius(F, z0);
  if (std::isfinite(F.domain.radius) && std::abs(z0 - F.domain.center) + r > F.domain.radius)
    throw error(errc::config, "contour ring leaves the family domain");
  for (auto p : pole_set(F, z0, 2.0 * r))
    if (std::abs(p - z0) > 1e-9 && std::abs(p - z0) <= r * (1.0 + 1e-6))
      throw error(errc::config, "contour ring touches or encloses another point of P");
  for (auto s : F.singular_points)
    if (std::abs(s - z0) <= r * (1.0 + 1e-6)) throw error(errc::config, "contour ring encloses a singular point");
  if (J <= 0) J = std::max(3, F.z_derivatives + 2);
  return contour_laurent([&](cplx z) { return family_finite_part(F, z, xe); }, z0, K, r, points, J, threads);
}

struct DensityInvariance {
  cplx tr_x = 0.0, tr_y = 0.0;    // fp int sigma(z0) before and after the pullback
  cplx res_x = 0.0, res_y = 0.0;  // -(1/alpha') res_{x,0}(sigma'(z0)) terms
  cplx combined_x = 0.0, combined_y = 0.0;
  cplx tr_shift = 0.0, res_shift = 0.0;  // x minus y
};

// Constant-term density in the coordinates xi and C xi (Jacobian |det C|).
inline DensityInvariance density_invariance_check(const HolomorphicFamily& F, cplx z0, const LinearMap& C,
                                                  const XEval& xe = {}) {
  require_in_domain(F, z0);
  if (C.n != F.n) throw error(errc::dimension_mismatch, "matrix size differs from n");
  C.require_invertible();
  cplx ap = F.order.derivative(z0, 1);
  if (std::abs(ap) < 1e-12) throw error(errc::non_critical, "alpha'(z0) = 0");
  double J = std::abs(C.det());
  SymbolExpansion s0 = slice(F, z0);
  SymbolExpansion s1 = slice(derivative_family(F, 1), z0);
  DensityInvariance d;
  d.tr_x = finite_part_integral(s0, xe);
  d.res_x = -residue_density(s1, xe) / ap;
  d.tr_y = J * finite_part_integral(pullback(s0, C), xe);
  d.res_y = -J * residue_density(pullback(s1, C), xe) / ap;
  d.combined_x = d.tr_x + d.res_x;
  d.combined_y = d.tr_y + d.res_y;
  d.tr_shift = d.tr_x - d.tr_y;
  d.res_shift = d.res_x - d.res_y;
  return d;
}

enum class ModelGeometry { point, circle };

inline ModelGeometry parse_geometry(const std::string& g) {
  if (g == "point") return ModelGeometry::point;
  if (g == "circle" || g == "S1") return ModelGeometry::circle;
  throw error(errc::unsupported, "unsupported model geometry '" + g + "'");
}

inline XEval geometry_eval(ModelGeometry g, double x = 0.0) {
  return g == ModelGeometry::circle ? XEval::circle() : XEval::at(x);
}

// Laurent series of TR(A(z)) over the model geometry.
inline LaurentSeries model_trace(const HolomorphicFamily& F, cplx z0, int K, ModelGeometry g, double x = 0.0) {
  return laurent_expansion(F, z0, K, geometry_eval(g, x));
}

}  // namespace holotrace
