#pragma once

// Gauss-Legendre rules (cached, thread-safe) and panel integration helpers.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "holotrace/core.hpp"

namespace holotrace {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

namespace detail {

inline GaussRule build_gauss_legendre(int m) {
  GaussRule g;
  g.x.assign(m, 0.0);
  g.w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (m + 0.5));
    double pp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= m; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = m * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    g.x[i] = -z;
    g.x[m - 1 - i] = z;
    g.w[i] = g.w[m - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return g;
}

}  // namespace detail

// Rules are built once per order and never mutated afterwards.
inline const GaussRule& gauss_legendre(int m) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(m);
  if (it == cache.end()) {
    it = cache.emplace(m, std::make_unique<GaussRule>(detail::build_gauss_legendre(m))).first;
  }
  return *it->second;
}

template <class F>
cplx integrate_gl(F&& f, double a, double b, int m = 24) {
  const GaussRule& g = gauss_legendre(m);
  double h = 0.5 * (b - a), c = 0.5 * (b + a);
  cplx s = 0.0;
  for (int i = 0; i < m; ++i) s += g.w[i] * cplx(f(c + h * g.x[i]));
  return s * h;
}

// Sorted unique breakpoints restricted to [lo, hi], endpoints included.
inline std::vector<double> clean_breaks(std::vector<double> b, double lo, double hi) {
  b.push_back(lo);
  b.push_back(hi);
  std::vector<double> out;
  std::sort(b.begin(), b.end());
  for (double v : b) {
    if (!(v >= lo && v <= hi)) continue;
    if (out.empty() || v - out.back() > 1e-14 * std::max(1.0, std::abs(v))) out.push_back(v);
  }
  if (out.size() < 2) out = {lo, hi};
  return out;
}

// Integrates over [breaks.front(), breaks.back()], each panel split into
// `sub` equal pieces.
template <class F>
cplx integrate_panels(F&& f, const std::vector<double>& breaks, int sub = 1, int m = 24) {
  cplx s = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    double h = (b - a) / sub;
    for (int k = 0; k < sub; ++k) s += integrate_gl(f, a + k * h, a + (k + 1) * h, m);
  }
  return s;
}

}  // namespace holotrace
