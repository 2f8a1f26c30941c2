#pragma once

// Truncated power series in h = z - z0 with complex coefficients, and
// discrete Cauchy-ring coefficient extraction.

#include <cmath>
#include <functional>
#include <vector>

#include "holotrace/core.hpp"

namespace holotrace {

// Taylor coefficients a_0 .. a_K of a function of h (a_m = f^{(m)}/m!).
class Jet {
 public:
  Jet() = default;
  explicit Jet(int K, cplx c0 = 0.0) : a_(K + 1, 0.0) { a_[0] = c0; }
  static Jet variable(int K, cplx z0) {
    Jet j(K, z0);
    if (K >= 1) j.a_[1] = 1.0;
    return j;
  }
  static Jet from(std::vector<cplx> coeffs) {
    Jet j;
    j.a_ = std::move(coeffs);
    return j;
  }

  int order() const { return static_cast<int>(a_.size()) - 1; }
  cplx operator[](int m) const { return m < static_cast<int>(a_.size()) ? a_[m] : cplx(0.0); }
  cplx& operator[](int m) { return a_[m]; }
  const std::vector<cplx>& coeffs() const { return a_; }

  // m-th derivative at h = 0.
  cplx derivative(int m) const {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return (*this)[m] * f;
  }

  cplx eval(cplx h) const {
    cplx s = 0.0;
    for (int m = order(); m >= 0; --m) s = s * h + a_[m];
    return s;
  }

  friend Jet operator+(const Jet& x, const Jet& y) {
    Jet r(std::max(x.order(), y.order()));
    for (int m = 0; m <= r.order(); ++m) r.a_[m] = x[m] + y[m];
    return r;
  }
  friend Jet operator-(const Jet& x, const Jet& y) {
    Jet r(std::max(x.order(), y.order()));
    for (int m = 0; m <= r.order(); ++m) r.a_[m] = x[m] - y[m];
    return r;
  }
  friend Jet operator*(cplx s, const Jet& x) {
    Jet r = x;
    for (auto& c : r.a_) c *= s;
    return r;
  }
  friend Jet operator*(const Jet& x, const Jet& y) {
    int K = std::min(x.order(), y.order());
    Jet r(K);
    for (int i = 0; i <= K; ++i)
      for (int j = 0; i + j <= K; ++j) r.a_[i + j] += x.a_[i] * y.a_[j];
    return r;
  }
  Jet operator+(cplx s) const {
    Jet r = *this;
    r.a_[0] += s;
    return r;
  }

 private:
  std::vector<cplx> a_;
};

// exp of a jet: b' = a' b.
inline Jet exp(const Jet& a) {
  int K = a.order();
  std::vector<cplx> b(K + 1, 0.0);
  b[0] = std::exp(a[0]);
  for (int m = 1; m <= K; ++m) {
    cplx s = 0.0;
    for (int i = 1; i <= m; ++i) s += static_cast<double>(i) * a[i] * b[m - i];
    b[m] = s / static_cast<double>(m);
  }
  return Jet::from(std::move(b));
}

// Reciprocal of a power series with nonzero constant term.
inline std::vector<cplx> series_reciprocal(const std::vector<cplx>& a, int K) {
  if (a.empty() || a[0] == 0.0) throw error(errc::invalid_argument, "series with zero constant term");
  std::vector<cplx> d(K + 1, 0.0);
  d[0] = 1.0 / a[0];
  for (int m = 1; m <= K; ++m) {
    cplx s = 0.0;
    for (int i = 1; i <= m && i < static_cast<int>(a.size()); ++i) s += a[i] * d[m - i];
    d[m] = -s / a[0];
  }
  return d;
}

// Cauchy product truncated at degree K.
inline std::vector<cplx> series_product(const std::vector<cplx>& a, const std::vector<cplx>& b, int K) {
  std::vector<cplx> r(K + 1, 0.0);
  for (int i = 0; i <= K && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= K && j < static_cast<int>(b.size()); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Partial Bell polynomials B_{k,p}(x_1, .., x_{k-p+1}) for 0 <= p <= k <= K,
// returned as B[k][p]; x[m] holds x_m (x[0] unused).
inline std::vector<std::vector<cplx>> partial_bell(const std::vector<cplx>& x, int K) {
  std::vector<std::vector<cplx>> B(K + 1, std::vector<cplx>(K + 1, 0.0));
  B[0][0] = 1.0;
  // B_{k,p} = sum_{i=1}^{k-p+1} binom(k-1, i-1) x_i B_{k-i,p-1}
  std::vector<std::vector<double>> binom(K + 1, std::vector<double>(K + 1, 0.0));
  for (int a = 0; a <= K; ++a) {
    binom[a][0] = 1.0;
    for (int b = 1; b <= a; ++b) binom[a][b] = binom[a - 1][b - 1] + (b <= a - 1 ? binom[a - 1][b] : 0.0);
  }
  for (int k = 1; k <= K; ++k)
    for (int p = 1; p <= k; ++p) {
      cplx s = 0.0;
      for (int i = 1; i <= k - p + 1; ++i)
        s += binom[k - 1][i - 1] * (i < static_cast<int>(x.size()) ? x[i] : cplx(0.0)) * B[k - i][p - 1];
      B[k][p] = s;
    }
  return B;
}

inline double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

inline double binomial(int a, int b) {
  if (b < 0 || b > a) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Laurent coefficients a_m, m = lo..hi, of f around z0 from `points`
// trapezoid samples on the circle |z - z0| = r.
struct RingSamples {
  cplx z0;
  double radius = 0.0;
  std::vector<cplx> values;  // f(z0 + r e^{2 pi i j / N})
};

inline cplx ring_point(cplx z0, double r, int j, int N) { return z0 + std::polar(r, two_pi * j / N); }

inline cplx ring_coefficient(const RingSamples& s, int m) {
  int N = static_cast<int>(s.values.size());
  cplx acc = 0.0;
  for (int j = 0; j < N; ++j) acc += s.values[j] * std::polar(std::pow(s.radius, -m), -two_pi * m * j / N);
  return acc / static_cast<double>(N);
}

inline RingSamples sample_ring(const std::function<cplx(cplx)>& f, cplx z0, double r, int N) {
  RingSamples s{z0, r, std::vector<cplx>(N)};
  for (int j = 0; j < N; ++j) s.values[j] = f(ring_point(z0, r, j, N));
  return s;
}

// m-th derivative of a holomorphic f at z0 by an N-point Cauchy ring.
inline cplx cauchy_derivative(const std::function<cplx(cplx)>& f, cplx z0, int m, double r, int N = 32) {
  return ring_coefficient(sample_ring(f, z0, r, N), m) * factorial(m);
}

}  // namespace holotrace
