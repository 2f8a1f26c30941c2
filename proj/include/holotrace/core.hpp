#pragma once

// Shared scalar types, error reporting, linear maps and x-evaluation modes.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace holotrace {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr const char* engine_version = "1.0.0";

// Points of R^n, n <= 3; unused trailing entries are zero.
using Vec = std::array<double, 3>;

inline double norm(const Vec& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

inline Vec scaled(const Vec& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

enum class errc {
  dimension_unsupported,
  dimension_mismatch,
  threshold,
  accuracy,
  non_critical,
  unsupported,
  domain,
  singular,
  config,
  pole,
  parity_undefined,
  admissibility,
  invalid_argument,
};

inline const char* to_string(errc c) {
  switch (c) {
    case errc::dimension_unsupported: return "dimension-unsupported";
    case errc::dimension_mismatch: return "dimension-mismatch";
    case errc::threshold: return "threshold";
    case errc::accuracy: return "accuracy";
    case errc::non_critical: return "non-critical-violation";
    case errc::unsupported: return "unsupported";
    case errc::domain: return "domain";
    case errc::singular: return "singular-matrix";
    case errc::config: return "configuration";
    case errc::pole: return "pole";
    case errc::parity_undefined: return "parity-undefined";
    case errc::admissibility: return "admissibility";
    case errc::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Pole error carrying the residue of the continued function at the pole.
class pole_error : public error {
 public:
  pole_error(const std::string& what, cplx location, cplx residue)
      : error(errc::pole, what), location_(location), residue_(residue) {}
  cplx location() const noexcept { return location_; }
  cplx residue() const noexcept { return residue_; }

 private:
  cplx location_;
  cplx residue_;
};

inline void require_dimension(int n) {
  if (n < 1 || n > 3) throw error(errc::dimension_unsupported, "dimension " + std::to_string(n));
}

// How an x-dependent quantity sum_m e^{imx} f_m is reduced to a number:
// evaluation at a point x, or integration over the circle [0, 2pi).
struct XEval {
  enum class Kind { point, circle };
  Kind kind = Kind::point;
  double x = 0.0;

  static XEval at(double x) { return {Kind::point, x}; }
  static XEval circle() { return {Kind::circle, 0.0}; }

  cplx weight(int mode) const {
    if (kind == Kind::circle) return mode == 0 ? cplx(two_pi) : cplx(0.0);
    return std::polar(1.0, mode * x);
  }
};

// Real n x n matrix acting on the leading n coordinates of Vec (row-major).
struct LinearMap {
  int n = 1;
  std::array<double, 9> a{};

  static LinearMap identity(int n) {
    LinearMap m{n, {}};
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static LinearMap scalar(int n, double s) {
    LinearMap m = identity(n);
    for (int i = 0; i < n; ++i) m(i, i) = s;
    return m;
  }
  static LinearMap from_rows(int n, const std::array<double, 9>& entries) {
    LinearMap m{n, {}};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = entries[i * n + j];
    return m;
  }

  double& operator()(int i, int j) { return a[i * 3 + j]; }
  double operator()(int i, int j) const { return a[i * 3 + j]; }

  Vec apply(const Vec& v) const {
    Vec r{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  double det() const {
    const auto& m = *this;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }

  double max_abs() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s = std::max(s, std::abs((*this)(i, j)));
    return s;
  }

  // Throws singular when |det| is negligible relative to the entry scale.
  void require_invertible() const {
    double scale = std::pow(std::max(max_abs(), 1e-300), n);
    if (!(std::abs(det()) > 1e-13 * scale)) throw error(errc::singular, "matrix is not invertible");
  }

  LinearMap inverse() const {
    require_invertible();
    const auto& m = *this;
    LinearMap r{n, {}};
    double d = det();
    if (n == 1) {
      r(0, 0) = 1.0 / d;
    } else if (n == 2) {
      r(0, 0) = m(1, 1) / d;
      r(0, 1) = -m(0, 1) / d;
      r(1, 0) = -m(1, 0) / d;
      r(1, 1) = m(0, 0) / d;
    } else {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
          r(i, j) = (m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1)) / d;
        }
    }
    return r;
  }
};

}  // namespace holotrace
