#pragma once

// Functions on the unit sphere S^{n-1} and quadrature rules for them.
// Every sphere integral carries the factor (2 pi)^{-n}.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "holotrace/core.hpp"
#include "holotrace/quadrature.hpp"

namespace holotrace {

struct QuadratureRule {
  int dimension = 1;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::string exactness;
};

inline double sphere_area(int n) {
  require_dimension(n);
  return n == 1 ? 2.0 : (n == 2 ? two_pi : 4.0 * pi);
}

// n = 1: the two points of S^0.  n = 2: `resolution` equispaced nodes.
// n = 3: `resolution` Gauss-Legendre nodes in cos(theta) times
// 2 * resolution trapezoid nodes in phi.
inline QuadratureRule sphere_quadrature(int n, int resolution) {
  require_dimension(n);
  if (resolution < 1) throw error(errc::invalid_argument, "resolution must be positive");
  QuadratureRule r;
  r.dimension = n;
  if (n == 1) {
    r.nodes = {Vec{1.0, 0.0, 0.0}, Vec{-1.0, 0.0, 0.0}};
    r.weights = {1.0, 1.0};
    r.exactness = "all functions on S^0";
  } else if (n == 2) {
    int m = resolution;
    for (int i = 0; i < m; ++i) {
      double t = two_pi * i / m;
      r.nodes.push_back(Vec{std::cos(t), std::sin(t), 0.0});
      r.weights.push_back(two_pi / m);
    }
    r.exactness = "trigonometric polynomials of degree < " + std::to_string(m);
  } else {
    int m = resolution;
    int p = 2 * resolution;
    const GaussRule& g = gauss_legendre(m);
    for (int i = 0; i < m; ++i) {
      double ct = g.x[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int k = 0; k < p; ++k) {
        double ph = two_pi * k / p;
        r.nodes.push_back(Vec{st * std::cos(ph), st * std::sin(ph), ct});
        r.weights.push_back(g.w[i] * two_pi / p);
      }
    }
    r.exactness = "spherical polynomials of degree < " + std::to_string(std::min(2 * m, p));
  }
  return r;
}

// Angular factor of a homogeneous term.  Kinds close under the algebra where
// possible: pair (n = 1), Fourier (n = 2, coefficients of e^{ik theta}),
// constant (any n); anything else is a general callable.
class AngularProfile {
 public:
  enum class Kind { constant, pair, fourier, general };
  using Fn = std::function<cplx(const Vec&)>;

  AngularProfile() : AngularProfile(constant(1, 0.0)) {}

  static AngularProfile constant(int n, cplx c) {
    require_dimension(n);
    AngularProfile p(n, Kind::constant);
    if (n == 1) {
      p.kind_ = Kind::pair;
      p.plus_ = p.minus_ = c;
    } else if (n == 2) {
      p.kind_ = Kind::fourier;
      if (c != 0.0) p.modes_[0] = c;
    } else {
      p.c_ = c;
    }
    return p;
  }

  static AngularProfile pair(cplx plus, cplx minus) {
    AngularProfile p(1, Kind::pair);
    p.plus_ = plus;
    p.minus_ = minus;
    return p;
  }

  // sum_k c_k e^{ik theta}, theta the polar angle in the plane.
  static AngularProfile fourier(std::map<int, cplx> modes) {
    AngularProfile p(2, Kind::fourier);
    for (auto& [k, c] : modes)
      if (c != 0.0) p.modes_[k] = c;
    return p;
  }

  // sum_k cos_k cos(k theta) + sin_k sin(k theta), k = 0, 1, ...
  static AngularProfile trig(const std::vector<double>& cos_coeffs,
                             const std::vector<double>& sin_coeffs) {
    std::map<int, cplx> m;
    for (std::size_t k = 0; k < cos_coeffs.size(); ++k) {
      int kk = static_cast<int>(k);
      if (kk == 0) {
        m[0] += cos_coeffs[0];
      } else {
        m[kk] += 0.5 * cos_coeffs[k];
        m[-kk] += 0.5 * cos_coeffs[k];
      }
    }
    for (std::size_t k = 1; k < sin_coeffs.size(); ++k) {
      int kk = static_cast<int>(k);
      m[kk] += cplx(0.0, -0.5 * sin_coeffs[k]);
      m[-kk] += cplx(0.0, 0.5 * sin_coeffs[k]);
    }
    return fourier(std::move(m));
  }

  static AngularProfile general(int n, Fn f, std::string tag = "general-smooth") {
    require_dimension(n);
    if (n == 1) return pair(f(Vec{1.0, 0.0, 0.0}), f(Vec{-1.0, 0.0, 0.0}));
    AngularProfile p(n, Kind::general);
    p.fn_ = std::make_shared<const Fn>(std::move(f));
    p.tag_ = std::move(tag);
    return p;
  }

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  const std::map<int, cplx>& fourier_modes() const { return modes_; }
  cplx plus() const { return plus_; }
  cplx minus() const { return minus_; }

  std::string smoothness_class() const {
    switch (kind_) {
      case Kind::constant: return "constant";
      case Kind::pair: return "pair";
      case Kind::fourier: {
        int d = 0;
        for (auto& [k, c] : modes_) d = std::max(d, std::abs(k));
        return d == 0 ? "constant" : "trig-polynomial of degree " + std::to_string(d);
      }
      case Kind::general: return tag_;
    }
    return "";
  }

  cplx operator()(const Vec& w) const {
    switch (kind_) {
      case Kind::constant: return c_;
      case Kind::pair: return w[0] >= 0.0 ? plus_ : minus_;
      case Kind::fourier: {
        if (modes_.empty()) return 0.0;
        double t = std::atan2(w[1], w[0]);
        cplx s = 0.0;
        for (auto& [k, c] : modes_) s += c * std::polar(1.0, k * t);
        return s;
      }
      case Kind::general: return (*fn_)(w);
    }
    return 0.0;
  }

  // Exact zero test for the closed kinds; general profiles are never known zero.
  bool is_zero() const {
    switch (kind_) {
      case Kind::constant: return c_ == 0.0;
      case Kind::pair: return plus_ == 0.0 && minus_ == 0.0;
      case Kind::fourier: return modes_.empty();
      case Kind::general: return false;
    }
    return false;
  }

  AngularProfile reflected() const {
    switch (kind_) {
      case Kind::constant: return *this;
      case Kind::pair: return pair(minus_, plus_);
      case Kind::fourier: {
        std::map<int, cplx> m;
        for (auto& [k, c] : modes_) m[k] = (k % 2 == 0) ? c : -c;
        return fourier(std::move(m));
      }
      case Kind::general: {
        auto f = fn_;
        return general(n_, [f](const Vec& w) { return (*f)(Vec{-w[0], -w[1], -w[2]}); }, tag_);
      }
    }
    return *this;
  }

  friend AngularProfile operator*(cplx s, const AngularProfile& p) {
    if (s == 0.0) return constant(p.n_, 0.0);
    switch (p.kind_) {
      case Kind::constant: return constant(p.n_, s * p.c_);
      case Kind::pair: return pair(s * p.plus_, s * p.minus_);
      case Kind::fourier: {
        std::map<int, cplx> m;
        for (auto& [k, c] : p.modes_) m[k] = s * c;
        return fourier(std::move(m));
      }
      case Kind::general: {
        auto f = p.fn_;
        return general(p.n_, [f, s](const Vec& w) { return s * (*f)(w); }, p.tag_);
      }
    }
    return p;
  }

  friend AngularProfile operator+(const AngularProfile& a, const AngularProfile& b) {
    check_same(a, b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.kind_ == Kind::pair) return pair(a.plus_ + b.plus_, a.minus_ + b.minus_);
    if (a.kind_ == Kind::constant && b.kind_ == Kind::constant) return constant(a.n_, a.c_ + b.c_);
    if (a.kind_ == Kind::fourier && b.kind_ == Kind::fourier) {
      std::map<int, cplx> m = a.modes_;
      for (auto& [k, c] : b.modes_) m[k] += c;
      return fourier(std::move(m));
    }
    return general(a.n_, [a, b](const Vec& w) { return a(w) + b(w); }, "general-smooth");
  }

  friend AngularProfile operator-(const AngularProfile& a, const AngularProfile& b) {
    return a + cplx(-1.0) * b;
  }

  friend AngularProfile operator*(const AngularProfile& a, const AngularProfile& b) {
    check_same(a, b);
    if (a.is_zero() || b.is_zero()) return constant(a.n_, 0.0);
    if (a.kind_ == Kind::pair) return pair(a.plus_ * b.plus_, a.minus_ * b.minus_);
    if (a.kind_ == Kind::constant) return a.c_ * b;
    if (b.kind_ == Kind::constant) return b.c_ * a;
    if (a.kind_ == Kind::fourier && b.kind_ == Kind::fourier) {
      std::map<int, cplx> m;
      for (auto& [k, c] : a.modes_)
        for (auto& [l, d] : b.modes_) m[k + l] += c * d;
      return fourier(std::move(m));
    }
    return general(a.n_, [a, b](const Vec& w) { return a(w) * b(w); }, "general-smooth");
  }

  // Pointwise image under a scalar function, always general (pairs stay pairs).
  AngularProfile mapped(const std::function<cplx(const Vec&, cplx)>& g) const {
    AngularProfile self = *this;
    return general(n_, [self, g](const Vec& w) { return g(w, self(w)); }, "general-smooth");
  }

 private:
  AngularProfile(int n, Kind k) : n_(n), kind_(k) {}

  static void check_same(const AngularProfile& a, const AngularProfile& b) {
    if (a.n_ != b.n_) throw error(errc::dimension_mismatch, "profiles of different dimension");
  }

  int n_ = 1;
  Kind kind_ = Kind::pair;
  cplx c_{0.0};
  cplx plus_{0.0}, minus_{0.0};
  std::map<int, cplx> modes_;
  std::shared_ptr<const Fn> fn_;
  std::string tag_;
};

inline cplx integrate_sphere(const AngularProfile& p, const QuadratureRule& rule) {
  if (p.dimension() != rule.dimension)
    throw error(errc::dimension_mismatch, "profile and rule dimensions differ");
  cplx s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * p(rule.nodes[i]);
  return s / std::pow(two_pi, rule.dimension);
}

inline const QuadratureRule& cached_sphere_rule(int n, int resolution) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, resolution);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<QuadratureRule>(sphere_quadrature(n, resolution))).first;
  return *it->second;
}

// Default resolution per dimension, used for node sampling.
inline int default_resolution(int n) { return n == 2 ? 64 : (n == 3 ? 16 : 1); }

// Sphere integral at the accuracy of the engine: closed forms for the closed
// kinds, resolution doubling for general profiles until the change is
// below `tol` relative.
inline cplx sphere_integral(const AngularProfile& p, double tol = 1e-14) {
  int n = p.dimension();
  switch (p.kind()) {
    case AngularProfile::Kind::pair: return (p.plus() + p.minus()) / two_pi;
    case AngularProfile::Kind::fourier: {
      auto it = p.fourier_modes().find(0);
      return it == p.fourier_modes().end() ? cplx(0.0) : it->second / two_pi;
    }
    case AngularProfile::Kind::constant: return p(Vec{0.0, 0.0, 1.0}) * sphere_area(n) / std::pow(two_pi, n);
    case AngularProfile::Kind::general: break;
  }
  int res = default_resolution(n);
  int max_res = n == 2 ? 16384 : 256;
  cplx prev = integrate_sphere(p, cached_sphere_rule(n, res));
  while (res < max_res) {
    res *= 2;
    cplx cur = integrate_sphere(p, cached_sphere_rule(n, res));
    if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace holotrace
