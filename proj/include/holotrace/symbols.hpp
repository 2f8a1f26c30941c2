#pragma once

// Log-polyhomogeneous symbol expansions: construction, evaluation, graded
// arithmetic, composition on the circle model, pullback by linear maps and
// parity classification.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "holotrace/angular.hpp"
#include "holotrace/core.hpp"
#include "holotrace/quadrature.hpp"
#include "holotrace/series.hpp"

namespace holotrace {

inline constexpr double default_cutoff_inner = 0.25;

// Quintic smoothstep S(t) = t^3 (10 - 15 t + 6 t^2) and its derivatives.
inline double smoothstep(double t, int order) {
  switch (order) {
    case 0: return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    case 1: return 30.0 * t * t * (1.0 - t) * (1.0 - t);
    case 2: return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    case 3: return 60.0 * (1.0 - 6.0 * t + 6.0 * t * t);
    case 4: return 720.0 * t - 360.0;
    case 5: return 720.0;
    default: return 0.0;
  }
}

// psi_a^{(order)}(r) with psi_a(r) = S((r - a)/(1 - a)) on [a, 1].
inline double cutoff_value(double r, double inner, int order) {
  if (r <= inner) return 0.0;
  if (r >= 1.0) return order == 0 ? 1.0 : 0.0;
  double w = 1.0 - inner;
  return smoothstep((r - inner) / w, order) / std::pow(w, order);
}

struct CutoffFactor {
  double inner = default_cutoff_inner;
  int order = 0;
  auto operator<=>(const CutoffFactor&) const = default;
};

// Product of radial cutoff factors psi_a^{(i)}(|xi|).  No factors means the
// term is extended through the origin unchanged (polynomial terms only).
class Cutoff {
 public:
  Cutoff() = default;
  static Cutoff none() { return Cutoff(); }
  static Cutoff psi(double inner = default_cutoff_inner) {
    Cutoff c;
    c.f_.push_back({inner, 0});
    return c;
  }

  const std::vector<CutoffFactor>& factors() const { return f_; }
  bool is_none() const { return f_.empty(); }
  // Any derivative factor confines the support to an annulus inside the unit ball.
  bool is_compact() const {
    return std::any_of(f_.begin(), f_.end(), [](const CutoffFactor& c) { return c.order > 0; });
  }
  // Vanishes for |xi| <= lower_support().
  double lower_support() const {
    double s = 0.0;
    for (auto& c : f_) s = std::max(s, c.inner);
    return s;
  }

  double value(double r) const {
    double v = 1.0;
    for (auto& c : f_) v *= cutoff_value(r, c.inner, c.order);
    return v;
  }

  Cutoff times(const Cutoff& o) const {
    Cutoff c;
    c.f_ = f_;
    c.f_.insert(c.f_.end(), o.f_.begin(), o.f_.end());
    std::sort(c.f_.begin(), c.f_.end());
    return c;
  }

  // d/dr of the product, one cutoff per differentiated factor.
  std::vector<Cutoff> derivative() const {
    std::vector<Cutoff> out;
    for (std::size_t i = 0; i < f_.size(); ++i) {
      if (f_[i].order >= 5) continue;
      Cutoff c = *this;
      c.f_[i].order += 1;
      std::sort(c.f_.begin(), c.f_.end());
      out.push_back(c);
    }
    return out;
  }

  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (auto& c : f_) b.push_back(c.inner);
    if (!f_.empty()) b.push_back(1.0);
    return b;
  }

  bool operator==(const Cutoff&) const = default;

  // Cutoff with every factor's inner radius replaced by `inner`.
  Cutoff with_inner(double inner) const {
    Cutoff c = *this;
    for (auto& f : c.f_) f.inner = inner;
    std::sort(c.f_.begin(), c.f_.end());
    return c;
  }

 private:
  std::vector<CutoffFactor> f_;
};

// x-coefficient times angular profile, stored per Fourier mode in x:
// sum_m e^{imx} p_m(omega).
class ModeProfile {
 public:
  explicit ModeProfile(int n = 1) : n_(n) {}

  static ModeProfile single(const AngularProfile& p, int mode = 0) {
    ModeProfile m(p.dimension());
    if (!p.is_zero()) m.modes_.emplace(mode, p);
    return m;
  }
  // Profile p times the trigonometric polynomial sum_m c_m e^{imx}.
  static ModeProfile with_xcoeff(const AngularProfile& p, const std::map<int, cplx>& xc) {
    ModeProfile m(p.dimension());
    for (auto& [k, c] : xc)
      if (c != 0.0) m.add_mode(k, c * p);
    return m;
  }

  int dimension() const { return n_; }
  const std::map<int, AngularProfile>& modes() const { return modes_; }
  bool is_zero() const {
    return std::all_of(modes_.begin(), modes_.end(), [](auto& kv) { return kv.second.is_zero(); });
  }
  bool x_independent() const {
    return std::all_of(modes_.begin(), modes_.end(), [](auto& kv) { return kv.first == 0 || kv.second.is_zero(); });
  }

  void add_mode(int k, const AngularProfile& p) {
    if (p.dimension() != n_) throw error(errc::dimension_mismatch, "mode profile dimension");
    if (p.is_zero()) return;
    auto it = modes_.find(k);
    if (it == modes_.end()) {
      modes_.emplace(k, p);
    } else {
      it->second = it->second + p;
      if (it->second.is_zero()) modes_.erase(it);
    }
  }

  AngularProfile mode(int k) const {
    auto it = modes_.find(k);
    return it == modes_.end() ? AngularProfile::constant(n_, 0.0) : it->second;
  }

  cplx mode_value(int k, const Vec& w) const {
    auto it = modes_.find(k);
    return it == modes_.end() ? cplx(0.0) : it->second(w);
  }

  cplx value(double x, const Vec& w) const {
    cplx s = 0.0;
    for (auto& [k, p] : modes_) s += std::polar(1.0, k * x) * p(w);
    return s;
  }

  // sum_m weight(m) * int_S p_m dbar_S.
  cplx sphere(const XEval& xe) const {
    cplx s = 0.0;
    for (auto& [k, p] : modes_) {
      cplx wgt = xe.weight(k);
      if (wgt != 0.0) s += wgt * sphere_integral(p);
    }
    return s;
  }

  friend ModeProfile operator+(const ModeProfile& a, const ModeProfile& b) {
    if (a.n_ != b.n_) throw error(errc::dimension_mismatch, "mode profile dimension");
    ModeProfile r = a;
    for (auto& [k, p] : b.modes_) r.add_mode(k, p);
    return r;
  }
  friend ModeProfile operator*(cplx s, const ModeProfile& a) {
    ModeProfile r(a.n_);
    if (s == 0.0) return r;
    for (auto& [k, p] : a.modes_) r.modes_.emplace(k, s * p);
    return r;
  }
  friend ModeProfile operator*(const ModeProfile& a, const ModeProfile& b) {
    if (a.n_ != b.n_) throw error(errc::dimension_mismatch, "mode profile dimension");
    ModeProfile r(a.n_);
    for (auto& [k, p] : a.modes_)
      for (auto& [l, q] : b.modes_) r.add_mode(k + l, p * q);
    return r;
  }
  ModeProfile times(const AngularProfile& q) const {
    ModeProfile r(n_);
    for (auto& [k, p] : modes_) r.add_mode(k, p * q);
    return r;
  }
  // (-i d/dx)^m: mode k picks up k^m.
  ModeProfile x_derivative_power(int m) const {
    ModeProfile r(n_);
    for (auto& [k, p] : modes_) {
      double f = std::pow(static_cast<double>(k), m);
      if (m == 0) f = 1.0;
      if (f != 0.0) r.add_mode(k, f * p);
    }
    return r;
  }
  ModeProfile map_profiles(const std::function<AngularProfile(const AngularProfile&)>& g) const {
    ModeProfile r(n_);
    for (auto& [k, p] : modes_) r.add_mode(k, g(p));
    return r;
  }

 private:
  int n_;
  std::map<int, AngularProfile> modes_;
};

inline cplx complex_power(double r, cplx d) {
  if (d == 0.0) return 1.0;
  return std::exp(d * std::log(r));
}

inline cplx radial_factor(double r, cplx degree, int log_power, const Cutoff& cut) {
  if (r <= 0.0) {
    if (!cut.is_none()) return 0.0;
    if (log_power == 0 && degree == 0.0) return 1.0;
    return 0.0;
  }
  double c = cut.value(r);
  if (c == 0.0) return 0.0;
  cplx v = c * complex_power(r, degree);
  if (log_power > 0) v *= std::pow(std::log(r), log_power);
  return v;
}

inline Vec unit_direction(const Vec& xi, double r) {
  if (r <= 0.0) return Vec{1.0, 0.0, 0.0};
  return scaled(xi, 1.0 / r);
}

// cutoff(|xi|) * coef(x, xi/|xi|) * |xi|^degree * log^l |xi|.
struct LogHomogeneousTerm {
  cplx degree = 0.0;
  int log_power = 0;
  Cutoff cutoff = Cutoff::psi();
  ModeProfile coef;

  bool compact() const { return cutoff.is_compact(); }

  cplx mode_value(int m, const Vec& xi) const {
    double r = norm(xi);
    cplx rad = radial_factor(r, degree, log_power, cutoff);
    if (rad == 0.0) return 0.0;
    return rad * coef.mode_value(m, unit_direction(xi, r));
  }
  cplx value(double x, const Vec& xi) const {
    double r = norm(xi);
    cplx rad = radial_factor(r, degree, log_power, cutoff);
    if (rad == 0.0) return 0.0;
    return rad * coef.value(x, unit_direction(xi, r));
  }
};

inline bool same_degree(cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

// Integer offset j when `degree` = order - j.
inline std::optional<int> degree_offset(cplx order, cplx degree) {
  cplx d = order - degree;
  double j = std::round(d.real());
  if (std::abs(d.real() - j) < 1e-10 && std::abs(d.imag()) < 1e-10) return static_cast<int>(j);
  return std::nullopt;
}

// One x-Fourier mode of the part of a symbol not carried by homogeneous
// terms, with the metadata that numerical integration needs.
struct RemainderPiece {
  int x_mode = 0;
  std::function<cplx(const Vec&)> value;
  double decay = -std::numeric_limits<double>::infinity();  // |value| <~ (1 + |xi|)^decay
  double support = std::numeric_limits<double>::infinity();  // value = 0 for |xi| > support
  // Radii along the ray through omega where value is not smooth.
  std::function<std::vector<double>(const Vec&)> ray_breaks;
  std::string origin;

  bool compact() const { return std::isfinite(support); }
};

class SymbolExpansion {
 public:
  explicit SymbolExpansion(int n = 1, cplx order = 0.0) : n_(n), order_(order) { require_dimension(n); }

  int dimension() const { return n_; }
  cplx order() const { return order_; }
  void set_order(cplx a) { order_ = a; }
  const std::vector<LogHomogeneousTerm>& terms() const { return terms_; }
  const std::vector<RemainderPiece>& remainder() const { return rem_; }
  std::vector<LogHomogeneousTerm>& mutable_terms() { return terms_; }
  std::vector<RemainderPiece>& mutable_remainder() { return rem_; }

  int log_degree() const {
    int k = 0;
    for (auto& t : terms_) k = std::max(k, t.log_power);
    return k;
  }

  // Adds a term, merging with an existing term of equal degree, log power and cutoff.
  void add_term(LogHomogeneousTerm t) {
    if (t.coef.dimension() != n_) throw error(errc::dimension_mismatch, "term dimension");
    if (t.coef.is_zero()) return;
    for (auto& s : terms_) {
      if (s.log_power == t.log_power && s.cutoff == t.cutoff && same_degree(s.degree, t.degree)) {
        s.coef = s.coef + t.coef;
        return;
      }
    }
    terms_.push_back(std::move(t));
  }
  void add_piece(RemainderPiece p) { rem_.push_back(std::move(p)); }

  std::set<int> modes() const {
    std::set<int> s;
    for (auto& t : terms_)
      for (auto& [k, p] : t.coef.modes()) s.insert(k);
    for (auto& p : rem_) s.insert(p.x_mode);
    return s;
  }
  bool x_independent() const {
    auto m = modes();
    return m.empty() || (m.size() == 1 && *m.begin() == 0);
  }

  cplx evaluate_mode(int m, const Vec& xi) const {
    cplx s = 0.0;
    for (auto& t : terms_) s += t.mode_value(m, xi);
    for (auto& p : rem_)
      if (p.x_mode == m) s += p.value(xi);
    return s;
  }
  cplx evaluate(double x, const Vec& xi) const {
    cplx s = 0.0;
    for (auto& t : terms_) s += t.value(x, xi);
    for (auto& p : rem_) s += std::polar(1.0, p.x_mode * x) * p.value(xi);
    return s;
  }
  cplx evaluate(double x, double xi1) const { return evaluate(x, Vec{xi1, 0.0, 0.0}); }

  // Summed coefficient of the non-compact terms of degree `degree` and log power l.
  ModeProfile component_at(cplx degree, int l) const {
    ModeProfile r(n_);
    for (auto& t : terms_)
      if (!t.compact() && t.log_power == l && same_degree(t.degree, degree)) r = r + t.coef;
    return r;
  }
  ModeProfile component(int j, int l) const { return component_at(order_ - static_cast<double>(j), l); }

  // Largest j among terms carrying the offset structure.
  int max_offset() const {
    int m = -1;
    for (auto& t : terms_)
      if (auto j = degree_offset(order_, t.degree)) m = std::max(m, *j);
    return m;
  }

 private:
  int n_;
  cplx order_;
  std::vector<LogHomogeneousTerm> terms_;
  std::vector<RemainderPiece> rem_;
};

// Single-term expansion psi(|xi|) * xcoef(x) * profile(omega) * |xi|^s.
inline SymbolExpansion make_power_symbol(int n, cplx s, const AngularProfile& profile,
                                         const std::map<int, cplx>& xcoef = {{0, 1.0}},
                                         double inner = default_cutoff_inner) {
  if (profile.dimension() != n) throw error(errc::dimension_mismatch, "profile dimension differs from n");
  SymbolExpansion e(n, s);
  e.add_term({s, 0, Cutoff::psi(inner), ModeProfile::with_xcoeff(profile, xcoef)});
  return e;
}

inline SymbolExpansion make_power_symbol(int n, cplx s, cplx c = 1.0) {
  return make_power_symbol(n, s, AngularProfile::constant(n, c));
}

// Homogeneous polynomial-type term extended through the origin.
inline SymbolExpansion make_polynomial_symbol(int n, int degree, const AngularProfile& profile,
                                              const std::map<int, cplx>& xcoef = {{0, 1.0}}) {
  if (degree < 0) throw error(errc::invalid_argument, "polynomial degree must be nonnegative");
  SymbolExpansion e(n, static_cast<double>(degree));
  e.add_term({static_cast<double>(degree), 0, Cutoff::none(), ModeProfile::with_xcoeff(profile, xcoef)});
  return e;
}

inline SymbolExpansion zero_symbol(int n, cplx order = 0.0) { return SymbolExpansion(n, order); }

inline SymbolExpansion identity_symbol(int n) {
  return make_polynomial_symbol(n, 0, AngularProfile::constant(n, 1.0));
}

inline RemainderPiece scaled_piece(const RemainderPiece& p, cplx c) {
  RemainderPiece q = p;
  auto f = p.value;
  q.value = [f, c](const Vec& xi) { return c * f(xi); };
  return q;
}

// Sum; orders differing by a non-integer give the union with the larger order.
inline SymbolExpansion add(const SymbolExpansion& a, const SymbolExpansion& b) {
  if (a.dimension() != b.dimension()) throw error(errc::dimension_mismatch, "add: dimensions differ");
  auto pick_a = [&] {
    if (a.terms().empty() && a.remainder().empty()) return false;
    if (b.terms().empty() && b.remainder().empty()) return true;
    return a.order().real() >= b.order().real();
  };
  SymbolExpansion r(a.dimension(), pick_a() ? a.order() : b.order());
  for (auto* s : {&a, &b}) {
    for (auto& t : s->terms()) r.add_term(t);
    for (auto& p : s->remainder()) r.add_piece(p);
  }
  return r;
}

inline SymbolExpansion scale(cplx c, const SymbolExpansion& a) {
  SymbolExpansion r(a.dimension(), a.order());
  if (c == 0.0) return r;
  for (auto& t : a.terms()) r.add_term({t.degree, t.log_power, t.cutoff, c * t.coef});
  for (auto& p : a.remainder()) r.add_piece(scaled_piece(p, c));
  return r;
}

inline SymbolExpansion subtract(const SymbolExpansion& a, const SymbolExpansion& b) {
  return add(a, scale(-1.0, b));
}

namespace detail {

inline std::vector<double> merge_breaks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::function<std::vector<double>(const Vec&)> term_breaks(const Cutoff& c) {
  auto b = c.breakpoints();
  return [b](const Vec&) { return b; };
}

inline std::function<std::vector<double>(const Vec&)> join_breaks(
    std::function<std::vector<double>(const Vec&)> f, std::function<std::vector<double>(const Vec&)> g) {
  return [f, g](const Vec& w) {
    std::vector<double> out;
    if (f) out = f(w);
    if (g) out = merge_breaks(out, g(w));
    return out;
  };
}

// Remainder pieces (one per x-mode) carrying a term exactly.
inline std::vector<RemainderPiece> term_as_pieces(const LogHomogeneousTerm& t, const std::string& origin) {
  std::vector<RemainderPiece> out;
  auto tp = std::make_shared<const LogHomogeneousTerm>(t);
  for (auto& [k, p] : t.coef.modes()) {
    RemainderPiece q;
    q.x_mode = k;
    q.value = [tp, k](const Vec& xi) { return tp->mode_value(k, xi); };
    q.decay = t.compact() ? -std::numeric_limits<double>::infinity() : t.degree.real();
    q.support = t.compact() ? 1.0 : std::numeric_limits<double>::infinity();
    q.ray_breaks = term_breaks(t.cutoff);
    q.origin = origin;
    out.push_back(std::move(q));
  }
  return out;
}

inline LogHomogeneousTerm term_product(const LogHomogeneousTerm& a, const LogHomogeneousTerm& b) {
  return {a.degree + b.degree, a.log_power + b.log_power, a.cutoff.times(b.cutoff), a.coef * b.coef};
}

}  // namespace detail

// Graded product truncated at j < depth; the dropped tail and every product
// involving a remainder piece become remainder pieces.
inline SymbolExpansion multiply(const SymbolExpansion& a, const SymbolExpansion& b, int depth) {
  if (a.dimension() != b.dimension()) throw error(errc::dimension_mismatch, "multiply: dimensions differ");
  if (depth < 1) throw error(errc::invalid_argument, "multiply: depth must be at least 1");
  cplx order = a.order() + b.order();
  SymbolExpansion r(a.dimension(), order);
  for (auto& ta : a.terms())
    for (auto& tb : b.terms()) {
      LogHomogeneousTerm t = detail::term_product(ta, tb);
      if (t.coef.is_zero()) continue;
      if ((order - t.degree).real() < depth - 1e-9) {
        r.add_term(std::move(t));
      } else {
        for (auto& p : detail::term_as_pieces(t, "multiply-tail")) r.add_piece(std::move(p));
      }
    }
  auto cross = [&](const LogHomogeneousTerm& t, const RemainderPiece& h) {
    auto tp = std::make_shared<const LogHomogeneousTerm>(t);
    for (auto& [k, p] : t.coef.modes()) {
      RemainderPiece q;
      q.x_mode = k + h.x_mode;
      auto hv = h.value;
      q.value = [tp, k, hv](const Vec& xi) {
        cplx v = hv(xi);
        return v == 0.0 ? v : tp->mode_value(k, xi) * v;
      };
      q.decay = t.compact() ? -std::numeric_limits<double>::infinity() : t.degree.real() + h.decay;
      q.support = t.compact() ? std::min(1.0, h.support) : h.support;
      q.ray_breaks = detail::join_breaks(detail::term_breaks(t.cutoff), h.ray_breaks);
      q.origin = "multiply-cross";
      r.add_piece(std::move(q));
    }
  };
  for (auto& ta : a.terms())
    for (auto& h : b.remainder()) cross(ta, h);
  for (auto& tb : b.terms())
    for (auto& h : a.remainder()) cross(tb, h);
  for (auto& g : a.remainder())
    for (auto& h : b.remainder()) {
      RemainderPiece q;
      q.x_mode = g.x_mode + h.x_mode;
      auto gv = g.value, hv = h.value;
      q.value = [gv, hv](const Vec& xi) { return gv(xi) * hv(xi); };
      q.decay = g.decay + h.decay;
      q.support = std::min(g.support, h.support);
      q.ray_breaks = detail::join_breaks(g.ray_breaks, h.ray_breaks);
      q.origin = "multiply-remainder";
      r.add_piece(std::move(q));
    }
  return r;
}

// d/dxi of a term in n = 1; exact, the cutoff derivative produces compact terms.
inline std::vector<LogHomogeneousTerm> xi_derivative(const LogHomogeneousTerm& t) {
  if (t.coef.dimension() != 1) throw error(errc::unsupported, "xi derivatives are implemented for n = 1");
  // d/dxi = sgn(xi) d/dr on each half line.
  ModeProfile sc = t.coef.map_profiles([](const AngularProfile& p) { return AngularProfile::pair(p.plus(), -p.minus()); });
  std::vector<LogHomogeneousTerm> out;
  for (auto& c : t.cutoff.derivative()) out.push_back({t.degree, t.log_power, c, sc});
  if (t.degree != 0.0) out.push_back({t.degree - 1.0, t.log_power, t.cutoff, t.degree * sc});
  if (t.log_power > 0) out.push_back({t.degree - 1.0, t.log_power - 1, t.cutoff, static_cast<double>(t.log_power) * sc});
  return out;
}

inline std::vector<LogHomogeneousTerm> xi_derivative(const std::vector<LogHomogeneousTerm>& ts) {
  SymbolExpansion acc(1, 0.0);
  for (auto& t : ts)
    for (auto& d : xi_derivative(t)) acc.add_term(std::move(d));
  return acc.terms();
}

// Symbol of A o B on the circle model (n = 1).  Terms follow the Leibniz
// formula to order depth; the remainder carries the exact difference, so the
// total equals the exact composition
//   mode k of a, mode l of b  ->  a_k(xi + l) b_l(xi) e^{i(k+l)x}.
inline SymbolExpansion compose(const SymbolExpansion& a, const SymbolExpansion& b, int depth) {
  if (a.dimension() != 1 || b.dimension() != 1)
    throw error(errc::unsupported, "compose is implemented on the circle model (n = 1)");
  if (depth < 1) throw error(errc::invalid_argument, "compose: depth must be at least 1");
  using Terms = std::vector<LogHomogeneousTerm>;
  auto D = std::make_shared<std::vector<Terms>>(depth + 1);
  (*D)[0] = a.terms();
  for (int m = 1; m <= depth; ++m) (*D)[m] = xi_derivative((*D)[m - 1]);
  std::shared_ptr<const std::vector<Terms>> Dc = D;
  auto bp = std::make_shared<const SymbolExpansion>(b);

  SymbolExpansion r(1, a.order() + b.order());
  for (int m = 0; m < depth; ++m) {
    double inv_fact = 1.0 / factorial(m);
    for (auto& ta : (*Dc)[m])
      for (auto& tb : b.terms()) {
        ModeProfile bc = inv_fact * tb.coef.x_derivative_power(m);
        if (bc.is_zero()) continue;
        r.add_term({ta.degree + tb.degree, ta.log_power + tb.log_power, ta.cutoff.times(tb.cutoff), ta.coef * bc});
      }
  }

  std::set<int> amodes, bmodes = b.modes();
  for (auto& t : a.terms())
    for (auto& [k, p] : t.coef.modes()) amodes.insert(k);

  auto mode_sum = [](const Terms& ts, int k, const Vec& xi) {
    cplx s = 0.0;
    for (auto& t : ts) s += t.mode_value(k, xi);
    return s;
  };

  // Leibniz terms against the remainder of b.
  for (int m = 0; m < depth; ++m) {
    double inv_fact = 1.0 / factorial(m);
    for (auto& h : b.remainder()) {
      double lm = m == 0 ? 1.0 : std::pow(static_cast<double>(h.x_mode), m);
      if (lm == 0.0) continue;
      for (int k : amodes) {
        RemainderPiece q;
        q.x_mode = k + h.x_mode;
        auto hv = h.value;
        double f = lm * inv_fact;
        q.value = [Dc, m, k, hv, f, mode_sum](const Vec& xi) {
          cplx v = hv(xi);
          return v == 0.0 ? v : f * mode_sum((*Dc)[m], k, xi) * v;
        };
        q.decay = a.order().real() - m + h.decay;
        q.support = h.support;
        q.ray_breaks = detail::join_breaks([](const Vec&) { return std::vector<double>{default_cutoff_inner, 1.0}; }, h.ray_breaks);
        q.origin = "compose-leibniz-remainder";
        r.add_piece(std::move(q));
      }
    }
  }

  // Taylor remainder of a_k(xi + l) at order depth, times b_l(xi).
  std::vector<double> acuts{0.0};
  for (auto& t : a.terms())
    for (double c : t.cutoff.breakpoints()) acuts.push_back(c);
  for (int k : amodes)
    for (int l : bmodes) {
      if (l == 0) continue;
      RemainderPiece q;
      q.x_mode = k + l;
      int N = depth;
      double lf = static_cast<double>(l);
      double switch_r = std::abs(lf) + 2.0;
      q.value = [Dc, bp, k, l, N, lf, switch_r, mode_sum](const Vec& xi) {
        cplx bl = bp->evaluate_mode(l, xi);
        if (bl == 0.0) return bl;
        double x = xi[0];
        cplx rem = 0.0;
        if (std::abs(x) <= switch_r) {
          rem = mode_sum((*Dc)[0], k, Vec{x + lf, 0.0, 0.0});
          double lm = 1.0;
          for (int m = 0; m < N; ++m) {
            rem -= lm / factorial(m) * mode_sum((*Dc)[m], k, xi);
            lm *= lf;
          }
        } else {
          // l^N/(N-1)! int_0^1 (1-t)^{N-1} a^{(N)}(xi + t l) dt
          const GaussRule& g = gauss_legendre(32);
          cplx s = 0.0;
          for (std::size_t i = 0; i < g.x.size(); ++i) {
            double t = 0.5 * (g.x[i] + 1.0);
            s += 0.5 * g.w[i] * std::pow(1.0 - t, N - 1) * mode_sum((*Dc)[N], k, Vec{x + t * lf, 0.0, 0.0});
          }
          rem = s * std::pow(lf, N) / factorial(N - 1);
        }
        return rem * bl;
      };
      q.decay = a.order().real() - N + b.order().real();
      q.support = std::numeric_limits<double>::infinity();
      q.ray_breaks = [acuts, lf, switch_r](const Vec& w) {
        std::vector<double> out{switch_r, 1.0, default_cutoff_inner};
        double s = w[0] >= 0.0 ? 1.0 : -1.0;
        for (double c : acuts)
          for (double sg : {1.0, -1.0}) {
            double xi = -lf + sg * c;  // xi + l = +-c
            if (s * xi > 0.0) out.push_back(s * xi);
            if (c > 0.0) out.push_back(c);
          }
        return out;
      };
      q.origin = "compose-taylor-remainder";
      r.add_piece(std::move(q));
    }

  // The remainder of a is shifted exactly.
  std::set<int> ball = bmodes;
  for (auto& g : a.remainder())
    for (int l : ball) {
      RemainderPiece q;
      q.x_mode = g.x_mode + l;
      auto gv = g.value;
      double lf = static_cast<double>(l);
      q.value = [gv, bp, l, lf](const Vec& xi) {
        cplx bl = bp->evaluate_mode(l, xi);
        if (bl == 0.0) return bl;
        return gv(Vec{xi[0] + lf, 0.0, 0.0}) * bl;
      };
      q.decay = g.decay + b.order().real();
      q.support = std::isfinite(g.support) ? g.support + std::abs(lf) : g.support;
      auto gb = g.ray_breaks;
      q.ray_breaks = [gb, lf](const Vec& w) {
        std::vector<double> out{default_cutoff_inner, 1.0};
        double s = w[0] >= 0.0 ? 1.0 : -1.0;
        if (gb) {
          for (double sg : {1.0, -1.0}) {
            Vec u{sg, 0.0, 0.0};
            for (double c : gb(u)) {
              double xi = sg * c - lf;  // xi + l = sg * c
              if (s * xi > 0.0) out.push_back(s * xi);
            }
          }
        }
        if (s * (-lf) > 0.0) out.push_back(std::abs(lf));
        return out;
      };
      q.origin = "compose-shifted-remainder";
      r.add_piece(std::move(q));
    }
  return r;
}

// Expansion of xi -> sigma(x, C xi): pulled-back terms keep the cutoff in
// |xi|, the compact difference goes to the remainder.
inline SymbolExpansion pullback(const SymbolExpansion& s, const LinearMap& C) {
  int n = s.dimension();
  if (C.n != n) throw error(errc::dimension_mismatch, "pullback: matrix size differs from n");
  C.require_invertible();
  LinearMap Ci = C.inverse();
  double inv_bound = 0.0;  // >= 1 / smallest singular value
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv_bound += Ci(i, j) * Ci(i, j);
  inv_bound = std::sqrt(inv_bound);

  SymbolExpansion r(n, s.order());
  for (auto& t : s.terms()) {
    auto tp = std::make_shared<const LogHomogeneousTerm>(t);
    if (t.compact()) {
      for (auto& [k, p] : t.coef.modes()) {
        RemainderPiece q;
        q.x_mode = k;
        q.value = [tp, k, C](const Vec& xi) { return tp->mode_value(k, C.apply(xi)); };
        q.support = inv_bound;
        auto cb = t.cutoff.breakpoints();
        q.ray_breaks = [cb, C](const Vec& w) {
          double c = norm(C.apply(w));
          std::vector<double> out;
          for (double b : cb) out.push_back(b / c);
          return out;
        };
        q.origin = "pullback-compact";
        r.add_piece(std::move(q));
      }
      continue;
    }
    std::vector<LogHomogeneousTerm> pulled;
    for (int i = 0; i <= t.log_power; ++i) {
      double bin = binomial(t.log_power, i);
      int e = t.log_power - i;
      cplx d = t.degree;
      ModeProfile coef = t.coef.map_profiles([C, bin, e, d, n](const AngularProfile& p) {
        return AngularProfile::general(n, [p, C, bin, e, d](const Vec& w) {
          Vec cw = C.apply(w);
          double c = norm(cw);
          cplx v = p(scaled(cw, 1.0 / c)) * complex_power(c, d) * bin;
          if (e > 0) v *= std::pow(std::log(c), e);
          return v;
        }, "pullback");
      });
      LogHomogeneousTerm nt{t.degree, i, t.cutoff, coef};
      pulled.push_back(nt);
      r.add_term(nt);
    }
    if (t.cutoff.is_none()) continue;
    auto pp = std::make_shared<const std::vector<LogHomogeneousTerm>>(pulled);
    for (auto& [k, p] : t.coef.modes()) {
      RemainderPiece q;
      q.x_mode = k;
      q.value = [tp, pp, k, C](const Vec& xi) {
        cplx v = tp->mode_value(k, C.apply(xi));
        for (auto& u : *pp) v -= u.mode_value(k, xi);
        return v;
      };
      q.support = std::max(1.0, inv_bound);
      auto cb = t.cutoff.breakpoints();
      q.ray_breaks = [cb, C](const Vec& w) {
        double c = norm(C.apply(w));
        std::vector<double> out = cb;
        for (double b : cb) out.push_back(b / c);
        return out;
      };
      q.origin = "pullback-correction";
      r.add_piece(std::move(q));
    }
  }
  for (auto& g : s.remainder()) {
    RemainderPiece q = g;
    auto gv = g.value;
    q.value = [gv, C](const Vec& xi) { return gv(C.apply(xi)); };
    q.support = std::isfinite(g.support) ? g.support * inv_bound : g.support;
    auto gb = g.ray_breaks;
    q.ray_breaks = [gb, C](const Vec& w) {
      Vec cw = C.apply(w);
      double c = norm(cw);
      std::vector<double> out;
      if (gb)
        for (double b : gb(scaled(cw, 1.0 / c))) out.push_back(b / c);
      return out;
    };
    q.decay = g.decay;
    q.origin = "pullback-" + g.origin;
    r.add_piece(std::move(q));
  }
  return r;
}

// The psi-extended graded part: every non-compact term gets the standard
// cutoff, compact terms and the remainder are dropped.  Equals the input
// modulo smoothing symbols when the remainder is a truncated tail.
inline SymbolExpansion graded_part(const SymbolExpansion& s, double inner = default_cutoff_inner) {
  SymbolExpansion r(s.dimension(), s.order());
  for (auto& t : s.terms()) {
    if (t.compact()) continue;
    r.add_term({t.degree, t.log_power, t.cutoff.is_none() ? Cutoff::none() : Cutoff::psi(inner), t.coef});
  }
  return r;
}

// Terms with j < depth only, remainder dropped.
inline SymbolExpansion truncated(const SymbolExpansion& s, int depth) {
  SymbolExpansion r(s.dimension(), s.order());
  for (auto& t : s.terms())
    if ((s.order() - t.degree).real() < depth - 1e-9) r.add_term(t);
  return r;
}

enum class Parity { even_even, even_odd, neither };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::even_even: return "even-even";
    case Parity::even_odd: return "even-odd";
    case Parity::neither: return "neither";
  }
  return "";
}

inline Parity parity_class(const SymbolExpansion& s, double tol = 1e-10) {
  cplx a = s.order();
  if (std::abs(a.imag()) > 1e-12 || std::abs(a.real() - std::round(a.real())) > 1e-12)
    throw error(errc::parity_undefined, "parity requires integer order");
  int n = s.dimension();
  const QuadratureRule& rule = cached_sphere_rule(n, n == 1 ? 1 : (n == 2 ? 64 : 8));
  bool ee = true, eo = true;
  for (auto& t : s.terms()) {
    if (t.compact()) continue;
    auto j = degree_offset(0.0, t.degree);
    if (!j) return Parity::neither;
    double sign = (*j % 2 == 0) ? 1.0 : -1.0;  // (-1)^{degree}
    for (auto& [k, p] : t.coef.modes())
      for (auto& w : rule.nodes) {
        cplx v = p(w), vr = p(Vec{-w[0], -w[1], -w[2]});
        double scl = std::max(1.0, std::abs(v));
        if (std::abs(vr - sign * v) > tol * scl) ee = false;
        if (std::abs(vr + sign * v) > tol * scl) eo = false;
      }
  }
  if (ee) return Parity::even_even;
  if (eo) return Parity::even_odd;
  return Parity::neither;
}

}  // namespace holotrace
