#pragma once

// Holomorphic families of symbols z -> sigma(z) with holomorphic order
// alpha(z): order paths, slices, derivative families, component derivatives,
// the reciprocal order series and the L_k symbols.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holotrace/angular.hpp"
#include "holotrace/core.hpp"
#include "holotrace/series.hpp"
#include "holotrace/symbols.hpp"

namespace holotrace {

// alpha(z) = offset + factor * base(z).
class OrderPath {
 public:
  enum class Kind { affine, moebius, general };

  static OrderPath affine(cplx q, cplx b) {
    OrderPath p;
    p.kind_ = Kind::affine;
    p.q_ = q;
    p.b_ = b;
    return p;
  }
  // base(z) = z / (1 + mu z)
  static OrderPath moebius(cplx mu) {
    OrderPath p;
    p.kind_ = Kind::moebius;
    p.mu_ = mu;
    return p;
  }
  // Derivatives by an N-point Cauchy ring of radius min(max_radius, half the
  // distance to the nearest declared singular point).
  static OrderPath general(std::function<cplx(cplx)> f, std::vector<cplx> singular = {}, std::string tag = "general",
                           double max_radius = 0.5) {
    OrderPath p;
    p.kind_ = Kind::general;
    p.fn_ = std::make_shared<const std::function<cplx(cplx)>>(std::move(f));
    p.singular_ = std::move(singular);
    p.tag_ = std::move(tag);
    p.max_radius_ = max_radius;
    return p;
  }
  static OrderPath polynomial(std::vector<cplx> coeffs) {
    auto c = coeffs;
    OrderPath p = general([c](cplx z) {
      cplx s = 0.0;
      for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
      return s;
    }, {}, "polynomial");
    p.poly_ = std::move(coeffs);
    return p;
  }

  OrderPath transformed(cplx offset, cplx factor) const {
    OrderPath p = *this;
    p.offset_ = offset + factor * offset_;
    p.factor_ = factor * factor_;
    return p;
  }

  Kind kind() const { return kind_; }
  std::string kind_name() const {
    switch (kind_) {
      case Kind::affine: return "affine";
      case Kind::moebius: return "moebius";
      case Kind::general: return tag_;
    }
    return "";
  }
  cplx mu() const { return mu_; }
  cplx offset() const { return offset_; }
  cplx factor() const { return factor_; }
  const std::vector<cplx>& polynomial_coeffs() const { return poly_; }

  std::vector<cplx> singular_points() const {
    if (kind_ == Kind::moebius && mu_ != 0.0) return {-1.0 / mu_};
    return singular_;
  }

  cplx base(cplx z) const {
    switch (kind_) {
      case Kind::affine: return q_ * z + b_;
      case Kind::moebius: return z / (1.0 + mu_ * z);
      case Kind::general: return (*fn_)(z);
    }
    return 0.0;
  }
  cplx operator()(cplx z) const { return offset_ + factor_ * base(z); }

  double cauchy_radius(cplx z) const {
    double r = max_radius_;
    for (auto s : singular_points()) r = std::min(r, 0.5 * std::abs(z - s));
    return r;
  }

  cplx base_derivative(cplx z, int m) const {
    if (m == 0) return base(z);
    switch (kind_) {
      case Kind::affine: return m == 1 ? q_ : cplx(0.0);
      case Kind::moebius: {
        cplx w = 1.0 + mu_ * z;
        return (m % 2 == 1 ? 1.0 : -1.0) * factorial(m) * std::pow(mu_, m - 1) / std::pow(w, m + 1);
      }
      case Kind::general: {
        if (!poly_.empty()) {
          cplx s = 0.0;
          for (std::size_t i = poly_.size(); i-- > static_cast<std::size_t>(m);) {
            double f = 1.0;
            for (int t = 0; t < m; ++t) f *= static_cast<double>(i - t);
            s = s * z + f * poly_[i];
          }
          return s;
        }
        auto f = fn_;
        return cauchy_derivative([f](cplx w) { return (*f)(w); }, z, m, cauchy_radius(z), 32);
      }
    }
    return 0.0;
  }
  // General paths given as callables always use the ring, even when polynomial.
  cplx ring_derivative(cplx z, int m) const {
    OrderPath self = *this;
    return cauchy_derivative([self](cplx w) { return self(w); }, z, m, cauchy_radius(z), 32);
  }

  cplx derivative(cplx z, int m) const {
    if (m == 0) return (*this)(z);
    return factor_ * base_derivative(z, m);
  }

  // Taylor coefficients of alpha around z0 up to order K.
  Jet jet(cplx z0, int K) const {
    std::vector<cplx> a(K + 1);
    for (int m = 0; m <= K; ++m) a[m] = derivative(z0, m) / factorial(m);
    return Jet::from(std::move(a));
  }

  // Solutions of alpha(z) = w in the disc |z - center| <= radius.
  std::vector<cplx> solve(cplx w, cplx center, double radius) const {
    std::vector<cplx> roots;
    auto inside = [&](cplx z) { return std::abs(z - center) <= radius * (1.0 + 1e-12); };
    cplx u = (w - offset_) / factor_;  // target for base
    switch (kind_) {
      case Kind::affine:
        if (q_ != 0.0) roots.push_back((u - b_) / q_);
        break;
      case Kind::moebius:
        if (1.0 - mu_ * u != 0.0) roots.push_back(u / (1.0 - mu_ * u));
        break;
      case Kind::general: {
        // Newton from a grid of seeds over the disc.
        std::vector<cplx> seeds{center};
        for (double rr : {0.25, 0.5, 0.75, 1.0})
          for (int k = 0; k < 12; ++k) seeds.push_back(center + std::polar(rr * radius, two_pi * k / 12));
        for (cplx z : seeds) {
          bool ok = false;
          for (int it = 0; it < 60; ++it) {
            cplx f = (*this)(z) - w;
            cplx d = derivative(z, 1);
            if (d == 0.0) break;
            cplx dz = f / d;
            z -= dz;
            if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) {
              ok = true;
              break;
            }
            if (std::abs(z - center) > 4.0 * radius + 10.0) break;
          }
          if (!ok || std::abs((*this)(z) - w) > 1e-10) continue;
          bool dup = false;
          for (auto r : roots) dup = dup || std::abs(r - z) < 1e-9;
          if (!dup) roots.push_back(z);
        }
        break;
      }
    }
    std::vector<cplx> out;
    for (auto z : roots)
      if (inside(z)) out.push_back(z);
    return out;
  }

 private:
  Kind kind_ = Kind::affine;
  cplx q_ = 1.0, b_ = 0.0, mu_ = 0.0;
  cplx offset_ = 0.0, factor_ = 1.0;
  std::shared_ptr<const std::function<cplx(cplx)>> fn_;
  std::vector<cplx> singular_;
  std::vector<cplx> poly_;
  std::string tag_;
  double max_radius_ = 0.5;
};

struct FamilyDomain {
  cplx center = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  bool contains(cplx z) const { return std::abs(z - center) <= radius * (1.0 + 1e-12); }
};

// Taylor coefficients (f^{(m)}(z0)/m!, m = 0..K) of the sphere restriction of
// the degree alpha(z) - j component.
using ComponentJets = std::function<std::vector<ModeProfile>(int j, cplx z0, int K)>;

struct HolomorphicFamily {
  int n = 1;
  OrderPath order;
  int depth = 1;  // components j = 0 .. depth - 1
  ComponentJets jets;
  FamilyDomain domain;
  std::string derivative_mode = "closed-form";
  std::vector<cplx> singular_points;  // non-holomorphic points of the generator
  int z_derivatives = 0;              // number of z-derivatives applied
  double cutoff_inner = default_cutoff_inner;
};

inline void require_in_domain(const HolomorphicFamily& F, cplx z) {
  if (!F.domain.contains(z))
    throw error(errc::domain, "z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ") outside the family domain");
}

// Family psi |xi|^{alpha(z) - j} p_j(omega) with z-independent profiles.
inline HolomorphicFamily direct_family(int n, OrderPath order, std::vector<ModeProfile> components,
                                       FamilyDomain domain = {}) {
  HolomorphicFamily F;
  F.n = n;
  F.order = std::move(order);
  F.depth = static_cast<int>(components.size());
  auto comps = std::make_shared<const std::vector<ModeProfile>>(std::move(components));
  F.jets = [comps, n](int j, cplx, int K) {
    std::vector<ModeProfile> out(K + 1, ModeProfile(n));
    if (j >= 0 && j < static_cast<int>(comps->size())) out[0] = (*comps)[j];
    return out;
  };
  F.domain = domain;
  for (auto s : F.order.singular_points()) F.singular_points.push_back(s);
  return F;
}

// Family from a component generator g(j, z) with z-derivatives taken on a
// Cauchy ring of `points` nodes.
inline HolomorphicFamily ring_family(int n, OrderPath order, int depth,
                                     std::function<ModeProfile(int j, cplx z)> component, FamilyDomain domain,
                                     std::vector<cplx> singular = {}, int points = 32, double max_radius = 0.5) {
  HolomorphicFamily F;
  F.n = n;
  F.order = std::move(order);
  F.depth = depth;
  F.domain = domain;
  F.derivative_mode = "cauchy-ring";
  F.singular_points = singular;
  for (auto s : F.order.singular_points()) F.singular_points.push_back(s);
  auto sing = F.singular_points;
  auto gen = std::make_shared<const std::function<ModeProfile(int, cplx)>>(std::move(component));
  F.jets = [gen, n, sing, points, max_radius](int j, cplx z0, int K) {
    std::vector<ModeProfile> out(K + 1, ModeProfile(n));
    out[0] = (*gen)(j, z0);
    if (K == 0) return out;
    double r = max_radius;
    for (auto s : sing) r = std::min(r, 0.5 * std::abs(z0 - s));
    std::vector<ModeProfile> samples;
    for (int t = 0; t < points; ++t) samples.push_back((*gen)(j, ring_point(z0, r, t, points)));
    for (int m = 1; m <= K; ++m) {
      ModeProfile acc(n);
      for (int t = 0; t < points; ++t)
        acc = acc + (std::polar(std::pow(r, -m), -two_pi * m * t / points) / static_cast<double>(points)) * samples[t];
      out[m] = acc;
    }
    return out;
  };
  return F;
}

// Coefficients of the log^p |xi| parts (p = 0..k) of the degree alpha(z) - j
// component of d^k/dz^k sigma(z): sum_i binom(k,i) g^{(k-i)} B_{i,p}(alpha', ...).
inline std::vector<ModeProfile> derivative_component_closed(const HolomorphicFamily& F, int j, int k, cplx z) {
  std::vector<ModeProfile> g = F.jets(j, z, k);
  std::vector<cplx> x(k + 1, 0.0);
  for (int m = 1; m <= k; ++m) x[m] = F.order.derivative(z, m);
  auto B = partial_bell(x, k);
  std::vector<ModeProfile> out(k + 1, ModeProfile(F.n));
  for (int p = 0; p <= k; ++p)
    for (int i = p; i <= k; ++i) {
      cplx c = binomial(k, i) * factorial(k - i) * B[i][p];
      if (c != 0.0) out[p] = out[p] + c * g[k - i];
    }
  return out;
}

inline HolomorphicFamily derivative_family(const HolomorphicFamily& F, int k) {
  if (k < 0) throw error(errc::invalid_argument, "derivative order must be nonnegative");
  HolomorphicFamily G = F;
  G.z_derivatives += k;
  return G;
}

// The symbol d^k sigma / dz^k at z, k = F.z_derivatives.
inline SymbolExpansion slice(const HolomorphicFamily& F, cplx z) {
  require_in_domain(F, z);
  cplx a = F.order(z);
  SymbolExpansion s(F.n, a);
  int k = F.z_derivatives;
  for (int j = 0; j < F.depth; ++j) {
    auto comps = derivative_component_closed(F, j, k, z);
    for (int p = 0; p <= k; ++p)
      if (!comps[p].is_zero()) s.add_term({a - static_cast<double>(j), p, Cutoff::psi(F.cutoff_inner), comps[p]});
  }
  return s;
}

// sigma^{(k)}(z0)_{alpha(z0)-j, l}, l = 0..m+k, by the inductive recursion
//   top:    s^{(k+1)}_{k+1} = alpha' s^{(k)}_k
//   middle: s^{(k+1)}_l     = alpha' s^{(k)}_{l-1} + d/dz s^{(k)}_l
//   bottom: s^{(k+1)}_0     = d/dz s^{(k)}_0
// carried out on z-jets of the sphere restrictions.
inline std::vector<ModeProfile> component_derivative(const HolomorphicFamily& F, int j, int k, cplx z0) {
  require_in_domain(F, z0);
  using PJet = std::vector<ModeProfile>;  // Taylor coefficients in h
  int base = F.z_derivatives;
  int K = k + base;
  PJet g = F.jets(j, z0, K);
  Jet ap = Jet::from([&] {
    std::vector<cplx> c(K + 1);
    for (int m = 0; m <= K; ++m) c[m] = F.order.derivative(z0, m + 1) / factorial(m);
    return c;
  }());
  auto dz = [&](const PJet& f) {
    PJet r(f.size() > 1 ? f.size() - 1 : 1, ModeProfile(F.n));
    for (std::size_t m = 1; m < f.size(); ++m) r[m - 1] = static_cast<double>(m) * f[m];
    return r;
  };
  auto times = [&](const Jet& s, const PJet& f) {
    PJet r(f.size(), ModeProfile(F.n));
    for (std::size_t a = 0; a < f.size(); ++a)
      for (std::size_t b = 0; a + b < f.size(); ++b)
        if (s[static_cast<int>(b)] != 0.0) r[a + b] = r[a + b] + s[static_cast<int>(b)] * f[a];
    return r;
  };
  auto add = [&](const PJet& f, const PJet& h) {
    std::size_t L = std::min(f.size(), h.size());
    PJet r(L, ModeProfile(F.n));
    for (std::size_t m = 0; m < L; ++m) r[m] = f[m] + h[m];
    return r;
  };
  std::vector<PJet> cur{g};
  for (int step = 0; step < K; ++step) {
    std::vector<PJet> nxt(cur.size() + 1);
    nxt.back() = times(ap, cur.back());
    for (std::size_t l = 1; l < cur.size(); ++l) nxt[l] = add(times(ap, cur[l - 1]), dz(cur[l]));
    nxt[0] = dz(cur[0]);
    std::size_t L = nxt[0].size();
    for (auto& f : nxt) f.resize(std::min(f.size(), L), ModeProfile(F.n));
    cur = std::move(nxt);
  }
  std::vector<ModeProfile> out;
  for (auto& f : cur) out.push_back(f.empty() ? ModeProfile(F.n) : f[0]);
  return out;
}

// Coefficients (c_{-1}, c_0, ..., c_J) of 1/(alpha(z) - alpha(z0)).
inline std::vector<cplx> reciprocal_order_series(const OrderPath& path, cplx z0, int J) {
  Jet a = path.jet(z0, J + 2);
  if (std::abs(a[1]) < 1e-12) throw error(errc::non_critical, "alpha'(z0) = 0: critical order point");
  std::vector<cplx> b(J + 2);
  for (int i = 0; i <= J + 1; ++i) b[i] = a[i + 1];
  return series_reciprocal(b, J + 1);
}

// j0 with alpha(z0) - j0 = -n, if any.
inline std::optional<int> critical_offset(const HolomorphicFamily& F, cplx z0) {
  cplx v = F.order(z0) + static_cast<double>(F.n);
  double j = std::round(v.real());
  if (std::abs(v.real() - j) < 1e-10 && std::abs(v.imag()) < 1e-10 && j >= 0) return static_cast<int>(j);
  return std::nullopt;
}

// L_k = k! sum_{m=-1}^{k} c_m sigma^{(k-m)}(z0)_{j0} / (k-m)!, as a symbol
// of order alpha(z0) carrying only the j0 component.
inline SymbolExpansion L_k_symbol(const HolomorphicFamily& F, cplx z0, int k) {
  require_in_domain(F, z0);
  cplx a0 = F.order(z0);
  SymbolExpansion L(F.n, a0);
  auto j0 = critical_offset(F, z0);
  if (!j0 || *j0 >= F.depth) return L;
  auto c = reciprocal_order_series(F.order, z0, k);  // c[0] = c_{-1}
  std::vector<ModeProfile> acc(k + 2, ModeProfile(F.n));
  for (int m = -1; m <= k; ++m) {
    int r = k - m;
    cplx w = c[m + 1] * factorial(k) / factorial(r);
    auto comps = derivative_component_closed(F, *j0, r + F.z_derivatives, z0);
    for (std::size_t p = 0; p < comps.size() && p < acc.size(); ++p) acc[p] = acc[p] + w * comps[p];
  }
  for (int p = 0; p <= k + 1; ++p)
    if (!acc[p].is_zero()) L.add_term({a0 - static_cast<double>(*j0), p, Cutoff::psi(F.cutoff_inner), acc[p]});
  return L;
}

// Candidate poles alpha^{-1}(Z cap [-n, inf)) inside the domain disc of
// radius `radius` around `center` (default: the family domain).
inline std::vector<cplx> pole_set(const HolomorphicFamily& F, cplx center, double radius) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int t = 0; t <= 64; ++t) {
    for (double rr : {0.0, 0.5, 1.0}) {
      cplx z = center + std::polar(rr * radius, two_pi * t / 64);
      bool near_sing = false;
      for (auto s : F.order.singular_points()) near_sing = near_sing || std::abs(z - s) < 1e-3;
      if (near_sing) continue;
      double v = F.order(z).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::vector<cplx> out;
  int mlo = std::max(-F.n, static_cast<int>(std::floor(lo)) - 2);
  int mhi = std::min(static_cast<int>(std::ceil(hi)) + 2, mlo + 400);
  for (int m = mlo; m <= mhi; ++m)
    for (auto z : F.order.solve(static_cast<double>(m), center, radius)) {
      bool dup = false;
      for (auto w : out) dup = dup || std::abs(w - z) < 1e-9;
      if (!dup) out.push_back(z);
    }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
  return out;
}

}  // namespace holotrace
