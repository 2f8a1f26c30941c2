#pragma once

// Symbol-level complex powers and logarithms of elliptic model symbols, zeta
// Laurent data, zeta determinants and the commutator / trace defect identities.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "holotrace/angular.hpp"
#include "holotrace/core.hpp"
#include "holotrace/families.hpp"
#include "holotrace/finitepart.hpp"
#include "holotrace/laurent.hpp"
#include "holotrace/series.hpp"
#include "holotrace/symbols.hpp"

namespace holotrace {

// Data of Pi_Q for a non-invertible model: kernel_terms[k] = tr(A log^k(Q) Pi_Q),
// subtracted from c_k with the sign (-1)^k of d^k/dz^k Q^{-z}.
struct KernelData {
  int dimension = 0;
  std::vector<cplx> kernel_terms;
};

// q = c |xi|^order (1 + sum_{i>=1} u_i), u_i homogeneous of degree -i.
class EllipticModelSymbol {
 public:
  EllipticModelSymbol() = default;
  explicit EllipticModelSymbol(SymbolExpansion q, double theta = pi, std::optional<KernelData> kernel = std::nullopt)
      : q_(std::move(q)), theta_(theta), kernel_(std::move(kernel)) {
    cplx a = q_.order();
    if (std::abs(a.imag()) > 1e-14 || !(a.real() > 0.0))
      throw error(errc::admissibility, "model symbol needs real positive order");
    order_ = a.real();
    int n = q_.dimension();
    if (!q_.x_independent()) throw error(errc::unsupported, "model symbol q must be x-independent");
    ModeProfile lead = q_.component_at(a, 0);
    if (lead.is_zero()) throw error(errc::admissibility, "model symbol has no leading component");
    AngularProfile lp = lead.mode(0);
    const QuadratureRule& rule = cached_sphere_rule(n, n == 1 ? 1 : (n == 2 ? 64 : 8));
    cplx c0 = lp(rule.nodes[0]);
    for (auto& w : rule.nodes) {
      cplx v = lp(w);
      if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-14)
        throw error(errc::admissibility, "leading profile of q is not strictly positive");
      if (std::abs(v - c0) > 1e-12 * std::abs(c0))
        throw error(errc::admissibility, "leading term of q must be radial c|xi|^q");
    }
    c_ = c0.real();
    for (auto& t : q_.terms()) {
      if (t.compact()) continue;
      if (t.log_power != 0) throw error(errc::admissibility, "model symbol must be classical");
      auto j = degree_offset(a, t.degree);
      if (!j) throw error(errc::admissibility, "model symbol components must have integer offsets");
      if (*j == 0) continue;
      ModeProfile u = (1.0 / c_) * t.coef;
      if (static_cast<int>(u_.size()) < *j) u_.resize(*j, ModeProfile(n));
      u_[*j - 1] = u_[*j - 1] + u;
    }
  }

  const SymbolExpansion& symbol() const { return q_; }
  int dimension() const { return q_.dimension(); }
  double order() const { return order_; }
  double leading_coefficient() const { return c_; }
  double theta() const { return theta_; }
  bool invertible() const { return !kernel_ || kernel_->dimension == 0; }
  const std::optional<KernelData>& kernel() const { return kernel_; }
  // u_i, i = 1..size.
  const std::vector<ModeProfile>& lower() const { return u_; }

 private:
  SymbolExpansion q_;
  double order_ = 1.0, c_ = 1.0, theta_ = pi;
  std::optional<KernelData> kernel_;
  std::vector<ModeProfile> u_;
};

inline int default_depth(int n) { return n + 4; }

// sigma(z) = a q^{e(z)} as the graded expansion
//   sum_{m,i,k} a_m U^k_i binom(e(z), k) c^{e(z)} |xi|^{alpha_a + q e(z) - m - i}.
inline HolomorphicFamily power_family(const SymbolExpansion& a, const EllipticModelSymbol& q, const OrderPath& e,
                                      int depth = 0, FamilyDomain domain = {}) {
  int n = q.dimension();
  if (a.dimension() != n) throw error(errc::dimension_mismatch, "a and q live in different dimensions");
  if (depth <= 0) depth = default_depth(n);
  // a_m by offset m.
  std::vector<ModeProfile> am(depth, ModeProfile(n));
  for (auto& t : a.terms()) {
    if (t.compact()) continue;
    if (t.log_power != 0) throw error(errc::unsupported, "amplitude a must be classical");
    auto m = degree_offset(a.order(), t.degree);
    if (!m) throw error(errc::unsupported, "amplitude components must have integer offsets");
    if (*m < depth) am[*m] = am[*m] + t.coef;
  }
  // Graded powers U^k: P[k][i] is the degree -i part of U^k.
  const auto& u = q.lower();
  std::vector<std::vector<ModeProfile>> P(depth, std::vector<ModeProfile>(depth, ModeProfile(n)));
  P[0][0] = ModeProfile::single(AngularProfile::constant(n, 1.0));
  for (int k = 1; k < depth; ++k)
    for (int i = k; i < depth; ++i)
      for (int s = 1; s <= i - (k - 1) && s <= static_cast<int>(u.size()); ++s)
        if (!u[s - 1].is_zero() && !P[k - 1][i - s].is_zero()) P[k][i] = P[k][i] + u[s - 1] * P[k - 1][i - s];
  // A[j][k] = sum_{m + i = j} a_m P[k][i].
  auto A = std::make_shared<std::vector<std::vector<ModeProfile>>>(depth, std::vector<ModeProfile>(depth, ModeProfile(n)));
  for (int j = 0; j < depth; ++j)
    for (int m = 0; m <= j; ++m)
      if (!am[m].is_zero())
        for (int k = 0; k <= j - m; ++k)
          if (!P[k][j - m].is_zero()) (*A)[j][k] = (*A)[j][k] + am[m] * P[k][j - m];

  HolomorphicFamily F;
  F.n = n;
  F.order = e.transformed(a.order(), q.order());
  F.depth = depth;
  F.domain = domain;
  F.singular_points = e.singular_points();
  double logc = std::log(q.leading_coefficient());
  F.jets = [A, e, logc, n, depth](int j, cplx z0, int K) {
    std::vector<ModeProfile> out(K + 1, ModeProfile(n));
    if (j < 0 || j >= depth) return out;
    Jet E = e.jet(z0, K);
    Jet W = exp(logc * E);
    Jet B(K, 1.0);  // binom(e, k)
    for (int k = 0; k < depth; ++k) {
      if (k > 0) B = (1.0 / static_cast<double>(k)) * (B * (E + cplx(-(k - 1.0))));
      const ModeProfile& g = (*A)[j][k];
      if (g.is_zero()) continue;
      Jet h = W * B;
      for (int m = 0; m <= K; ++m)
        if (h[m] != 0.0) out[m] = out[m] + h[m] * g;
    }
    return out;
  };
  return F;
}

inline OrderPath zeta_exponent() { return OrderPath::affine(-1.0, 0.0); }

// Symbol of log^k Q: the k-th z-derivative of q^z at z = 0.
inline SymbolExpansion log_symbol(const EllipticModelSymbol& q, int k, int depth = 0) {
  if (k < 0) throw error(errc::invalid_argument, "log power must be nonnegative");
  if (!q.invertible()) throw error(errc::unsupported, "log symbol needs an invertible model");
  if (k == 0) return identity_symbol(q.dimension());
  auto F = power_family(identity_symbol(q.dimension()), q, OrderPath::affine(1.0, 0.0), depth);
  return slice(derivative_family(F, k), 0.0);
}

// Laurent data of TR(A Q^{-z}) (pointwise density or model trace) at z0.
inline LaurentSeries zeta_laurent(const SymbolExpansion& a, const EllipticModelSymbol& q, cplx z0, int K,
                                  const XEval& xe = {}, int depth = 0) {
  auto F = power_family(a, q, zeta_exponent(), depth);
  return laurent_expansion(F, z0, K, xe);
}

inline LaurentSeries zeta_at_zero(const SymbolExpansion& a, const EllipticModelSymbol& q, int K, const XEval& xe = {},
                                  int depth = 0) {
  if (!q.invertible() && (!q.kernel() || q.kernel()->kernel_terms.empty()))
    throw error(errc::unsupported, "non-invertible model without declared kernel data");
  LaurentSeries L = zeta_laurent(a, q, 0.0, K, xe, depth);
  if (q.kernel())
    for (int k = 0; k <= K && k < static_cast<int>(q.kernel()->kernel_terms.size()); ++k)
      L.regular[k] -= (k % 2 == 0 ? 1.0 : -1.0) * q.kernel()->kernel_terms[k];
  return L;
}

struct LogDetResult {
  cplx value = 0.0;          // selected branch
  cplx general = 0.0;        // int [fp log q - (1/2q) res_0(log^2 q)]
  cplx tr_log = 0.0;         // int fp log q
  cplx residue_term = 0.0;   // int res_0(log^2 q) / (2q)
  std::string branch = "general";
};

// log det_zeta Q; the even-even branch applies to even-even q of even order
// and returns TR(log q).
inline LogDetResult log_det(const EllipticModelSymbol& q, const XEval& xe = {}, int depth = 0) {
  if (!q.invertible()) throw error(errc::unsupported, "log_det needs an invertible model");
  LogDetResult r;
  SymbolExpansion l1 = log_symbol(q, 1, depth), l2 = log_symbol(q, 2, depth);
  r.tr_log = finite_part_integral(l1, xe);
  r.residue_term = residue_density(l2, xe) / (2.0 * q.order());
  r.general = r.tr_log - r.residue_term;
  r.value = r.general;
  double ord = q.order();
  bool even_order = std::abs(ord - std::round(ord)) < 1e-12 && static_cast<long>(std::round(ord)) % 2 == 0;
  if (even_order && parity_class(q.symbol()) == Parity::even_even) {
    r.branch = "even-even";
    r.value = r.tr_log;
  }
  return r;
}

// Commutator [A, B] to the given depth.
inline SymbolExpansion commutator(const SymbolExpansion& a, const SymbolExpansion& b, int depth) {
  return subtract(compose(a, b, depth), compose(b, a, depth));
}

// int dx [fp sigma_[A,B] - (1/q) res_0(sigma_[A, B log q])].
inline cplx commutator_defect(const SymbolExpansion& a, const SymbolExpansion& b, const EllipticModelSymbol& q,
                              int depth = 0, const XEval& xe = XEval::circle()) {
  int n = q.dimension();
  if (depth <= 0) depth = default_depth(n);
  SymbolExpansion L = log_symbol(q, 1, depth);
  SymbolExpansion ab = commutator(a, b, depth);
  SymbolExpansion bl = compose(b, L, depth);
  SymbolExpansion abl = commutator(a, bl, depth);
  return finite_part_integral(ab, xe) - residue_density(abl, xe) / q.order();
}

struct TraceDefect {
  cplx local = 0.0;          // -(1/q) res(a [b, log q])
  cplx global = 0.0;         // int [fp [A,B] - (1/q) res_0([A,B] log q)]
  cplx res_bracket = 0.0;    // res(a [b, log q])
  cplx res_combined = 0.0;   // res([a,b] log q - [a, b log q])
  cplx res_a_blog = 0.0;     // res([a, b log q])
  cplx tr_commutator = 0.0;  // int fp [A,B]
};

inline TraceDefect trace_defect(const SymbolExpansion& a, const SymbolExpansion& b, const EllipticModelSymbol& q,
                                int depth = 0, const XEval& xe = XEval::circle()) {
  int n = q.dimension();
  if (depth <= 0) depth = default_depth(n);
  SymbolExpansion L = log_symbol(q, 1, depth);
  SymbolExpansion ab = commutator(a, b, depth);
  SymbolExpansion bL = commutator(b, L, depth);
  SymbolExpansion a_bL = compose(a, bL, depth);
  SymbolExpansion abL = compose(ab, L, depth);
  SymbolExpansion a_blog = commutator(a, compose(b, L, depth), depth);
  TraceDefect d;
  d.res_bracket = residue_density(a_bL, xe);
  d.local = -d.res_bracket / q.order();
  d.tr_commutator = finite_part_integral(ab, xe);
  d.global = d.tr_commutator - residue_density(abL, xe) / q.order();
  d.res_a_blog = residue_density(a_blog, xe);
  d.res_combined = residue_density(abL, xe) - d.res_a_blog;
  return d;
}

}  // namespace holotrace
