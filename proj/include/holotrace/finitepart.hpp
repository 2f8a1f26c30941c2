#pragma once

// Cut-off asymptotics and finite-part integrals of a single symbol, the local
// residue, rescaling and linear change of variables, and the sphere
// pushforward identity for homogeneous functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "holotrace/angular.hpp"
#include "holotrace/core.hpp"
#include "holotrace/quadrature.hpp"
#include "holotrace/symbols.hpp"

namespace holotrace {

// Coefficient of R^power log^r R (pure_log: power 0, r = l + 1) in the
// expansion of the ball integral.
struct DivergenceEntry {
  int j = -1;  // offset from the order, -1 when not integral
  cplx power = 0.0;
  int log_exponent = 0;
  cplx coefficient = 0.0;
  bool pure_log = false;
};

struct FinitePartResult {
  cplx finite_part = 0.0;
  std::vector<DivergenceEntry> divergence_table;
  int N_used = 0;
  double quad_error_estimate = 0.0;
};

struct NumericIntegral {
  cplx value = 0.0;
  double error_estimate = 0.0;
};

// Smallest admissible N: N > Re(order) + n - 1.
// How homogeneous terms of offset j > N enter the remainder integral: by the
// closed-form convergent integral or by radial quadrature.
enum class TailIntegration { closed_form, quadrature };

inline int default_N(const SymbolExpansion& s) {
  double t = s.order().real() + s.dimension() - 1.0;
  return std::max(0, static_cast<int>(std::floor(t + 1e-12)) + 1);
}

namespace detail {

inline bool is_minus_n(cplx d, int n) { return std::abs(d + static_cast<double>(n)) < 1e-12; }

// Terms at offset <= N get the ball/outer treatment; so does any term that is
// not integrable at infinity, which happens when degrees off the order lattice
// (sums of symbols of different order classes) fall outside the offset window.
inline bool kept_term(const LogHomogeneousTerm& t, cplx order, int N, int n) {
  return t.compact() || (order - t.degree).real() <= N + 1e-9 || t.degree.real() + n >= -1e-9;
}

// int_0^1 cut(r) r^{d+n-1} log^l r dr.
inline cplx ball_radial(const LogHomogeneousTerm& t, int n) {
  cplx s = t.degree + static_cast<double>(n);
  int l = t.log_power;
  if (t.cutoff.is_none()) {
    if (!(s.real() > 0.0))
      throw error(errc::threshold, "term extended through the origin is not integrable at 0");
    return std::pow(-1.0, l) * factorial(l) / std::pow(s, l + 1);
  }
  double lo = t.cutoff.lower_support();
  std::vector<double> br = clean_breaks(t.cutoff.breakpoints(), lo, 1.0);
  auto f = [&](double r) { return radial_factor(r, t.degree, l, t.cutoff) * std::pow(r, n - 1); };
  return integrate_panels(f, br, 4, 24);
}

// int_1^infty r^{s-1} log^l r dr continued: (-1)^{l+1} l! / s^{l+1}.
inline cplx outer_constant(cplx s, int l) { return std::pow(-1.0, l + 1) * factorial(l) / std::pow(s, l + 1); }

// int_{R^n} of an integrable homogeneous term (Re(d) + n < 0): ball part plus
// the convergent outer integral, which equals the continued constant.
inline cplx tail_term_integral(const LogHomogeneousTerm& t, int n, const XEval& xe) {
  cplx s = t.degree + static_cast<double>(n);
  if (!(s.real() < 0.0)) throw error(errc::threshold, "tail term is not integrable at infinity");
  cplx S = t.coef.sphere(xe);
  if (S == 0.0) return 0.0;
  if (t.compact()) return ball_radial(t, n) * S;
  return (ball_radial(t, n) + outer_constant(s, t.log_power)) * S;
}

inline std::vector<double> ray_breaks_of(const RemainderPiece& p, const Vec& w) {
  std::vector<double> b;
  if (p.ray_breaks) b = p.ray_breaks(w);
  return b;
}

// int_0^infty f(r w) r^{n-1} dr along one ray.
inline NumericIntegral radial_integral(const RemainderPiece& p, const Vec& w, int n) {
  auto g = [&](double r) { return p.value(scaled(w, r)) * std::pow(r, n - 1); };
  std::vector<double> br = ray_breaks_of(p, w);
  br.push_back(1.0);
  br.push_back(default_cutoff_inner);
  NumericIntegral out;
  if (p.compact()) {
    auto b = clean_breaks(br, 0.0, p.support);
    out.value = integrate_panels(g, b, 4, 24);
    return out;
  }
  double top = 2.0;
  for (double b : br)
    if (std::isfinite(b)) top = std::max(top, 2.0 * b);
  auto b = clean_breaks(br, 0.0, top);
  out.value = integrate_panels(g, b, 4, 24);
  double ex = p.decay + n;
  if (!(ex < 0.0))
    throw error(errc::accuracy, "remainder piece '" + p.origin + "' is not integrable (decay " +
                                    std::to_string(p.decay) + ")");
  // r = top e^u, unit panels in u.
  auto h = [&](double u) {
    double r = top * std::exp(u);
    return g(r) * r;
  };
  double u = 0.0, umax = std::min(700.0, std::log(1e250 / top));
  int quiet = 0;
  cplx last = 0.0;
  while (u < umax) {
    cplx pv = integrate_gl(h, u, u + 1.0, 20);
    out.value += pv;
    last = pv;
    u += 1.0;
    double mag = std::abs(pv);
    if (mag <= 1e-18 * std::max(1.0, std::abs(out.value))) {
      if (++quiet >= 3) break;
    } else {
      quiet = 0;
    }
  }
  double q = std::exp(ex);
  out.error_estimate = std::abs(last) * q / (1.0 - q);
  return out;
}

}  // namespace detail

// int_{R^n} of one remainder piece, reduced over x by `xe`.
inline NumericIntegral integrate_piece(const RemainderPiece& p, int n, const XEval& xe) {
  cplx wgt = xe.weight(p.x_mode);
  NumericIntegral out;
  if (wgt == 0.0) return out;
  double norm_f = std::pow(two_pi, -n);
  auto angular = [&](int res) {
    const QuadratureRule& rule = cached_sphere_rule(n, res);
    NumericIntegral acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      NumericIntegral ri = detail::radial_integral(p, rule.nodes[i], n);
      acc.value += rule.weights[i] * ri.value;
      acc.error_estimate += rule.weights[i] * ri.error_estimate;
    }
    acc.value *= norm_f;
    acc.error_estimate *= norm_f;
    return acc;
  };
  if (n == 1) {
    out = angular(1);
  } else {
    int res = n == 2 ? 64 : 8;
    int max_res = n == 2 ? 1024 : 32;
    NumericIntegral prev = angular(res);
    out = prev;
    while (res < max_res) {
      res *= 2;
      NumericIntegral cur = angular(res);
      double diff = std::abs(cur.value - prev.value);
      out = cur;
      if (diff <= 1e-13 * std::max(1.0, std::abs(cur.value))) break;
      prev = cur;
      if (res >= max_res) out.error_estimate += diff;
    }
  }
  out.value *= wgt;
  out.error_estimate *= std::abs(wgt);
  return out;
}

// Asymptotics of int_{B(0,R)} sigma as R -> infinity: the finite part and the
// coefficients of every R^{alpha-j+n} log^i R and log^{l+1} R term.
inline FinitePartResult asymptotic_expansion(const SymbolExpansion& s, int N, const XEval& xe = {},
                                            TailIntegration tail = TailIntegration::closed_form) {
  int n = s.dimension();
  if (!(N > s.order().real() + n - 1.0))
    throw error(errc::threshold, "N = " + std::to_string(N) + " is below the threshold Re(order) + n - 1");
  FinitePartResult res;
  res.N_used = N;
  auto add_entry = [&](DivergenceEntry e) {
    if (e.coefficient == 0.0) return;
    for (auto& f : res.divergence_table)
      if (f.pure_log == e.pure_log && f.log_exponent == e.log_exponent && same_degree(f.power, e.power)) {
        f.coefficient += e.coefficient;
        return;
      }
    res.divergence_table.push_back(e);
  };
  for (auto& t : s.terms()) {
    auto j = degree_offset(s.order(), t.degree);
    bool kept = detail::kept_term(t, s.order(), N, n);
    if (!kept) {
      if (tail == TailIntegration::closed_form) {
        res.finite_part += detail::tail_term_integral(t, n, xe);
        continue;
      }
      for (auto& p : detail::term_as_pieces(t, "tail-term")) {
        NumericIntegral q = integrate_piece(p, n, xe);
        res.finite_part += q.value;
        res.quad_error_estimate += q.error_estimate;
      }
      continue;
    }
    cplx S = t.coef.sphere(xe);
    if (S == 0.0) continue;
    if (t.cutoff.is_none()) {
      // Extended through the origin: int_0^R r^{s-1} log^l r has no constant term.
      cplx sp = t.degree + static_cast<double>(n);
      int l = t.log_power;
      for (int i = 0; i <= l; ++i)
        add_entry({j.value_or(-1), sp, i, std::pow(-1.0, l - i) * factorial(l) / (factorial(i) * std::pow(sp, l - i + 1)) * S, false});
      continue;
    }
    res.finite_part += detail::ball_radial(t, n) * S;
    if (t.compact()) continue;
    int l = t.log_power;
    if (detail::is_minus_n(t.degree, n)) {
      add_entry({j.value_or(-1), 0.0, l + 1, S / static_cast<double>(l + 1), true});
      continue;
    }
    cplx sp = t.degree + static_cast<double>(n);
    res.finite_part += detail::outer_constant(sp, l) * S;
    for (int i = 0; i <= l; ++i)
      add_entry({j.value_or(-1), sp, i, std::pow(-1.0, l - i) * factorial(l) / (factorial(i) * std::pow(sp, l - i + 1)) * S, false});
  }
  for (auto& p : s.remainder()) {
    NumericIntegral q = integrate_piece(p, n, xe);
    res.finite_part += q.value;
    res.quad_error_estimate += q.error_estimate;
  }
  return res;
}

inline FinitePartResult asymptotic_expansion(const SymbolExpansion& s) { return asymptotic_expansion(s, default_N(s)); }

// Finite part via ball integrals, remainder integral and the constants
// (-1)^{l+1} l!/(alpha-j+n)^{l+1} int_S sigma_{alpha-j,l}.
inline cplx finite_part_integral(const SymbolExpansion& s, int N, const XEval& xe = {},
                                 TailIntegration tail = TailIntegration::closed_form) {
  int n = s.dimension();
  if (!(N > s.order().real() + n - 1.0))
    throw error(errc::threshold, "N = " + std::to_string(N) + " is below the threshold Re(order) + n - 1");
  cplx total = 0.0;
  for (auto& t : s.terms()) {
    bool kept = detail::kept_term(t, s.order(), N, n);
    if (!kept) {
      if (tail == TailIntegration::closed_form) {
        total += detail::tail_term_integral(t, n, xe);
        continue;
      }
      for (auto& p : detail::term_as_pieces(t, "tail-term")) total += integrate_piece(p, n, xe).value;
      continue;
    }
    if (t.cutoff.is_none()) continue;  // LIM of R^{d+n} log^i R polynomials is 0
    cplx S = t.coef.sphere(xe);
    if (S == 0.0) continue;
    total += detail::ball_radial(t, n) * S;
    if (t.compact() || detail::is_minus_n(t.degree, n)) continue;
    total += detail::outer_constant(t.degree + static_cast<double>(n), t.log_power) * S;
  }
  for (auto& p : s.remainder()) total += integrate_piece(p, n, xe).value;
  return total;
}

inline cplx finite_part_integral(const SymbolExpansion& s, const XEval& xe = {}) {
  return finite_part_integral(s, default_N(s), xe);
}

// int_S sigma_{-n,l} dbar_S.
inline cplx log_residue(const SymbolExpansion& s, int l, const XEval& xe = {}) {
  return s.component_at(-static_cast<double>(s.dimension()), l).sphere(xe);
}

inline cplx residue_density(const SymbolExpansion& s, const XEval& xe = {}) { return log_residue(s, 0, xe); }

// LIM over balls of radius mu R.
inline cplx rescaled_finite_part(const SymbolExpansion& s, double mu, const XEval& xe = {}) {
  if (!(mu > 0.0)) throw error(errc::invalid_argument, "rescaling factor must be positive");
  cplx v = finite_part_integral(s, xe);
  double lm = std::log(mu);
  for (int l = 0; l <= s.log_degree(); ++l) v += std::pow(lm, l + 1) / (l + 1.0) * log_residue(s, l, xe);
  return v;
}

// |det C| fp int sigma(C xi) by the correction formula
//   fp sigma + sum_l (-1)^{l+1}/(l+1) int_S sigma_{-n,l}(w) log^{l+1}|C^{-1} w|.
inline cplx transform_finite_part(const SymbolExpansion& s, const LinearMap& C, const XEval& xe = {}) {
  int n = s.dimension();
  if (C.n != n) throw error(errc::dimension_mismatch, "matrix size differs from n");
  LinearMap Ci = C.inverse();
  cplx v = finite_part_integral(s, xe);
  for (int l = 0; l <= s.log_degree(); ++l) {
    ModeProfile c = s.component_at(-static_cast<double>(n), l);
    if (c.is_zero()) continue;
    AngularProfile lg = AngularProfile::general(n, [Ci, l](const Vec& w) {
      return cplx(std::pow(std::log(norm(Ci.apply(w))), l + 1));
    }, "log-power");
    v += std::pow(-1.0, l + 1) / (l + 1.0) * c.times(lg).sphere(xe);
  }
  return v;
}

// The same quantity from the finite part of the pulled-back symbol.
inline cplx transform_finite_part_direct(const SymbolExpansion& s, const LinearMap& C, const XEval& xe = {}) {
  SymbolExpansion p = pullback(s, C);
  return std::abs(C.det()) * finite_part_integral(p, xe);
}

struct PushforwardResult {
  cplx lhs = 0.0;
  cplx rhs = 0.0;
};

// f is the restriction to the sphere of a function homogeneous of degree -n.
//   lhs = int_{|eta|=1} f(T eta) |T eta|^s log^k |T eta|
//   rhs = (-1)^k / |det T| int_{|xi|=1} f(xi) |T^{-1} xi|^{-s} log^k |T^{-1} xi|
inline PushforwardResult sphere_pushforward_check(const AngularProfile& f, const LinearMap& T, cplx s, int k) {
  int n = f.dimension();
  if (T.n != n) throw error(errc::dimension_mismatch, "matrix size differs from profile dimension");
  LinearMap Ti = T.inverse();
  double dn = static_cast<double>(n);
  AngularProfile left = AngularProfile::general(n, [f, T, s, k, dn](const Vec& w) {
    Vec tw = T.apply(w);
    double c = norm(tw);
    return f(scaled(tw, 1.0 / c)) * complex_power(c, s - dn) * std::pow(std::log(c), k);
  }, "pushforward-lhs");
  AngularProfile right = AngularProfile::general(n, [f, Ti, s, k](const Vec& w) {
    double c = norm(Ti.apply(w));
    return f(w) * complex_power(c, -s) * std::pow(std::log(c), k);
  }, "pushforward-rhs");
  PushforwardResult r;
  r.lhs = sphere_integral(left);
  r.rhs = std::pow(-1.0, k) / std::abs(T.det()) * sphere_integral(right);
  return r;
}

// Direct polar quadrature of int_{B(0,R)} sigma dbar xi, with geometric
// radial panels beyond the unit ball.
inline cplx ball_integral_direct(const SymbolExpansion& s, double R, const XEval& xe = {}, int angular_nodes = 256) {
  int n = s.dimension();
  std::vector<double> br{0.0, default_cutoff_inner, 1.0};
  for (auto& t : s.terms())
    for (double b : t.cutoff.breakpoints()) br.push_back(b);
  for (double r = 2.0; r < R; r *= 2.0) br.push_back(r);
  const QuadratureRule& rule = cached_sphere_rule(n, n == 1 ? 1 : (n == 2 ? angular_nodes : 24));
  cplx total = 0.0;
  for (int m : s.modes()) {
    cplx wgt = xe.weight(m);
    if (wgt == 0.0) continue;
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Vec& w = rule.nodes[i];
      std::vector<double> b = br;
      for (auto& p : s.remainder())
        if (p.x_mode == m)
          for (double v : detail::ray_breaks_of(p, w)) b.push_back(v);
      b = clean_breaks(b, 0.0, R);
      auto g = [&](double r) { return s.evaluate_mode(m, scaled(w, r)) * std::pow(r, n - 1); };
      acc += rule.weights[i] * integrate_panels(g, b, 2, 24);
    }
    total += wgt * acc;
  }
  return total / std::pow(two_pi, n);
}

// Least-squares fit sum_c x_c * columns[c](R) ~ values over the radii
// (complex Householder QR).  Returns the coefficients; throws accuracy when
// the scaled system is too ill-conditioned.
inline std::vector<cplx> least_squares(const std::vector<std::vector<cplx>>& A, const std::vector<cplx>& y,
                                       double max_condition = 1e13) {
  std::size_t m = y.size(), p = A.empty() ? 0 : A[0].size();
  if (m < p) throw error(errc::invalid_argument, "least squares: fewer samples than unknowns");
  std::vector<std::vector<cplx>> M = A;
  std::vector<double> scl(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t r = 0; r < m; ++r) scl[c] = std::max(scl[c], std::abs(M[r][c]));
    if (scl[c] == 0.0) scl[c] = 1.0;
    for (std::size_t r = 0; r < m; ++r) M[r][c] /= scl[c];
  }
  std::vector<cplx> b = y;
  for (std::size_t c = 0; c < p; ++c) {
    double nrm = 0.0;
    for (std::size_t r = c; r < m; ++r) nrm += std::norm(M[r][c]);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw error(errc::accuracy, "least squares: rank deficient model");
    cplx ph = std::abs(M[c][c]) > 0 ? M[c][c] / std::abs(M[c][c]) : cplx(1.0);
    cplx alpha = -ph * nrm;
    std::vector<cplx> v(m, 0.0);
    for (std::size_t r = c; r < m; ++r) v[r] = M[r][c];
    v[c] -= alpha;
    double vn = 0.0;
    for (std::size_t r = c; r < m; ++r) vn += std::norm(v[r]);
    if (vn == 0.0) continue;
    auto reflect = [&](auto&& get, auto&& put) {
      cplx d = 0.0;
      for (std::size_t r = c; r < m; ++r) d += std::conj(v[r]) * get(r);
      d *= 2.0 / vn;
      for (std::size_t r = c; r < m; ++r) put(r, get(r) - d * v[r]);
    };
    for (std::size_t cc = c; cc < p; ++cc)
      reflect([&](std::size_t r) { return M[r][cc]; }, [&](std::size_t r, cplx val) { M[r][cc] = val; });
    reflect([&](std::size_t r) { return b[r]; }, [&](std::size_t r, cplx val) { b[r] = val; });
  }
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < p; ++c) {
    dmax = std::max(dmax, std::abs(M[c][c]));
    dmin = std::min(dmin, std::abs(M[c][c]));
  }
  if (p > 0 && !(dmax / dmin < max_condition)) throw error(errc::accuracy, "least squares: ill-conditioned divergence model");
  std::vector<cplx> x(p, 0.0);
  for (std::size_t c = p; c-- > 0;) {
    cplx acc = b[c];
    for (std::size_t cc = c + 1; cc < p; ++cc) acc -= M[c][cc] * x[cc];
    x[c] = acc / M[c][c];
  }
  for (std::size_t c = 0; c < p; ++c) x[c] /= scl[c];
  return x;
}

struct LimFit {
  cplx constant = 0.0;
  std::vector<double> radii;
  std::size_t columns = 0;
};

// Constant term of int_{B(0, mu R)} sigma from a least-squares fit of the
// divergence model {R^{d+n} log^r R, log^{l+1} R, 1} built from the degrees
// and log powers of the non-compact terms.  Beyond the cutoff support the
// model is exact, so moderate radii (geometric grid from r_lo to r_hi) keep
// the divergent samples small and the fitted constant accurate.  Terms with
// Re(d + n) <= min_exponent are left out of the model.
inline LimFit lim_fit(const SymbolExpansion& s, double mu = 1.0, const XEval& xe = {},
                      double min_exponent = -30.0, int min_radii = 24, double r_lo = 4.0, double r_hi = 400.0) {
  int n = s.dimension();
  struct Col { cplx power; int logp; };
  std::vector<Col> cols;
  auto add_col = [&](cplx pw, int lp) {
    for (auto& c : cols)
      if (c.logp == lp && same_degree(c.power, pw)) return;
    cols.push_back({pw, lp});
  };
  for (auto& t : s.terms()) {
    if (t.compact()) continue;
    cplx sp = t.degree + static_cast<double>(n);
    if (std::abs(sp) < 1e-12) {
      for (int r = 1; r <= t.log_power + 1; ++r) add_col(0.0, r);
    } else if (sp.real() > min_exponent) {
      for (int r = 0; r <= t.log_power; ++r) add_col(sp, r);
    }
  }
  int m = std::max<int>(min_radii, static_cast<int>(cols.size()) + 6);
  LimFit fit;
  fit.columns = cols.size() + 1;
  std::vector<std::vector<cplx>> A;
  std::vector<cplx> y;
  for (int i = 0; i < m; ++i) {
    // mu R stays on the fixed grid, so rescaling does not inflate the samples.
    double R = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (m - 1)) / mu;
    fit.radii.push_back(R);
    std::vector<cplx> row{1.0};
    double L = std::log(R);
    for (auto& c : cols) row.push_back(complex_power(R, c.power) * std::pow(L, c.logp));
    A.push_back(row);
    y.push_back(ball_integral_direct(s, mu * R, xe));
  }
  fit.constant = least_squares(A, y)[0];
  return fit;
}

}  // namespace holotrace
