#pragma once

// The core verification suite: one criterion per identity of the engine, each
// made of named checks with explicit tolerances. Shared by the acceptance
// binary and `holotrace verify`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "holotrace/angular.hpp"
#include "holotrace/core.hpp"
#include "holotrace/families.hpp"
#include "holotrace/finitepart.hpp"
#include "holotrace/laurent.hpp"
#include "holotrace/oracle.hpp"
#include "holotrace/series.hpp"
#include "holotrace/symbols.hpp"
#include "holotrace/zeta.hpp"

namespace holotrace::verify {

struct Check {
  std::string name;
  double value = 0.0;  // measured deviation or quantity
  double tolerance = 0.0;
  bool pass = false;
  std::string relation = "<=";  // value <= tolerance, or ">=" for nontriviality
};

struct Criterion {
  Criterion() = default;
  Criterion(std::string id_, std::string title_) : id(std::move(id_)), title(std::move(title_)) {}

  std::string id;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  std::string error;  // set when the criterion threw

  bool pass() const {
    return error.empty() && !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
  const Check* worst() const {
    const Check* w = nullptr;
    double ratio = -1.0;
    for (auto& c : checks) {
      double r = c.relation == "<=" ? (c.tolerance > 0 ? c.value / c.tolerance : (c.value > 0 ? 1e300 : 0.0))
                                    : (c.value > 0 ? c.tolerance / c.value : 1e300);
      if (!c.pass) r += 1e300;
      if (r > ratio) {
        ratio = r;
        w = &c;
      }
    }
    return w;
  }
};

inline void expect_le(Criterion& c, const std::string& name, double value, double tol) {
  c.checks.push_back({name, value, tol, std::isfinite(value) && value <= tol, "<="});
}
inline void expect_ge(Criterion& c, const std::string& name, double value, double lower) {
  c.checks.push_back({name, value, lower, std::isfinite(value) && value >= lower, ">="});
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Homogeneous term psi(|xi|) p(omega) |xi|^d log^l |xi| as a symbol.
inline SymbolExpansion log_term(int n, cplx d, int l, const AngularProfile& p, const std::map<int, cplx>& xc = {{0, 1.0}}) {
  SymbolExpansion s(n, d);
  s.add_term({d, l, Cutoff::psi(), ModeProfile::with_xcoeff(p, xc)});
  return s;
}

inline std::vector<std::pair<std::string, SymbolExpansion>> shipped_symbols_core();

// Appends integrable terms below the threshold offset so that the N-sweep
// moves them between quadrature and the asymptotic split.
inline SymbolExpansion with_tail(const SymbolExpansion& s) {
  int n = s.dimension(), N0 = default_N(s);
  cplx d1 = s.order() - static_cast<double>(N0 + 1), d2 = s.order() - static_cast<double>(N0 + 2);
  AngularProfile p1 = n == 1 ? AngularProfile::pair(0.3, -0.2) : AngularProfile::trig({0.3, 0.1}, {0.0, 0.2});
  AngularProfile p2 = n == 1 ? AngularProfile::pair(0.2, 0.1) : AngularProfile::trig({0.2}, {0.0, 0.0, 0.1});
  SymbolExpansion out = add(s, make_power_symbol(n, d1, p1));
  out = add(out, log_term(n, d2, 1, p2));
  out.set_order(s.order());
  return out;
}

inline std::vector<std::pair<std::string, SymbolExpansion>> shipped_symbols() {
  std::vector<std::pair<std::string, SymbolExpansion>> v = shipped_symbols_core();
  for (auto& [name, s] : v) s = with_tail(s);
  return v;
}

inline std::vector<std::pair<std::string, SymbolExpansion>> shipped_symbols_core() {
  std::vector<std::pair<std::string, SymbolExpansion>> v;
  v.push_back({"n1_inverse", make_power_symbol(1, -1.0)});
  v.push_back({"n1_half_orders", add(make_power_symbol(1, -0.5), make_power_symbol(1, -1.5, 2.0))});
  v.push_back({"n1_log_mixed", add(log_term(1, 1.0, 1, AngularProfile::pair(1.0, 0.5)),
                                   make_power_symbol(1, -1.0, AngularProfile::pair(1.0, -0.25)))});
  v.push_back({"n2_fourier", add(make_power_symbol(2, -1.0, AngularProfile::trig({1.0, 0.0, 0.5}, {0.0, 0.3})),
                                 make_power_symbol(2, -2.0, AngularProfile::trig({1.0, 0.4}, {}))) });
  v.push_back({"n2_complex_order", add(make_power_symbol(2, cplx(-1.3, 0.7), AngularProfile::trig({1.0, 0.2}, {0.0, 0.0, 0.1})),
                                       make_power_symbol(2, cplx(-2.3, 0.7), 0.5))});
  v.push_back({"n2_log_critical", add(add(log_term(2, 0.0, 1, AngularProfile::constant(2, 1.0)),
                                          log_term(2, -2.0, 1, AngularProfile::trig({0.5, 0.0, 0.2}, {}))),
                                      make_power_symbol(2, -2.0, AngularProfile::trig({1.0}, {0.0, 0.6})))});
  return v;
}

// AC1: finite part against the brute-force fit; N-independence.
inline Criterion finite_part_correctness() {
  Criterion c{"AC1", "finite-part correctness"};
  for (auto& [name, s] : shipped_symbols()) {
    cplx fp = finite_part_integral(s);
    cplx fit = lim_fit(s).constant;
    expect_le(c, name + " fp vs LIM fit (rel)", rel(fp, fit), 1e-6);
    int N0 = default_N(s);
    cplx f0 = finite_part_integral(s, N0, {}, TailIntegration::quadrature);
    for (int N : {N0 + 1, N0 + 2})
      expect_le(c, name + " N=" + std::to_string(N0) + " vs N=" + std::to_string(N),
                std::abs(f0 - finite_part_integral(s, N, {}, TailIntegration::quadrature)), 1e-10);
  }
  return c;
}

// AC2: rescaling law.
inline Criterion rescaling_law() {
  Criterion c{"AC2", "rescaling law"};
  auto syms = shipped_symbols();
  for (int idx : {0, 2, 5}) {
    auto& [name, s] = syms[idx];
    for (double mu : {std::exp(1.0), 10.0}) {
      cplx closed = rescaled_finite_part(s, mu);
      cplx fit = lim_fit(s, mu).constant;
      expect_le(c, name + " mu=" + std::to_string(mu) + " closed vs fit", std::abs(closed - fit), 1e-8);
    }
  }
  for (int idx : {1, 4}) {
    auto& [name, s] = syms[idx];
    cplx fp = finite_part_integral(s);
    for (double mu : {std::exp(1.0), 10.0}) {
      expect_le(c, name + " non-integer order: rescaling has no effect", std::abs(rescaled_finite_part(s, mu) - fp), 1e-14);
      expect_le(c, name + " non-integer order: fit at mu", rel(lim_fit(s, mu).constant, fp), 1e-6);
    }
  }
  return c;
}

inline std::vector<LinearMap> random_maps(int count, unsigned seed = 20241014u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<LinearMap> out;
  while (static_cast<int>(out.size()) < count) {
    LinearMap C = LinearMap::from_rows(2, {u(rng), u(rng), u(rng), u(rng), 0, 0, 0, 0, 0});
    if (std::abs(C.det()) >= 0.3) out.push_back(C);
  }
  return out;
}

// AC3: transformation rule under linear maps.
inline Criterion transformation_rule() {
  Criterion c{"AC3", "transformation rule"};
  SymbolExpansion s = add(add(make_power_symbol(2, -2.0, AngularProfile::trig({1.0, 0.5}, {0.0, 0.0, 0.4})),
                              log_term(2, -2.0, 1, AngularProfile::trig({0.3}, {0.0, 0.2}))),
                          make_power_symbol(2, -1.0, AngularProfile::trig({0.7, 0.0, 0.3}, {})));
  int i = 0;
  for (auto& C : random_maps(5)) {
    cplx closed = transform_finite_part(s, C);
    cplx direct = transform_finite_part_direct(s, C);
    expect_le(c, "random C #" + std::to_string(i++) + " closed vs pullback", std::abs(closed - direct), 1e-8);
  }
  // sin(2 theta) is odd under the reflections preserving a diagonal C.
  SymbolExpansion odd = add(make_power_symbol(2, -2.0, AngularProfile::trig({}, {0.0, 0.0, 1.0})),
                            make_power_symbol(2, -1.0, AngularProfile::trig({1.0, 0.0, 0.5}, {})));
  LinearMap D = LinearMap::from_rows(2, {2.0, 0, 0, 0.5, 0, 0, 0, 0, 0});
  LinearMap Dp = LinearMap::from_rows(2, {1.7, 0, 0, 0.9, 0, 0, 0, 0, 0});
  cplx fp = finite_part_integral(odd);
  for (auto& C : {D, Dp}) {
    AngularProfile lg = AngularProfile::general(2, [Ci = C.inverse()](const Vec& w) { return cplx(std::log(norm(Ci.apply(w)))); });
    expect_le(c, "symmetric case: sphere integral of sigma_{-n} log|C^{-1}w|",
              std::abs(odd.component_at(-2.0, 0).times(lg).sphere({})), 1e-12);
    expect_le(c, "symmetric case: invariance |det C| fp sigma(C.)", std::abs(transform_finite_part_direct(odd, C) - fp), 1e-8);
  }
  return c;
}

// sigma(z) = psi|xi|^{-1} (psi|xi|)^{-e(z)}, order -1 - e(z), n = 1.
inline HolomorphicFamily ac4_family(const OrderPath& e) {
  EllipticModelSymbol q(make_power_symbol(1, 1.0));
  return power_family(make_power_symbol(1, -1.0), q, e.transformed(0.0, -1.0));
}

inline std::vector<std::pair<std::string, OrderPath>> ac4_paths() {
  return {{"affine", OrderPath::affine(1.0, 0.0)},
          {"moebius", OrderPath::moebius(0.3)},
          {"quadratic", OrderPath::polynomial({0.0, 1.0, 0.1})}};
}

// AC4: Laurent theorem, analytic vs contour fit.
inline Criterion laurent_theorem(int threads = 1) {
  Criterion c{"AC4", "Laurent theorem"};
  for (auto& [name, e] : ac4_paths()) {
    auto F = ac4_family(e);
    auto A = laurent_expansion(F, 0.0, 3);
    auto E = empirical_laurent(F, 0.0, 3, 0.0, default_ring_points, {}, threads);
    expect_le(c, name + " b1 analytic vs empirical", std::abs(A.residue() - E.residue()), 1e-6);
    for (int k = 0; k <= 3; ++k)
      expect_le(c, name + " c" + std::to_string(k) + " analytic vs empirical", std::abs(A.regular[k] - E.regular[k]), 1e-6);
    for (std::size_t j = 1; j < E.principal.size(); ++j)
      expect_le(c, name + " b" + std::to_string(j + 1) + " vanishes", std::abs(E.principal[j]), 1e-8);
    if (name == "moebius") {
      cplx ap = F.order.derivative(0.0, 1);
      cplx extra = E.regular[0] - finite_part_integral(slice(F, 0.0)) +
                   residue_density(slice(derivative_family(F, 1), 0.0)) / ap;
      expect_le(c, "moebius extra constant term vs mu/pi", std::abs(extra - 0.3 / pi), 1e-8);
    }
  }
  return c;
}

// AC5: residue as pole.
inline Criterion residue_as_pole(int threads = 1) {
  Criterion c{"AC5", "residue as pole"};
  std::vector<std::tuple<std::string, HolomorphicFamily, cplx>> fams;
  for (auto& [name, e] : ac4_paths()) fams.emplace_back(name, ac4_family(e), 0.0);
  EllipticModelSymbol q1(make_power_symbol(1, 1.0));
  fams.emplace_back("psi|xi|^{-z}", power_family(identity_symbol(1), q1, zeta_exponent()), 1.0);
  EllipticModelSymbol q2(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5)));
  fams.emplace_back("q=psi|xi|(1+|xi|^-1/2), z0=0", power_family(identity_symbol(1), q2, zeta_exponent()), 0.0);
  auto F2 = direct_family(2, OrderPath::affine(-2.0, 0.0), {ModeProfile::single(AngularProfile::trig({1.0, 0.5}, {0.0, 0.3}))});
  fams.emplace_back("n=2 trig, z0=1", F2, 1.0);
  for (auto& [name, F, z0] : fams) {
    cplx ap = F.order.derivative(z0, 1);
    cplx formula = -residue_density(slice(F, z0)) / ap;
    auto E = empirical_laurent(F, z0, 0, 0.0, default_ring_points, {}, threads);
    expect_le(c, name + " empirical b1 vs -res/alpha'", std::abs(E.residue() - formula), 1e-10);
  }
  auto F = power_family(identity_symbol(1), q1, zeta_exponent());
  expect_le(c, "psi|xi|^{-z} at z0=1: b1 = 1/pi", std::abs(laurent_expansion(F, 1.0, 0).residue() - 1.0 / pi), 1e-10);
  return c;
}

// AC6: derivative machinery.
inline Criterion derivative_machinery() {
  Criterion c{"AC6", "derivative machinery"};
  // Pure power: sigma(z) = (psi|xi|^2)^{-z}, derivatives (-2)^k log^k.
  EllipticModelSymbol q(make_power_symbol(1, 2.0));
  auto F = power_family(identity_symbol(1), q, zeta_exponent(), 1);
  cplx z0(0.4, 0.1);
  for (int k = 0; k <= 4; ++k) {
    auto rec = component_derivative(F, 0, k, z0);
    double structure = 0.0;
    for (int l = 0; l < k; ++l) structure = std::max(structure, std::abs(rec[l].sphere({})));
    expect_le(c, "recursion k=" + std::to_string(k) + ": lower log powers vanish", structure, 0.0);
    cplx top = rec[k].sphere({}), closed = std::pow(-2.0, k) * (1.0 / pi);
    expect_le(c, "recursion k=" + std::to_string(k) + ": top coefficient vs (-q)^k", std::abs(top - closed), 1e-10);
  }
  // Lower-order terms: recursion vs Bell closed form.
  EllipticModelSymbol q2(add(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5)), make_power_symbol(1, -1.0, AngularProfile::pair(0.2, -0.1))));
  auto G = power_family(make_power_symbol(1, 0.5, AngularProfile::pair(1.0, 0.7)), q2, OrderPath::moebius(0.2).transformed(0.0, -1.0), 4);
  for (int j = 0; j < 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      auto rec = component_derivative(G, j, k, z0);
      auto bell = derivative_component_closed(G, j, k, z0);
      double d = 0.0;
      for (int l = 0; l <= k; ++l) d = std::max(d, std::abs(rec[l].sphere({}) - bell[l].sphere({})));
      expect_le(c, "recursion vs Bell j=" + std::to_string(j) + " k=" + std::to_string(k), d, 1e-10);
    }
  // Transition identity for j != j0 at z near a pole of another component.
  cplx z = 0.3;
  for (int j : {0, 1, 2}) {
    auto f = [&](cplx w) {
      cplx s = G.order(w) + 1.0 - static_cast<double>(j);
      return -G.jets(j, w, 0)[0].sphere({}) / s;
    };
    for (int k = 1; k <= 3; ++k) {
      cplx lhs = cauchy_derivative(f, z, k, 0.05, 32);
      auto comps = component_derivative(G, j, k, z);
      cplx s = G.order(z) + 1.0 - static_cast<double>(j), rhs = 0.0;
      for (int l = 0; l <= k; ++l) rhs += std::pow(-1.0, l + 1) * factorial(l) / std::pow(s, l + 1) * comps[l].sphere({});
      expect_le(c, "transition identity j=" + std::to_string(j) + " k=" + std::to_string(k), std::abs(lhs - rhs), 1e-8);
    }
  }
  return c;
}

// AC7: sphere pushforward and density invariance.
inline Criterion density_invariance() {
  Criterion c{"AC7", "pushforward and density invariance"};
  AngularProfile f = AngularProfile::trig({1.0, 0.3, 0.2}, {0.0, 0.4});
  std::vector<std::tuple<LinearMap, cplx, int>> cases{
      {LinearMap::from_rows(2, {1.5, 0.3, -0.2, 0.8, 0, 0, 0, 0, 0}), 0.0, 0},
      {LinearMap::from_rows(2, {2.0, 0.0, 0.5, 0.7, 0, 0, 0, 0, 0}), cplx(0.5, 0.2), 1},
      {LinearMap::from_rows(2, {0.0, 1.2, -1.1, 0.4, 0, 0, 0, 0, 0}), -0.7, 2},
      {LinearMap::from_rows(2, {-1.3, 0.6, 0.9, 1.1, 0, 0, 0, 0, 0}), cplx(1.0, -0.5), 1}};
  int i = 0;
  for (auto& [T, s, k] : cases) {
    auto r = sphere_pushforward_check(f, T, s, k);
    expect_le(c, "pushforward case " + std::to_string(i++), std::abs(r.lhs - r.rhs), 1e-8);
  }
  auto F1 = direct_family(1, OrderPath::affine(-1.0, 0.0), {ModeProfile::single(AngularProfile::pair(1.0, 0.5))});
  auto d1 = density_invariance_check(F1, 1.0, LinearMap::scalar(1, 2.0));
  expect_le(c, "n=1, C=2: combined density invariant", std::abs(d1.combined_x - d1.combined_y), 1e-8);
  expect_ge(c, "n=1, C=2: |tr_shift| nontrivial", std::abs(d1.tr_shift), 1e-3);
  auto F2 = direct_family(2, OrderPath::affine(-2.0, 0.0), {ModeProfile::single(AngularProfile::trig({1.0, 0.4}, {0.0, 0.0, 0.3}))});
  auto d2 = density_invariance_check(F2, 1.0, LinearMap::from_rows(2, {1.5, 0.3, -0.2, 0.8, 0, 0, 0, 0, 0}));
  expect_le(c, "n=2, general C: combined density invariant", std::abs(d2.combined_x - d2.combined_y), 1e-8);
  expect_ge(c, "n=2, general C: |tr_shift| nontrivial", std::abs(d2.tr_shift), 1e-3);
  return c;
}

// AC8: zeta residues against the spectral oracle.
inline Criterion zeta_suite(int threads = 1) {
  Criterion c{"AC8", "zeta residues vs spectral oracle"};
  EllipticModelSymbol q(make_power_symbol(1, 1.0));
  auto Z = zeta_laurent(identity_symbol(1), q, 1.0, 0, XEval::circle());
  auto H = harmonic_model();
  auto S1 = spectral_laurent(H, 1.0, 0, 0.0, default_ring_points, threads);
  expect_le(c, "TR(Q^{-z}) residue at z=1 vs 2", std::abs(Z.residue() - 2.0), 1e-8);
  expect_le(c, "spectral residue of 2 zeta_R at z=1 vs 2", std::abs(S1.residue() - 2.0), 1e-8);
  for (auto m : {harmonic_model(), shifted_laplacian_model()}) {
    auto F = model_family(m);
    for (auto p : multiplier_pole_candidates(m, -2.0)) {
      if (!(p.real() > -2.0 && p.real() <= 2.0)) continue;
      auto Ls = spectral_laurent(m, p, 0, 0.0, default_ring_points, threads);
      auto Lm = laurent_expansion(F, p, 0, XEval::circle());
      std::string tag = m.name + " z=" + std::to_string(p.real());
      expect_le(c, tag + " spectral vs symbol residue", std::abs(Ls.residue() - Lm.residue()), 1e-8);
      auto D = contour_laurent([&](cplx z) { return multiplier_zeta(m, z) - symbol_zeta(F, z); }, p, 0, Ls.ring_radius,
                               default_ring_points, 3, threads);
      double pp = 0.0;
      for (auto b : D.principal) pp = std::max(pp, std::abs(b));
      expect_le(c, tag + " difference has no principal part", pp, 1e-7);
    }
  }
  return c;
}

// AC9: determinant.
inline Criterion determinant(int threads = 1) {
  Criterion c{"AC9", "zeta determinant"};
  EllipticModelSymbol q1(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5)));
  EllipticModelSymbol q2(add(make_power_symbol(1, 2.0), make_power_symbol(1, 0.0)));
  int i = 1;
  for (auto* q : {&q1, &q2}) {
    auto ld = log_det(*q, XEval::circle());
    auto Z = zeta_at_zero(identity_symbol(1), *q, 1, XEval::circle());
    expect_le(c, "q" + std::to_string(i) + ": log_det vs -c1 of zeta_at_zero", std::abs(ld.general + Z.regular[1]), 1e-8);
    auto F = power_family(identity_symbol(1), *q, zeta_exponent());
    auto E = contour_laurent([&](cplx z) { return finite_part_integral(slice(F, z), XEval::circle()); }, 0.0, 1,
                             default_ring_radius(F, 0.0), default_ring_points, 3, threads);
    expect_le(c, "q" + std::to_string(i) + ": log_det vs -zeta'(0) contour fit", std::abs(ld.general + E.regular[1]), 1e-7);
    ++i;
  }
  auto ld = log_det(q2, XEval::circle());
  expect_le(c, "q2 = psi(|xi|^2+1): even-even branch selected", ld.branch == "even-even" ? 0.0 : 1.0, 0.0);
  expect_le(c, "q2: res_0(log^2 q) vanishes pointwise", std::abs(residue_density(log_symbol(q2, 2))), 1e-14);
  expect_le(c, "q2: branch value TR(log q) vs general formula", std::abs(ld.value - ld.general), 1e-12);
  return c;
}

inline SymbolExpansion trig_symbol_a() {
  // e^{ix} psi|xi| + 0.5 e^{-2ix} psi + 0.2 e^{ix} psi|xi|^{-1}
  SymbolExpansion a = make_power_symbol(1, 1.0, AngularProfile::constant(1, 1.0), {{1, 1.0}});
  a = add(a, make_power_symbol(1, 0.0, AngularProfile::constant(1, 1.0), {{-2, 0.5}}));
  return add(a, make_power_symbol(1, -1.0, AngularProfile::pair(0.2, 0.1), {{1, 1.0}}));
}

inline SymbolExpansion trig_symbol_b() {
  // e^{-ix} + 0.3 e^{2ix} psi|xi|^{-1}
  SymbolExpansion b = make_polynomial_symbol(1, 0, AngularProfile::constant(1, 1.0), {{-1, 1.0}});
  return add(b, make_power_symbol(1, -1.0, AngularProfile::pair(0.3, -0.3), {{2, 1.0}, {-1, 0.2}}));
}

// AC10: commutator and trace defects.
inline Criterion commutator_defects() {
  Criterion c{"AC10", "commutator defects"};
  SymbolExpansion a = trig_symbol_a(), b = trig_symbol_b();
  EllipticModelSymbol q(make_power_symbol(1, 1.0));
  EllipticModelSymbol q_sq(make_power_symbol(1, 2.0));
  cplx d1 = commutator_defect(a, b, q), d2 = commutator_defect(a, b, q_sq);
  expect_le(c, "defect with q", std::abs(d1), 1e-6);
  expect_le(c, "defect drift q -> q^2", std::abs(d1 - d2), 1e-6);
  auto td = trace_defect(a, b, q);
  expect_le(c, "trace defect: local vs global expression", std::abs(td.local - td.global), 1e-6);
  expect_le(c, "res(a[b,log q]) vs res([a,b]log q - [a,b log q])", std::abs(td.res_bracket - td.res_combined), 1e-8);
  expect_ge(c, "trace defect nontrivial", std::abs(td.tr_commutator), 1e-3);
  SymbolExpansion u = make_polynomial_symbol(1, 0, AngularProfile::constant(1, 1.0), {{1, 1.0}});
  SymbolExpansion ui = make_polynomial_symbol(1, 0, AngularProfile::constant(1, 1.0), {{-1, 1.0}});
  auto ti = trace_defect(u, ui, q);
  expect_le(c, "index case: res([a, b log q])", std::abs(ti.res_a_blog), 1e-8);
  expect_le(c, "index case: res(a[b, log q])", std::abs(ti.res_bracket), 1e-8);
  return c;
}

// AC11: vanishing properties.
inline Criterion vanishing_properties() {
  Criterion c{"AC11", "vanishing properties"};
  std::vector<std::pair<std::string, SymbolExpansion>> polys{
      {"n=1 degree 0", make_polynomial_symbol(1, 0, AngularProfile::constant(1, 3.0))},
      {"n=1 degree 3", make_polynomial_symbol(1, 3, AngularProfile::pair(1.0, -1.0))},
      {"n=2 degree 2", make_polynomial_symbol(2, 2, AngularProfile::trig({1.0, 0.0, 0.5}, {0.0, 0.0, 2.0}))},
      {"n=3 degree 1", make_polynomial_symbol(3, 1, AngularProfile::general(3, [](const Vec& w) { return cplx(w[0] - 2.0 * w[2]); }))}};
  for (auto& [name, s] : polys) expect_le(c, "fp of polynomial " + name + " is exactly 0", std::abs(finite_part_integral(s)), 0.0);
  auto syms = shipped_symbols();
  for (int idx : {1, 4}) {
    expect_le(c, syms[idx].first + ": residue exactly 0", std::abs(residue_density(syms[idx].second)), 0.0);
    expect_le(c, syms[idx].first + ": log residue l=1 exactly 0", std::abs(log_residue(syms[idx].second, 1)), 0.0);
  }
  SymbolExpansion a = trig_symbol_a(), b = trig_symbol_b();
  int depth = 6;
  cplx r = residue_density(subtract(compose(a, b, depth), compose(b, a, depth)), XEval::circle());
  expect_le(c, "res(ab - ba) on S^1", std::abs(r), 1e-8);
  expect_ge(c, "res(ab - ba) pointwise at x = 0.3 is nonzero",
            std::abs(residue_density(subtract(compose(a, b, depth), compose(b, a, depth)), XEval::at(0.3))), 1e-3);
  SymbolExpansion a2 = add(make_power_symbol(1, 0.0, AngularProfile::pair(1.0, 0.4), {{1, 1.0}, {0, 2.0}}),
                           make_power_symbol(1, -1.0, AngularProfile::constant(1, 1.0), {{-1, 0.7}}));
  SymbolExpansion b2 = add(make_power_symbol(1, 1.0, AngularProfile::pair(1.0, -0.5), {{-1, 1.0}, {2, 0.3}}),
                           make_power_symbol(1, -1.0, AngularProfile::constant(1, 1.0), {{1, 1.0}}));
  cplx r2 = residue_density(subtract(compose(a2, b2, depth), compose(b2, a2, depth)), XEval::circle());
  expect_le(c, "res(ab - ba) on S^1, second pair", std::abs(r2), 1e-8);
  return c;
}

inline Criterion timed(const std::string& id, const std::string& title, const std::function<Criterion()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  try {
    c = f();
  } catch (const std::exception& e) {
    c = Criterion{id, title};
    c.error = e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline std::vector<Criterion> core_suite(int threads = 1) {
  std::vector<Criterion> out;
  out.push_back(timed("AC1", "finite-part correctness", finite_part_correctness));
  out.push_back(timed("AC2", "rescaling law", rescaling_law));
  out.push_back(timed("AC3", "transformation rule", transformation_rule));
  out.push_back(timed("AC4", "Laurent theorem", [&] { return laurent_theorem(threads); }));
  out.push_back(timed("AC5", "residue as pole", [&] { return residue_as_pole(threads); }));
  out.push_back(timed("AC6", "derivative machinery", derivative_machinery));
  out.push_back(timed("AC7", "pushforward and density invariance", density_invariance));
  out.push_back(timed("AC8", "zeta residues vs spectral oracle", [&] { return zeta_suite(threads); }));
  out.push_back(timed("AC9", "zeta determinant", [&] { return determinant(threads); }));
  out.push_back(timed("AC10", "commutator defects", commutator_defects));
  out.push_back(timed("AC11", "vanishing properties", vanishing_properties));
  return out;
}

}  // namespace holotrace::verify
