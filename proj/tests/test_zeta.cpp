#include <catch_amalgamated.hpp>

#include "holotrace/hurwitz.hpp"
#include "holotrace/verify.hpp"
#include "holotrace/zeta.hpp"

using namespace holotrace;

namespace {

EllipticModelSymbol q_abs() { return EllipticModelSymbol(make_power_symbol(1, 1.0)); }
// psi|xi| (1 + |xi|^{-1}/2)
EllipticModelSymbol q_shift() { return EllipticModelSymbol(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5))); }

SymbolExpansion multiplier(int mode) {
  return make_polynomial_symbol(1, 0, AngularProfile::constant(1, 1.0), {{mode, 1.0}});
}

// (1/pi) int_0^1 (psi(r) - 1) r^p dr by composite Simpson (test-side oracle).
double smoothing_trace(int p) {
  auto psi = [](double r) {
    if (r <= 0.25) return 0.0;
    double t = (r - 0.25) / 0.75;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  };
  double total = -std::pow(0.25, p + 1) / (p + 1.0);
  const int M = 20000;
  double h = 0.75 / M, s = 0.0;
  for (int i = 0; i <= M; ++i) {
    double r = 0.25 + i * h;
    double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * (psi(r) - 1.0) * std::pow(r, p);
  }
  return (total + s * h / 3.0) / pi;
}

// (1/(2 pi)) int_{1/4}^1 psi(r) (-log r)^k r^p dr by composite Simpson.
double psi_moment(double p, int k) {
  auto psi = [](double r) {
    double t = (r - 0.25) / 0.75;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  };
  const int M = 20000;
  double h = 0.75 / M, s = 0.0;
  for (int i = 0; i <= M; ++i) {
    double r = 0.25 + i * h;
    double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * psi(r) * std::pow(-std::log(r), k) * std::pow(r, p);
  }
  return s * h / 3.0 / (2.0 * pi);
}

}  // namespace

TEST_CASE("Riemann zeta special values", "[zeta][hurwitz]") {
  CHECK(std::abs(riemann_zeta(2.0) - pi * pi / 6.0) < 1e-13);
  CHECK(std::abs(riemann_zeta(3.0) - 1.2020569031595942854) < 1e-13);
  CHECK(std::abs(riemann_zeta(0.5) + 1.4603545088095868129) < 1e-12);
  CHECK(std::abs(riemann_zeta(0.0) + 0.5) < 1e-13);
  CHECK(std::abs(riemann_zeta(-1.0) + 1.0 / 12.0) < 1e-13);
  CHECK(std::abs(riemann_zeta(-3.0) - 1.0 / 120.0) < 1e-13);
  // five-point stencil, truncation O(h^4)
  double h = 1e-3;
  cplx d = (8.0 * (riemann_zeta(h) - riemann_zeta(-h)) - (riemann_zeta(2.0 * h) - riemann_zeta(-2.0 * h))) / (12.0 * h);
  CHECK(std::abs(d + 0.5 * std::log(2.0 * pi)) < 1e-10);
}

TEST_CASE("Hurwitz zeta recurrence and a = 1", "[zeta][hurwitz][property]") {
  for (cplx s : {cplx(2.5, 0.0), cplx(0.3, 4.0), cplx(-1.5, 0.5), cplx(-4.2, -2.0), cplx(6.0, 10.0)})
    for (double a : {0.3, 1.0, 2.7}) {
      INFO("s = " << s << " a = " << a);
      cplx lhs = hurwitz_zeta(s, a), rhs = hurwitz_zeta(s, a + 1.0) + std::exp(-s * std::log(a));
      CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  CHECK(riemann_zeta(cplx(0.4, 2.0)) == hurwitz_zeta(cplx(0.4, 2.0), 1.0));
  // zeta_H(s, 1/2) = (2^s - 1) zeta_R(s)
  cplx s(1.7, 0.6);
  CHECK(std::abs(hurwitz_zeta(s, 0.5) - (std::exp(s * std::log(2.0)) - 1.0) * riemann_zeta(s)) < 1e-12);
}

TEST_CASE("model symbol admissibility", "[zeta]") {
  CHECK_THROWS_AS(EllipticModelSymbol(make_power_symbol(1, -1.0)), error);
  CHECK_THROWS_AS(EllipticModelSymbol(make_power_symbol(1, cplx(1.0, 0.5))), error);
  CHECK_THROWS_AS(EllipticModelSymbol(make_power_symbol(2, 1.0, AngularProfile::trig({1.0, 0.5}, {}))), error);
  CHECK_THROWS_AS(EllipticModelSymbol(make_power_symbol(1, 1.0, AngularProfile::constant(1, 1.0), {{1, 1.0}})), error);
  auto q = q_shift();
  CHECK(q.order() == 1.0);
  CHECK(q.leading_coefficient() == 1.0);
  REQUIRE(q.lower().size() == 1);
  CHECK(std::abs(q.lower()[0].mode_value(0, Vec{1.0, 0, 0}) - 0.5) < 1e-15);
}

TEST_CASE("complex powers of the model symbol", "[zeta]") {
  CHECK(std::abs(slice(power_family(identity_symbol(1), q_shift(), OrderPath::affine(0.0, 0.0)), 0.3).evaluate(0.0, 7.0) - 1.0) < 1e-14);
  // depth 3: q^{-1} matches the pointwise reciprocal to O(|xi|^{-4})
  auto F = power_family(identity_symbol(1), q_shift(), zeta_exponent(), 3);
  auto s = slice(F, 1.0);
  for (double xi : {4.0, 8.0, 16.0}) {
    double exact = 1.0 / (xi * (1.0 + 0.5 / xi));
    CHECK(std::abs(s.evaluate(0.0, xi) - exact) < 0.2 * std::pow(xi, -4.0));
  }
}

TEST_CASE("log symbols", "[zeta]") {
  auto q = q_abs();
  CHECK(std::abs(log_symbol(q, 0).evaluate(0.0, 3.0) - 1.0) < 1e-15);
  for (double xi : {2.0, -5.0, 30.0}) {
    CHECK(std::abs(log_symbol(q, 1).evaluate(0.0, xi) - std::log(std::abs(xi))) < 1e-13);
    CHECK(std::abs(log_symbol(q, 2).evaluate(0.0, xi) - std::pow(std::log(std::abs(xi)), 2)) < 1e-12);
  }
  // lower-order terms: log(|xi| + 1/2) to depth 6
  auto L = log_symbol(q_shift(), 1, 6);
  CHECK(std::abs(L.evaluate(0.0, 20.0) - std::log(20.5)) < 1e-8);
  CHECK_THROWS_AS(log_symbol(q, -1), error);
}

TEST_CASE("zeta residue at z = 1 on the circle", "[zeta]") {
  auto Z = zeta_laurent(identity_symbol(1), q_abs(), 1.0, 0, XEval::circle());
  CHECK(std::abs(Z.residue() - 2.0) < 1e-13);
}

TEST_CASE("integer-order amplitude: pole at zero is res(a)/q", "[zeta]") {
  EllipticModelSymbol q2(make_power_symbol(1, 2.0));
  auto a = make_power_symbol(1, -1.0, AngularProfile::pair(1.0, 0.4));
  auto Z = zeta_at_zero(a, q2, 1);
  REQUIRE(Z.principal.size() == 1);
  CHECK(std::abs(Z.residue() - residue_density(a) / 2.0) < 1e-14);
  CHECK(std::abs(Z.residue() - 0.7 / pi / 2.0) < 1e-14);
}

TEST_CASE("non-integer-order amplitude: c_k = (-1)^k TR(a log^k q)", "[zeta][property]") {
  // a = psi|xi|^{-1/2} p, q = psi|xi|: TR(a q^{-z}) = S_p [int psi r^{-1/2-z} dr - 1/(1/2 - z)], so
  //   c_k = S_p [int psi (-log r)^k r^{-1/2} dr - k! 2^{k+1}].
  auto prof = AngularProfile::pair(1.0, 0.3);
  auto a = make_power_symbol(1, -0.5, prof);
  auto Z = zeta_at_zero(a, q_abs(), 3);
  CHECK(Z.principal.empty());
  CHECK(Z.regular[0] == finite_part_integral(a));
  double Sp = 1.3 / (2.0 * pi), fact = 1.0;
  for (int k = 0; k <= 3; ++k) {
    if (k > 0) fact *= k;
    INFO("k = " << k);
    double expect = Sp * (2.0 * pi * psi_moment(-0.5, k) - fact * std::pow(2.0, k + 1));
    CHECK(std::abs(Z.regular[k] - expect) < 1e-10);
    // TR(a log^k q) from a single-cutoff log-homogeneous symbol
    SymbolExpansion alog(1, -0.5);
    alog.add_term({-0.5, k, Cutoff::psi(), ModeProfile::single(prof)});
    CHECK(std::abs(Z.regular[k] - (k % 2 ? -1.0 : 1.0) * finite_part_integral(alog)) < 1e-12);
  }
  CHECK(zeta_at_zero(a, q_shift(), 2, {}, 8).principal.empty());
}

TEST_CASE("differential amplitude: c_0 = -(1/q) res(a log q) up to the cutoff trace", "[zeta]") {
  // The psi-extended family differs from the differential operator by the
  // smoothing symbol (psi - 1) a, whose trace is added back here.
  auto q = q_shift();
  auto a = make_polynomial_symbol(1, 2, AngularProfile::constant(1, 1.0));
  int depth = 6;
  auto Z = zeta_at_zero(a, q, 0, {}, depth);
  cplx res = residue_density(compose(a, log_symbol(q, 1, depth), depth));
  // log(|xi| + 1/2) = log|xi| + t - t^2/2 + t^3/3 - ..., t = 1/(2|xi|): xi^2 t^3/3 = 1/(24|xi|)
  CHECK(std::abs(res - 1.0 / (24.0 * pi)) < 1e-14);
  CHECK(std::abs(Z.regular[0] - (smoothing_trace(2) - res / q.order())) < 1e-10);
}

TEST_CASE("zeta near a negative integer for q^m", "[zeta]") {
  // sigma(-1) = q; c_0 = fp q - (1/q) res(q log q) with q log q built by composition.
  auto q = q_shift();
  int depth = 6;
  auto Z = zeta_laurent(identity_symbol(1), q, -1.0, 0, {}, depth);
  auto F = power_family(identity_symbol(1), q, zeta_exponent(), depth);
  cplx qlogq = residue_density(compose(q.symbol(), log_symbol(q, 1, depth), depth));
  CHECK(std::abs(Z.regular[0] - (finite_part_integral(slice(F, -1.0)) - qlogq / q.order())) < 1e-10);
  // pole coefficient of TR(q^{-z}) at -1 is res(q^{1})/q: the degree -1 part of |xi| + 1/2 is 0
  CHECK(std::abs(Z.residue()) < 1e-14);
}

TEST_CASE("kernel data shifts the regular coefficients", "[zeta]") {
  auto q0 = EllipticModelSymbol(make_power_symbol(1, 1.0), pi, KernelData{1, {0.7, 0.2}});
  auto Z0 = zeta_at_zero(identity_symbol(1), q_abs(), 1);
  auto Z1 = zeta_at_zero(identity_symbol(1), q0, 1);
  CHECK(std::abs(Z0.regular[0] - 0.7 - Z1.regular[0]) < 1e-14);
  CHECK(std::abs(Z0.regular[1] + 0.2 - Z1.regular[1]) < 1e-14);
  auto qbad = EllipticModelSymbol(make_power_symbol(1, 1.0), pi, KernelData{1, {}});
  CHECK_THROWS_AS(zeta_at_zero(identity_symbol(1), qbad, 1), error);
  CHECK_THROWS_AS(log_det(q0), error);
}

TEST_CASE("poles lie in (alpha - j)/q", "[zeta][property]") {
  EllipticModelSymbol q2(add(make_power_symbol(1, 2.0), make_power_symbol(1, 0.0)));
  auto a = make_power_symbol(1, 0.5);
  auto F = power_family(a, q2, zeta_exponent(), 6);
  for (auto z : pole_set(F, 0.0, 2.5)) {
    // alpha(z) - j = -1 with alpha(z) = 1/2 - 2z, so z = (3/2 - j)/2 for an integer j >= 0
    double j = std::round(1.5 - 2.0 * z.real());
    CHECK(j >= 0.0);
    CHECK(std::abs(z - (1.5 - j) / 2.0) < 1e-10);
  }
}

TEST_CASE("log determinant", "[zeta]") {
  for (auto q : {q_abs(), q_shift()}) {
    auto ld = log_det(q, XEval::circle());
    auto F = power_family(identity_symbol(1), q, zeta_exponent());
    auto E = contour_laurent([&](cplx z) { return finite_part_integral(slice(F, z), XEval::circle()); }, 0.0, 1, 0.25, 64, 3);
    CHECK(std::abs(ld.value + E.regular[1]) < 1e-7);
  }
  // pure power: log^2|xi| has no degree -1 part, so log det = TR(log q)
  auto ld = log_det(q_abs());
  CHECK(ld.residue_term == cplx(0.0));
  CHECK(ld.value == ld.tr_log);
  CHECK(ld.branch == "general");

  EllipticModelSymbol q2(add(make_power_symbol(1, 2.0), make_power_symbol(1, 0.0)));
  auto l2 = log_det(q2, XEval::circle());
  CHECK(l2.branch == "even-even");
  CHECK(l2.value == l2.tr_log);
}

TEST_CASE("commutator defects", "[zeta]") {
  auto q = q_abs();
  EllipticModelSymbol q2(make_power_symbol(1, 2.0));
  // x-independent pair
  auto u = add(make_power_symbol(1, 1.0), make_power_symbol(1, -1.0, 0.5));
  auto v = make_power_symbol(1, 0.5, AngularProfile::pair(1.0, 2.0));
  CHECK(std::abs(commutator_defect(u, v, q)) < 1e-14);
  auto tv = trace_defect(u, v, q);
  CHECK(std::abs(tv.local) < 1e-14);
  CHECK(std::abs(tv.global) < 1e-14);

  // non-integer total order: TR([A, B]) = 0
  auto a = make_power_symbol(1, 0.25, AngularProfile::pair(1.0, 0.5), {{1, 1.0}});
  auto b = make_power_symbol(1, 0.5, AngularProfile::constant(1, 1.0), {{-1, 1.0}, {2, 0.3}});
  auto tn = trace_defect(a, b, q);
  CHECK(std::abs(tn.tr_commutator) < 1e-9);
  CHECK(std::abs(tn.res_a_blog - q.order() * tn.tr_commutator) < 1e-9);

  // integer-order pair: defect vanishes and does not depend on Q
  auto A = verify::trig_symbol_a(), B = verify::trig_symbol_b();
  cplx d1 = commutator_defect(A, B, q), d2 = commutator_defect(A, B, q2);
  CHECK(std::abs(d1) < 1e-6);
  CHECK(std::abs(d1 - d2) < 1e-6);

  // multipliers
  auto ta = trace_defect(multiplier(1), multiplier(2), q);
  CHECK(std::abs(ta.local) < 1e-14);
  CHECK(std::abs(ta.global) < 1e-14);
  CHECK(std::abs(ta.res_a_blog) < 1e-14);

  // index zero: a = e^{ix}, b = e^{-ix}
  auto ti = trace_defect(multiplier(1), multiplier(-1), q);
  CHECK(std::abs(ti.res_a_blog) < 1e-8);
  CHECK(std::abs(ti.res_bracket) < 1e-8);
}

TEST_CASE("log q is conjugation invariant under residues", "[zeta][property]") {
  auto q = q_shift();
  int depth = 6;
  auto L = log_symbol(q, 1, depth);
  for (int m : {1, -2, 3}) {
    auto c = compose(multiplier(-m), compose(L, multiplier(m), depth), depth);
    for (double x : {0.0, 0.4, 2.0}) CHECK(std::abs(residue_density(c, XEval::at(x)) - residue_density(L, XEval::at(x))) < 1e-8);
  }
}
