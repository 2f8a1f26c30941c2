#include <catch_amalgamated.hpp>

#include "holotrace/finitepart.hpp"
#include "holotrace/verify.hpp"

using namespace holotrace;

namespace {

// Frozen from 30-digit quadrature of the quintic-smoothstep cutoff on [1/4, 1]:
//   I_a = int psi(r) r^a dr, I_log = int psi(r) log(r)/r dr.
constexpr double I_inv = 0.49745882749833507302;  // I_{-1}
constexpr double I_log = -0.15236152834548559318;
constexpr double FP_INV = 0.15834606276211699425;     // I_{-1}/pi
constexpr double FP_INV2 = 0.53927350071050661598;    // (I_{-2} + 1)/pi
constexpr double FP_HALF = -0.49992338848739574943;   // (I_{-1/2} - 2)/pi
constexpr double FP_LOG = -0.048498180746439915390;   // I_log/pi

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SymbolExpansion log_symbol(int n, double d, int l, double c = 1.0) {
  SymbolExpansion s(n, d);
  s.add_term({d, l, Cutoff::psi(), ModeProfile::single(AngularProfile::constant(n, c))});
  return s;
}

}  // namespace

TEST_CASE("frozen cutoff integrals are consistent", "[finitepart]") {
  CHECK(std::abs(FP_INV - I_inv / pi) < 1e-15);
  CHECK(std::abs(FP_LOG - I_log / pi) < 1e-15);
}

TEST_CASE("psi|xi|^{-1} in n = 1", "[finitepart]") {
  auto s = make_power_symbol(1, -1.0);
  auto r = asymptotic_expansion(s);
  REQUIRE(r.divergence_table.size() == 1);
  CHECK(r.divergence_table[0].pure_log);
  CHECK(r.divergence_table[0].log_exponent == 1);
  CHECK(std::abs(r.divergence_table[0].coefficient - 1.0 / pi) < 1e-14);
  CHECK(std::abs(r.finite_part - FP_INV) < 1e-12);
  CHECK(std::abs(finite_part_integral(s) - FP_INV) < 1e-12);
  CHECK(rel_err(lim_fit(s).constant, FP_INV) < 1e-6);
}

TEST_CASE("psi|xi|^{-2} in n = 1 is an ordinary integral", "[finitepart]") {
  auto s = make_power_symbol(1, -2.0);
  auto r = asymptotic_expansion(s);
  for (auto& e : r.divergence_table) CHECK((!e.pure_log && e.power.real() < 0.0));
  CHECK(std::abs(r.finite_part - FP_INV2) < 1e-12);
  CHECK(std::abs(ball_integral_direct(s, 1e6) - FP_INV2) < 1e-6);
}

TEST_CASE("psi|xi|^{-1} log|xi| gives half the residue on log^2 R", "[finitepart]") {
  auto s = log_symbol(1, -1.0, 1);
  auto r = asymptotic_expansion(s);
  REQUIRE(r.divergence_table.size() == 1);
  CHECK(r.divergence_table[0].log_exponent == 2);
  CHECK(std::abs(r.divergence_table[0].coefficient - 0.5 / pi) < 1e-14);
  CHECK(std::abs(r.finite_part - FP_LOG) < 1e-12);
  CHECK(residue_density(s) == cplx(0.0));
  CHECK(std::abs(log_residue(s, 1) - 1.0 / pi) < 1e-14);
}

TEST_CASE("psi|xi|^{-1/2} against the brute-force fit", "[finitepart]") {
  auto s = make_power_symbol(1, -0.5);
  CHECK(std::abs(finite_part_integral(s) - FP_HALF) < 1e-12);
  CHECK(rel_err(lim_fit(s).constant, FP_HALF) < 1e-6);
  auto r = asymptotic_expansion(s);
  REQUIRE(r.divergence_table.size() == 1);
  // R^{1/2} coefficient: 1/(d + n) times the sphere integral
  CHECK(std::abs(r.divergence_table[0].coefficient - 2.0 / pi) < 1e-14);
}

TEST_CASE("divergence coefficients of R^s log^i R", "[finitepart]") {
  // int_1^R r^{s-1} log^2 r dr = R^s (L^2/s - 2L/s^2 + 2/s^3) - 2/s^3
  double d = 0.5;
  auto s = log_symbol(1, d, 2);
  auto r = asymptotic_expansion(s);
  double sp = d + 1.0, S = 1.0 / pi;
  std::map<int, double> expect{{2, S / sp}, {1, -2.0 * S / (sp * sp)}, {0, 2.0 * S / (sp * sp * sp)}};
  REQUIRE(r.divergence_table.size() == 3);
  for (auto& e : r.divergence_table) CHECK(std::abs(e.coefficient - expect.at(e.log_exponent)) < 1e-14);
}

TEST_CASE("polynomial symbols and zero", "[finitepart]") {
  CHECK(finite_part_integral(make_polynomial_symbol(1, 2, AngularProfile::constant(1, 1.0))) == cplx(0.0));
  CHECK(finite_part_integral(zero_symbol(1)) == cplx(0.0));
  CHECK(residue_density(make_power_symbol(2, cplx(0.5, 1.0))) == cplx(0.0));
}

TEST_CASE("rescaling law", "[finitepart]") {
  auto s = make_power_symbol(1, -1.0);
  CHECK(rescaled_finite_part(s, 1.0) == finite_part_integral(s));
  CHECK(std::abs(rescaled_finite_part(s, std::exp(1.0)) - (FP_INV + 1.0 / pi)) < 1e-12);
  auto h = make_power_symbol(1, -0.5);
  CHECK(rescaled_finite_part(h, 7.0) == finite_part_integral(h));
  CHECK_THROWS_AS(rescaled_finite_part(s, -1.0), error);
}

TEST_CASE("linear change of variables", "[finitepart]") {
  auto s1 = make_power_symbol(1, -1.0, AngularProfile::pair(1.0, 0.4));
  LinearMap I1 = LinearMap::identity(1);
  CHECK(std::abs(transform_finite_part(s1, I1) - finite_part_integral(s1)) < 1e-14);
  for (double mu : {0.5, 2.0, 3.0}) {
    LinearMap C = LinearMap::from_rows(1, {mu, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(std::abs(transform_finite_part(s1, C) - rescaled_finite_part(s1, mu)) < 1e-13);
  }

  // n = 2, C = diag(2, 1): the correction is -(1/(2 pi)) log(3/4) because
  // int_0^{2 pi} log sqrt(a^2 cos^2 + b^2 sin^2) = 2 pi log((a + b)/2).
  auto s = make_power_symbol(2, -2.0);
  LinearMap C = LinearMap::from_rows(2, {2, 0, 0, 1, 0, 0, 0, 0, 0});
  double fp = I_inv / (2.0 * pi);
  double expect = fp - std::log(0.75) / (2.0 * pi);
  CHECK(std::abs(finite_part_integral(s) - fp) < 1e-12);
  CHECK(std::abs(transform_finite_part(s, C) - expect) < 1e-10);
  CHECK(std::abs(transform_finite_part_direct(s, C) - expect) < 1e-8);
}

TEST_CASE("sphere pushforward lemma", "[finitepart]") {
  auto one = AngularProfile::constant(2, 1.0);
  auto f = AngularProfile::trig({1.0, 0.0, 0.5}, {0.0, 0.3});
  auto id = LinearMap::identity(2);
  auto r0 = sphere_pushforward_check(f, id, 0.0, 0);
  CHECK(std::abs(r0.lhs - sphere_integral(f)) < 1e-13);
  CHECK(std::abs(r0.rhs - sphere_integral(f)) < 1e-13);

  double th = 0.7;
  auto rot = LinearMap::from_rows(2, {std::cos(th), -std::sin(th), std::sin(th), std::cos(th), 0, 0, 0, 0, 0});
  auto r1 = sphere_pushforward_check(f, rot, 0.0, 0);
  CHECK(std::abs(r1.lhs - sphere_integral(f)) < 1e-12);
  CHECK(std::abs(r1.rhs - sphere_integral(f)) < 1e-12);

  // rhs closed form: -(1/2) (2 pi)^{-2} 2 pi log(3/4)
  auto T = LinearMap::from_rows(2, {2, 0, 0, 1, 0, 0, 0, 0, 0});
  auto r2 = sphere_pushforward_check(one, T, 0.0, 1);
  CHECK(std::abs(r2.lhs - r2.rhs) < 1e-8);
  CHECK(std::abs(r2.rhs + std::log(0.75) / (4.0 * pi)) < 1e-10);

  auto r3 = sphere_pushforward_check(f, T, cplx(0.3, 0.2), 2);
  CHECK(std::abs(r3.lhs - r3.rhs) < 1e-8);
}

TEST_CASE("the finite part does not depend on N", "[finitepart][property]") {
  for (auto& [name, s] : verify::shipped_symbols()) {
    int N0 = default_N(s);
    cplx f0 = finite_part_integral(s, N0, {}, TailIntegration::quadrature);
    for (int N : {N0 + 1, N0 + 2}) {
      INFO(name << " N = " << N);
      CHECK(rel_err(finite_part_integral(s, N, {}, TailIntegration::quadrature), f0) < 1e-10);
    }
    CHECK_THROWS_AS(finite_part_integral(s, N0 - 1), error);
  }
}

TEST_CASE("pure-log coefficients are the log residues over l + 1", "[finitepart][property]") {
  for (auto& [name, s] : verify::shipped_symbols()) {
    INFO(name);
    auto r = asymptotic_expansion(s);
    for (auto& e : r.divergence_table)
      if (e.pure_log) CHECK(std::abs(e.coefficient - log_residue(s, e.log_exponent - 1) / static_cast<double>(e.log_exponent)) < 1e-10);
  }
}

TEST_CASE("the finite part does not depend on the interior cutoff", "[finitepart][property]") {
  // psi_{1/4} |xi|^d = psi_{1/2} |xi|^d + (psi_{1/4} - psi_{1/2}) |xi|^d, the last piece compact.
  for (cplx d : {cplx(-1.0), cplx(-0.5), cplx(0.3, 0.7), cplx(-2.0)}) {
    auto prof = AngularProfile::pair(1.0, 0.6);
    auto a = make_power_symbol(1, d, prof);
    SymbolExpansion b(1, d);
    b.add_term({d, 0, Cutoff::psi(0.5), ModeProfile::single(prof)});
    RemainderPiece p;
    p.value = [d, prof](const Vec& xi) {
      double r = norm(xi);
      double w = cutoff_value(r, 0.25, 0) - cutoff_value(r, 0.5, 0);
      return w == 0.0 ? cplx(0.0) : w * complex_power(r, d) * prof(unit_direction(xi, r));
    };
    p.support = 1.0;
    p.ray_breaks = [](const Vec&) { return std::vector<double>{0.25, 0.5, 1.0}; };
    p.origin = "cutoff-difference";
    b.add_piece(p);
    INFO("d = " << d);
    CHECK(rel_err(finite_part_integral(b), finite_part_integral(a)) < 1e-9);
  }
}

TEST_CASE("the finite part is linear", "[finitepart][property]") {
  auto syms = verify::shipped_symbols_core();
  for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
    auto& a = syms[i].second;
    auto& b = syms[i + 1].second;
    if (a.dimension() != b.dimension()) continue;
    INFO(syms[i].first << " + " << syms[i + 1].first);
    CHECK(std::abs(finite_part_integral(add(a, b)) - finite_part_integral(a) - finite_part_integral(b)) < 1e-11);
  }
}
