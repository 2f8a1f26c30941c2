#include <catch_amalgamated.hpp>

#include "holotrace/laurent.hpp"
#include "holotrace/verify.hpp"
#include "holotrace/zeta.hpp"

using namespace holotrace;

namespace {

// fp int psi|xi|^{-z} = (1/pi) [int_{1/4}^1 psi r^{-z} dr + 1/(z - 1)], so at
// z0 = 1 the regular coefficients are (1/pi) int psi (-log r)^k / r dr.
// Frozen from 30-digit quadrature.
constexpr double C_AT_ONE[4] = {0.15834606276211699425, 0.048498180746439915390, 0.022860688290998743641,
                                0.013453959401134229839};

HolomorphicFamily abs_power() {
  return power_family(identity_symbol(1), EllipticModelSymbol(make_power_symbol(1, 1.0)), zeta_exponent());
}

// Test-side oracle for the same coefficients: composite Simpson on [1/4, 1].
double simpson_coefficient(int k) {
  auto psi = [](double r) {
    double t = (r - 0.25) / 0.75;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  };
  const int M = 20000;
  double h = 0.75 / M, s = 0.0;
  for (int i = 0; i <= M; ++i) {
    double r = 0.25 + i * h;
    double w = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * psi(r) * std::pow(-std::log(r), k) / r;
  }
  return s * h / 3.0 / pi;
}

}  // namespace

TEST_CASE("frozen coefficients match the test-side quadrature", "[laurent]") {
  for (int k = 0; k < 4; ++k) CHECK(std::abs(simpson_coefficient(k) - C_AT_ONE[k]) < 1e-12);
}

TEST_CASE("psi|xi|^{-z} at z0 = 1", "[laurent]") {
  auto L = laurent_expansion(abs_power(), 1.0, 3);
  REQUIRE(L.principal.size() == 1);
  CHECK(std::abs(L.residue() - 1.0 / pi) < 1e-14);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(L.regular[k] - C_AT_ONE[k]) < 1e-10);
}

TEST_CASE("holomorphic points give the Taylor expansion", "[laurent]") {
  auto F = abs_power();
  cplx z0(0.5, 0.2);
  auto L = laurent_expansion(F, z0, 3);
  CHECK(L.principal.empty());
  for (int k = 0; k <= 3; ++k) CHECK(L.regular[k] == finite_part_integral(slice(derivative_family(F, k), z0)));
  // and the function itself: (1/pi) [I(z) + 1/(z - 1)]
  CHECK(std::abs(L.regular[0] - family_finite_part(F, z0)) < 1e-15);
}

TEST_CASE("affine order: constant-term residue factor", "[laurent]") {
  // c_k = fp sigma^{(k)} - (1/(q (k+1))) int sigma^{(k+1)}_{-n,0} with q = alpha'.
  EllipticModelSymbol q(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5)));
  auto F = power_family(identity_symbol(1), q, zeta_exponent());
  cplx z0 = 0.0, ap = -1.0;
  auto L = laurent_expansion(F, z0, 3);
  for (int k = 0; k <= 3; ++k) {
    cplx expect = finite_part_integral(slice(derivative_family(F, k), z0)) -
                  residue_density(slice(derivative_family(F, k + 1), z0)) / (ap * (k + 1.0));
    CHECK(std::abs(L.regular[k] - expect) < 1e-12);
  }
  CHECK_THROWS_AS(laurent_expansion(derivative_family(F, 1), z0, 1), error);
}

TEST_CASE("contour fit on closed-form targets", "[laurent]") {
  cplx z0(0.3, -0.2);
  auto L = contour_laurent([z0](cplx z) { return 1.0 / (z - z0); }, z0, 3, 0.4, 64, 3);
  CHECK(std::abs(L.residue() - 1.0) < 1e-13);
  for (std::size_t j = 1; j < L.principal.size(); ++j) CHECK(std::abs(L.principal[j]) < 1e-13);
  for (auto c : L.regular) CHECK(std::abs(c) < 1e-13);

  auto H = contour_laurent([](cplx z) { return std::exp(z); }, z0, 3, 0.4, 64, 3);
  for (auto b : H.principal) CHECK(std::abs(b) < 1e-9);
  for (auto c : H.regular) CHECK(std::abs(c - std::exp(z0)) < 1e-12);
  CHECK_THROWS_AS(contour_laurent([](cplx z) { return z; }, 0.0, 3, 0.0, 64, 3), error);
  CHECK_THROWS_AS(contour_laurent([](cplx z) { return z; }, 0.0, 30, 0.5, 16, 3), error);
}

TEST_CASE("empirical vs analytic at z0 = 1", "[laurent]") {
  auto F = abs_power();
  auto A = laurent_expansion(F, 1.0, 3);
  auto E = empirical_laurent(F, 1.0, 3);
  CHECK(std::abs(A.residue() - E.residue()) < 1e-7);
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(A.regular[k] - E.regular[k]) < 1e-7);
  CHECK_THROWS_AS(empirical_laurent(F, 1.0, 3, 1.5), error);
}

TEST_CASE("analytic vs empirical on the shipped order paths", "[laurent][property]") {
  for (auto& [name, e] : verify::ac4_paths()) {
    auto F = verify::ac4_family(e);
    for (cplx z0 : {cplx(0.0), cplx(0.45, 0.1)}) {
      INFO(name << " z0 = " << z0);
      auto A = laurent_expansion(F, z0, 3);
      auto E = empirical_laurent(F, z0, 3);
      CHECK(std::abs(A.residue() - E.residue()) < 1e-6);
      for (int k = 0; k <= 3; ++k) CHECK(std::abs(A.regular[k] - E.regular[k]) < 1e-6);
      // simple poles only
      for (std::size_t j = 1; j < E.principal.size(); ++j) CHECK(std::abs(E.principal[j]) < 1e-8);
    }
  }
}

TEST_CASE("c_k is the constant term of the k-th derivative family", "[laurent][property]") {
  for (auto& [name, e] : verify::ac4_paths()) {
    auto F = verify::ac4_family(e);
    auto A = laurent_expansion(F, 0.0, 3);
    for (int k = 1; k <= 3; ++k) {
      INFO(name << " k = " << k);
      auto D = empirical_laurent(derivative_family(F, k), 0.0, 0);
      CHECK(std::abs(A.regular[k] - D.regular[0]) < 1e-7);
      // off the pole set both sides are analytic
      cplx z1(0.45, 0.1);
      CHECK(std::abs(laurent_expansion(F, z1, k).regular[k] - laurent_expansion(derivative_family(F, k), z1, 0).regular[0]) < 1e-12);
    }
  }
}

TEST_CASE("density invariance", "[laurent]") {
  auto F = abs_power();
  auto d0 = density_invariance_check(F, 1.0, LinearMap::identity(1));
  CHECK(std::abs(d0.tr_shift) < 1e-14);
  CHECK(std::abs(d0.res_shift) < 1e-14);
  CHECK(std::abs(d0.combined_x - d0.combined_y) < 1e-14);

  // C = (2): |C^{-1} w| = 1/2 on S^0, so tr_shift = -res log 2 with res = 1/pi.
  auto d = density_invariance_check(F, 1.0, LinearMap::from_rows(1, {2, 0, 0, 0, 0, 0, 0, 0, 0}));
  CHECK(std::abs(d.combined_x - d.combined_y) < 1e-8);
  CHECK(std::abs(d.tr_shift + std::log(2.0) / pi) < 1e-10);

  auto G = power_family(identity_symbol(2), EllipticModelSymbol(make_power_symbol(2, 1.0)), zeta_exponent());
  auto C = LinearMap::from_rows(2, {1.5, 0.3, -0.2, 0.8, 0, 0, 0, 0, 0});
  auto g = density_invariance_check(G, cplx(0.5, 0.3), C);
  CHECK(std::abs(g.res_x) < 1e-14);
  CHECK(std::abs(g.tr_shift) < 1e-8);
}

TEST_CASE("model geometries", "[laurent]") {
  auto F = abs_power();
  auto P = model_trace(F, 1.0, 2, ModelGeometry::point);
  auto A = laurent_expansion(F, 1.0, 2);
  CHECK(P.residue() == A.residue());
  for (int k = 0; k <= 2; ++k) CHECK(P.regular[k] == A.regular[k]);
  auto S = model_trace(F, 1.0, 2, ModelGeometry::circle);
  CHECK(std::abs(S.residue() - 2.0) < 1e-13);
  for (int k = 0; k <= 2; ++k) CHECK(std::abs(S.regular[k] - 2.0 * pi * A.regular[k]) < 1e-12);
  CHECK_THROWS_AS(parse_geometry("torus"), error);
}
