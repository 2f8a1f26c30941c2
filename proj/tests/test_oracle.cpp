#include <catch_amalgamated.hpp>

#include "holotrace/oracle.hpp"

using namespace holotrace;

namespace {

// Test-side direct sum over |k| <= K of a(k) lambda(k)^{-z} for Re z large.
cplx direct_sum(const MultiplierModel& m, cplx z, int K) {
  cplx s = 0.0;
  for (int k = -K; k <= K; ++k) s += m.a(k) * std::exp(-z * std::log(m.lambda(k)));
  return s;
}

}  // namespace

TEST_CASE("harmonic model is 1 + 2 zeta_R", "[oracle]") {
  auto H = harmonic_model();
  // zeta_R(6) = pi^6/945, zeta_R(4) = pi^4/90
  CHECK(std::abs(multiplier_zeta(H, 6.0) - (1.0 + 2.0 * std::pow(pi, 6) / 945.0)) < 1e-13);
  CHECK(std::abs(multiplier_zeta(H, 4.0) - (1.0 + 2.0 * std::pow(pi, 4) / 90.0)) < 1e-13);
  CHECK(std::abs(multiplier_zeta(H, 0.0)) < 1e-13);
  cplx z(2.5, 1.0);
  CHECK(std::abs(multiplier_zeta(H, z) - (1.0 + 2.0 * riemann_zeta(z))) < 1e-12);
  CHECK_THROWS_AS(multiplier_zeta(H, 1.0), pole_error);
}

TEST_CASE("harmonic model Laurent data", "[oracle]") {
  auto H = harmonic_model();
  auto L1 = spectral_laurent(H, 1.0, 0);
  CHECK(std::abs(L1.residue() - 2.0) < 1e-10);
  for (std::size_t j = 1; j < L1.principal.size(); ++j) CHECK(std::abs(L1.principal[j]) < 1e-10);
  auto L0 = spectral_laurent(H, 0.0, 1);
  for (auto b : L0.principal) CHECK(std::abs(b) < 1e-10);
  CHECK(std::abs(L0.regular[0]) < 1e-10);
  CHECK(std::abs(L0.regular[1] + std::log(2.0 * pi)) < 1e-9);
}

TEST_CASE("shifted Laplacian against closed forms and direct sums", "[oracle]") {
  auto S = shifted_laplacian_model();
  // sum_k 1/(k^2 + 1) = pi coth(pi)
  CHECK(std::abs(multiplier_zeta(S, 1.0) - pi / std::tanh(pi)) < 1e-12);
  CHECK(std::abs(multiplier_zeta(S, cplx(3.0, 0.5)) - direct_sum(S, cplx(3.0, 0.5), 4000)) < 1e-12);
  auto P = multiplier_pole_candidates(S, -2.0);
  REQUIRE(P.size() >= 2);
  CHECK(std::abs(P[0] - 0.5) < 1e-15);
  CHECK(std::abs(P[1] - 0.0) < 1e-15);
}

TEST_CASE("finite-support models are entire", "[oracle]") {
  auto F = finite_support_model();
  CHECK(multiplier_pole_candidates(F).empty());
  for (cplx z : {cplx(0.0), cplx(1.0), cplx(-2.5, 1.0)}) {
    cplx expect = 0.0;
    for (int k = -3; k <= 3; ++k) expect += std::exp(-z * std::log(F.lambda(k)));
    CHECK(std::abs(multiplier_zeta(F, z) - expect) < 1e-13);
  }
  auto L = spectral_laurent(F, 1.0, 0);
  for (auto b : L.principal) CHECK(std::abs(b) < 1e-12);
}

TEST_CASE("Poisson correction", "[oracle]") {
  auto S = shifted_laplacian_model();
  // int_R (x^2 + 1)^{-z} dx = sqrt(pi) Gamma(z - 1/2) / Gamma(z)
  double z = 6.0;
  auto r = poisson_correction(S, z, 16);
  double integral = std::sqrt(pi) * std::tgamma(z - 0.5) / std::tgamma(z);
  CHECK(std::abs(r.integral - integral) < 1e-12);
  CHECK(std::abs(r.value - (direct_sum(S, z, 2000) - integral)) < 1e-8);
  CHECK(r.tail_bound < 1e-10);

  auto H = harmonic_model();
  auto h = poisson_correction(H, 6.0, 64);
  CHECK(std::abs(h.value - (multiplier_zeta(H, 6.0) - h.integral)) < 1e-8);

  CHECK(poisson_correction(S, z, 0).value == cplx(0.0));
  CHECK_THROWS_AS(poisson_correction(S, 0.4, 8), error);
  auto bad = harmonic_model();
  bad.k0 = 2;
  bad.a_small = {1.0, 1.0};
  bad.lambda_small = {1.0, 1.0};
  CHECK_THROWS_AS(poisson_correction(bad, 6.0, 8), error);
}

TEST_CASE("model validation", "[oracle]") {
  auto m = harmonic_model();
  m.lambda_small = {};
  CHECK_THROWS_AS(validate_model(m), error);
  m = harmonic_model();
  m.lambda_tail = PolyTail{1.0, {-1.0}};
  CHECK_THROWS_AS(validate_model(m), error);
  m = harmonic_model();
  m.bracket = "spline";
  CHECK_THROWS_AS(validate_model(m), error);
  m = harmonic_model();
  m.lambda_small = {0.0};
  CHECK_THROWS_AS(validate_model(m), error);
}

TEST_CASE("spectral and symbol-side residues agree", "[oracle][property]") {
  for (auto m : {harmonic_model(), shifted_laplacian_model()}) {
    auto F = model_family(m);
    for (auto p : multiplier_pole_candidates(m, -2.0)) {
      if (!(p.real() > -2.0)) continue;
      INFO(m.name << " z0 = " << p);
      auto Ls = spectral_laurent(m, p, 0);
      auto Lm = laurent_expansion(F, p, 0, XEval::circle());
      CHECK(std::abs(Ls.residue() - Lm.residue()) < 1e-8);
      auto D = contour_laurent([&](cplx z) { return multiplier_zeta(m, z) - symbol_zeta(F, z); }, p, 0, Ls.ring_radius,
                               default_ring_points, 3);
      for (auto b : D.principal) CHECK(std::abs(b) < 1e-7);
    }
  }
}
