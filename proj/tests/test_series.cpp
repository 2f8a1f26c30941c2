#include <catch_amalgamated.hpp>

#include "holotrace/series.hpp"

using namespace holotrace;

TEST_CASE("jet arithmetic matches Taylor coefficients", "[series]") {
  // (1 + h)(2 - h + h^2) = 2 + h + 0 h^2 + h^3
  Jet a = Jet::from({1.0, 1.0, 0.0, 0.0});
  Jet b = Jet::from({2.0, -1.0, 1.0, 0.0});
  Jet p = a * b;
  CHECK(p[0] == cplx(2.0));
  CHECK(p[1] == cplx(1.0));
  CHECK(p[2] == cplx(0.0));
  CHECK(p[3] == cplx(1.0));
  CHECK(p.derivative(3) == cplx(6.0));
  CHECK(std::abs(p.eval(0.5) - cplx(2.0 + 0.5 + 0.125)) < 1e-15);
}

TEST_CASE("exp of a jet reproduces the exponential series", "[series]") {
  // exp(c h) has coefficients c^m / m!
  cplx c(0.3, -1.2);
  Jet e = exp(Jet::from({0.0, c, 0.0, 0.0, 0.0, 0.0}));
  for (int m = 0; m <= 5; ++m) CHECK(std::abs(e[m] - std::pow(c, m) / factorial(m)) < 1e-15);
  // exp(log(2) + h) = 2 e^h
  Jet f = exp(Jet::from({std::log(2.0), 1.0, 0.0, 0.0}));
  for (int m = 0; m <= 3; ++m) CHECK(std::abs(f[m] - 2.0 / factorial(m)) < 1e-15);
}

TEST_CASE("series reciprocal inverts the product", "[series]") {
  std::vector<cplx> a{2.0, cplx(0.5, 1.0), -0.25, 3.0};
  auto d = series_reciprocal(a, 6);
  auto one = series_product(a, d, 6);
  CHECK(std::abs(one[0] - 1.0) < 1e-15);
  for (int m = 1; m <= 6; ++m) CHECK(std::abs(one[m]) < 1e-13);
  // 1/(1 - h) = sum h^m
  auto g = series_reciprocal({1.0, -1.0}, 5);
  for (auto c : g) CHECK(c == cplx(1.0));
  CHECK_THROWS_AS(series_reciprocal({0.0, 1.0}, 3), error);
}

TEST_CASE("partial Bell polynomials", "[series]") {
  std::vector<cplx> x{0.0, 2.0, 3.0, 5.0, 7.0};
  auto B = partial_bell(x, 4);
  CHECK(B[0][0] == cplx(1.0));
  // B_{k,1} = x_k, B_{k,k} = x_1^k
  for (int k = 1; k <= 4; ++k) {
    CHECK(B[k][1] == x[k]);
    CHECK(std::abs(B[k][k] - std::pow(x[1], k)) < 1e-12);
  }
  // B_{3,2} = 3 x1 x2, B_{4,2} = 4 x1 x3 + 3 x2^2, B_{4,3} = 6 x1^2 x2
  CHECK(std::abs(B[3][2] - 3.0 * x[1] * x[2]) < 1e-12);
  CHECK(std::abs(B[4][2] - (4.0 * x[1] * x[3] + 3.0 * x[2] * x[2])) < 1e-12);
  CHECK(std::abs(B[4][3] - 6.0 * x[1] * x[1] * x[2]) < 1e-12);
}

TEST_CASE("factorials and binomials", "[series]") {
  CHECK(factorial(0) == 1.0);
  CHECK(factorial(5) == 120.0);
  CHECK(binomial(6, 2) == 15.0);
  CHECK(binomial(6, 0) == 1.0);
  CHECK(binomial(3, 5) == 0.0);
}

TEST_CASE("Cauchy ring derivatives and coefficients", "[series]") {
  auto f = [](cplx z) { return std::exp(2.0 * z); };
  cplx z0(0.1, 0.2);
  for (int m = 0; m <= 4; ++m) CHECK(std::abs(cauchy_derivative(f, z0, m, 0.3, 32) - std::pow(2.0, m) * f(z0)) < 1e-12 * std::pow(2.0, m) * std::abs(f(z0)) + 1e-13);
  // Laurent coefficients of 1/z + z on the unit-ish ring
  auto g = [](cplx z) { return 1.0 / z + 3.0 * z * z; };
  RingSamples S = sample_ring(g, 0.0, 0.5, 32);
  CHECK(std::abs(ring_coefficient(S, -1) - 1.0) < 1e-14);
  CHECK(std::abs(ring_coefficient(S, 2) - 3.0) < 1e-13);
  CHECK(std::abs(ring_coefficient(S, 0)) < 1e-14);
}
