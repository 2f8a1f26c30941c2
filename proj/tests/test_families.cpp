#include <catch_amalgamated.hpp>

#include "holotrace/families.hpp"
#include "holotrace/zeta.hpp"

using namespace holotrace;

namespace {

double psi_ref(double r) {
  if (r <= 0.25) return 0.0;
  if (r >= 1.0) return 1.0;
  double t = (r - 0.25) / 0.75;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// Test-side Cauchy ring: f^{(m)}(z0) from 64 samples on |z - z0| = r.
cplx ring_derivative(const std::function<cplx(cplx)>& f, cplx z0, int m, double r = 0.2) {
  const int P = 64;
  cplx acc = 0.0;
  double fact = 1.0;
  for (int i = 2; i <= m; ++i) fact *= i;
  for (int t = 0; t < P; ++t) {
    double th = 2.0 * pi * t / P;
    acc += f(z0 + std::polar(r, th)) * std::polar(std::pow(r, -m), -m * th);
  }
  return fact * acc / static_cast<double>(P);
}

EllipticModelSymbol abs_xi(double q = 1.0) { return EllipticModelSymbol(make_power_symbol(1, q)); }

HolomorphicFamily abs_power(double q = 1.0) {
  return power_family(identity_symbol(1), abs_xi(q), OrderPath::affine(-1.0, 0.0));
}

HolomorphicFamily moebius_n2(double mu) {
  auto p0 = ModeProfile::single(AngularProfile::trig({1.0, 0.0, 0.4}, {0.0, 0.3}));
  auto p1 = ModeProfile::single(AngularProfile::trig({0.5}, {0.0, 0.0, 0.2}));
  return direct_family(2, OrderPath::moebius(mu).transformed(-1.0, 1.0), {p0, p1});
}

}  // namespace

TEST_CASE("power family slice", "[families]") {
  auto F = abs_power();
  auto s = slice(F, 1.0);
  CHECK(s.order() == cplx(-1.0));
  for (double xi : {-4.0, -0.7, 0.5, 2.0, 9.0})
    CHECK(std::abs(s.evaluate(0.0, xi) - psi_ref(std::abs(xi)) / std::abs(xi)) < 1e-14);
  for (cplx z : {cplx(0.3, 0.2), cplx(-1.5, 0.0), cplx(2.0, -1.0)}) {
    CHECK(std::abs(slice(F, z).order() - F.order(z)) < 1e-14);
    CHECK(std::abs(slice(F, z).evaluate(0.0, 3.0) - std::exp(-z * std::log(3.0))) < 1e-13);
  }
}

TEST_CASE("slices depend continuously on z", "[families]") {
  auto F = moebius_n2(0.3);
  Vec xi{2.0, -1.5, 0.0};
  cplx z(0.4, 0.1);
  for (double h : {1e-3, 1e-4}) {
    cplx d = slice(F, z + h).evaluate(0.0, xi) - slice(F, z).evaluate(0.0, xi);
    CHECK(std::abs(d) < 10.0 * h);
  }
}

TEST_CASE("derivative family slices", "[families]") {
  double q = 2.0;
  auto F = abs_power(q);
  cplx z0(0.3, 0.1);
  CHECK(slice(derivative_family(F, 0), z0).evaluate(0.0, 5.0) == slice(F, z0).evaluate(0.0, 5.0));
  auto s1 = slice(derivative_family(F, 1), z0);
  for (double xi : {0.6, 3.0, -8.0}) {
    double r = std::abs(xi);
    cplx expect = -q * std::log(r) * psi_ref(r) * std::exp(-q * z0 * std::log(r));
    CHECK(std::abs(s1.evaluate(0.0, xi) - expect) < 1e-13);
  }
  CHECK_THROWS_AS(derivative_family(F, -1), error);
}

TEST_CASE("derivative slices agree with pointwise z-differentiation", "[families][property]") {
  std::vector<std::pair<std::string, HolomorphicFamily>> fams{
      {"moebius", moebius_n2(0.3)},
      {"quadratic", direct_family(2, OrderPath::polynomial({-1.0, 1.0, 0.2}), {ModeProfile::single(AngularProfile::trig({1.0, 0.5}, {}))})},
      {"power", power_family(identity_symbol(1), EllipticModelSymbol(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5))),
                             OrderPath::affine(-1.0, 0.0))}};
  cplx z0(0.2, 0.1);
  for (auto& [name, F] : fams) {
    Vec xi = F.n == 1 ? Vec{3.5, 0, 0} : Vec{2.5, 1.0, 0};
    for (int k = 1; k <= 3; ++k) {
      INFO(name << " k = " << k);
      cplx closed = slice(derivative_family(F, k), z0).evaluate(0.0, xi);
      cplx ring = ring_derivative([&](cplx z) { return slice(F, z).evaluate(0.0, xi); }, z0, k);
      CHECK(std::abs(closed - ring) < 1e-8 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("component derivative recursion", "[families]") {
  auto F = abs_power();
  auto c1 = component_derivative(F, 0, 1, cplx(0.7));
  REQUIRE(c1.size() == 2);
  CHECK(c1[0].is_zero());
  Vec w{1.0, 0, 0};
  CHECK(std::abs(c1[1].mode_value(0, w) + 1.0) < 1e-14);
  auto c0 = component_derivative(F, 0, 0, cplx(0.7));
  CHECK(std::abs(c0[0].mode_value(0, w) - 1.0) < 1e-14);

  // affine alpha = -2z: l = 2 coefficient is (alpha')^2 times the base profile
  auto G = direct_family(1, OrderPath::affine(-2.0, 0.5), {ModeProfile::single(AngularProfile::pair(1.0, 3.0))});
  auto c2 = component_derivative(G, 0, 2, cplx(0.1));
  REQUIRE(c2.size() == 3);
  CHECK(std::abs(c2[2].mode_value(0, Vec{-1.0, 0, 0}) - 12.0) < 1e-13);
  CHECK(c2[1].is_zero());
  CHECK(c2[0].is_zero());
}

TEST_CASE("component of derivative equals derivative of component", "[families][property]") {
  auto F = power_family(identity_symbol(1), EllipticModelSymbol(add(make_power_symbol(1, 1.0), make_power_symbol(1, 0.0, 0.5))),
                        OrderPath::moebius(0.2).transformed(0.0, -1.0));
  cplx z0(0.3, -0.1);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k <= 3; ++k) {
      auto rec = component_derivative(F, j, k, z0);
      auto closed = derivative_component_closed(F, j, k, z0);
      for (std::size_t l = 0; l < rec.size(); ++l)
        for (Vec w : {Vec{1.0, 0, 0}, Vec{-1.0, 0, 0}}) {
          INFO("j = " << j << " k = " << k << " l = " << l);
          CHECK(std::abs(rec[l].mode_value(0, w) - closed[l].mode_value(0, w)) < 1e-9);
        }
    }
}

TEST_CASE("reciprocal order series", "[families]") {
  auto a = reciprocal_order_series(OrderPath::affine(2.5, -1.0), 0.4, 4);
  CHECK(std::abs(a[0] - 0.4) < 1e-15);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(std::abs(a[i]) < 1e-15);

  double mu = 0.3;
  auto m = reciprocal_order_series(OrderPath::moebius(mu), 0.0, 4);
  CHECK(std::abs(m[0] - 1.0) < 1e-14);
  CHECK(std::abs(m[1] - mu) < 1e-14);
  for (std::size_t i = 2; i < m.size(); ++i) CHECK(std::abs(m[i]) < 1e-13);

  // general path against a test-side contour fit of 1/(alpha(z) - alpha(z0))
  auto g = OrderPath::general([](cplx z) { return std::sin(z) + 0.5 * z; }, {}, "sine");
  cplx z0(0.2, 0.1);
  auto c = reciprocal_order_series(g, z0, 3);
  auto f = [&](cplx z) { return 1.0 / (g(z) - g(z0)); };
  for (int k = -1; k <= 3; ++k) {
    const int P = 64;
    double r = 0.1;
    cplx acc = 0.0;
    for (int t = 0; t < P; ++t) {
      double th = 2.0 * pi * t / P;
      acc += f(z0 + std::polar(r, th)) * std::polar(std::pow(r, -k), -k * th);
    }
    CHECK(std::abs(c[k + 1] - acc / static_cast<double>(P)) < 1e-9);
  }
  CHECK_THROWS_AS(reciprocal_order_series(OrderPath::polynomial({0.0, 0.0, 1.0}), 0.0, 2), error);
}

TEST_CASE("reciprocal series inverts polynomial paths", "[families][property]") {
  auto path = OrderPath::polynomial({0.5, 1.0, 0.1, -0.05});
  cplx z0(0.3, 0.0);
  int J = 5;
  auto c = reciprocal_order_series(path, z0, J);
  Jet a = path.jet(z0, J + 2);
  // (alpha(z) - alpha(z0)) / h = sum a_{m+1} h^m; times sum c_{m-1} h^m.
  for (int m = 0; m <= J + 1; ++m) {
    cplx s = 0.0;
    for (int i = 0; i <= m; ++i) s += a[i + 1] * c[m - i];
    CHECK(std::abs(s - (m == 0 ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("L_k symbols", "[families]") {
  // affine: L_0 = sigma'(z0) / q on the critical component
  auto F = abs_power();
  auto L0 = L_k_symbol(F, 1.0, 0);
  REQUIRE(L0.terms().size() == 1);
  CHECK(L0.terms()[0].log_power == 1);
  CHECK(L0.terms()[0].degree == cplx(-1.0));
  CHECK(std::abs(L0.terms()[0].coef.mode_value(0, Vec{1.0, 0, 0}) - 1.0) < 1e-14);
  CHECK(L_k_symbol(F, cplx(0.5, 0.0), 0).terms().empty());

  // moebius: L_0 = (1/alpha') sigma' - (alpha''/(2 alpha'^2)) sigma with
  // alpha'(0) = 1 and alpha''(0) = -2 mu, so the log-free part is mu p.
  double mu = 0.3;
  auto p = AngularProfile::pair(1.0, 2.0);
  auto G = direct_family(1, OrderPath::moebius(mu).transformed(-1.0, 1.0), {ModeProfile::single(p)});
  auto M = L_k_symbol(G, 0.0, 0);
  for (auto& t : M.terms()) {
    for (Vec w : {Vec{1.0, 0, 0}, Vec{-1.0, 0, 0}}) {
      cplx expect = t.log_power == 1 ? p(w) : mu * p(w);
      CHECK(std::abs(t.coef.mode_value(0, w) - expect) < 1e-13);
    }
  }
  CHECK(M.terms().size() == 2);
}

TEST_CASE("pole set of the power family", "[families]") {
  auto F = abs_power();
  auto P = pole_set(F, 0.0, 3.5);
  std::vector<double> re;
  for (auto z : P) {
    CHECK(std::abs(z.imag()) < 1e-12);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  std::vector<double> expect{-3.0, -2.0, -1.0, 0.0, 1.0};
  REQUIRE(re.size() == expect.size());
  for (std::size_t i = 0; i < re.size(); ++i) CHECK(std::abs(re[i] - expect[i]) < 1e-10);
}

TEST_CASE("Taylor reconstruction from derivative slices", "[families][property]") {
  auto F = moebius_n2(0.25);
  cplx z0(0.1, 0.05), dz(0.05, -0.03);
  Vec xi{3.0, 2.0, 0.0};
  cplx sum = 0.0;
  double fact = 1.0;
  for (int k = 0; k <= 8; ++k) {
    if (k > 0) fact *= k;
    sum += slice(derivative_family(F, k), z0).evaluate(0.0, xi) * std::pow(dz, k) / fact;
  }
  CHECK(std::abs(sum - slice(F, z0 + dz).evaluate(0.0, xi)) < 1e-9);
}

TEST_CASE("domain checks", "[families]") {
  auto F = direct_family(1, OrderPath::affine(1.0, 0.0), {ModeProfile::single(AngularProfile::constant(1, 1.0))}, {0.0, 1.0});
  CHECK_NOTHROW(slice(F, 0.5));
  CHECK_THROWS_AS(slice(F, 2.0), error);
}
