#pragma once

// Hurwitz zeta zeta_H(s, a) = sum_{k>=0} (a+k)^{-s} for real a > 0 and complex
// s != 1, by Euler-Maclaurin summation with 12 Bernoulli corrections.

#include <algorithm>
#include <cmath>
#include <complex>

#include "holotrace/core.hpp"

namespace holotrace {

namespace detail {
// B_{2j} as exact rationals evaluated in double.
inline double bernoulli_even(int j) {
  static const double b[13] = {1.0,
                               1.0 / 6.0,
                               -1.0 / 30.0,
                               1.0 / 42.0,
                               -1.0 / 30.0,
                               5.0 / 66.0,
                               -691.0 / 2730.0,
                               7.0 / 6.0,
                               -3617.0 / 510.0,
                               43867.0 / 798.0,
                               -174611.0 / 330.0,
                               854513.0 / 138.0,
                               -236364091.0 / 2730.0};
  return b[j];
}
}  // namespace detail

inline cplx hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0)) throw error(errc::invalid_argument, "Hurwitz parameter must be positive");
  if (s == cplx(1.0)) throw pole_error("Hurwitz zeta pole at s = 1", 1.0, 1.0);
  // For Re s < 0 the partial sum and the x^{1-s}/(s-1) term cancel to the
  // small result, so the summation runs in extended precision.
  using lcplx = std::complex<long double>;
  using ld = long double;
  double threshold = std::max(20.0, 2.0 * std::abs(s) + 5.0);
  int N = std::max(0, static_cast<int>(std::ceil(threshold - a)));
  lcplx S(s.real(), s.imag());
  lcplx sum = 0.0L;
  for (int k = 0; k < N; ++k) sum += std::exp(-S * std::log(static_cast<ld>(a) + k));
  ld x = static_cast<ld>(a) + N, lx = std::log(x);
  lcplx xs = std::exp(-S * lx);  // x^{-s}
  sum += x * xs / (S - 1.0L) + 0.5L * xs;
  // sum_j B_{2j}/(2j)! s(s+1)..(s+2j-2) x^{-s-2j+1}
  lcplx rising = S;  // s (s+1) ... (s + 2j - 2)
  lcplx pw = xs / x;  // x^{-s-1}
  ld fact = 2.0L;  // (2j)!
  for (int j = 1; j <= 12; ++j) {
    sum += static_cast<ld>(detail::bernoulli_even(j)) / fact * rising * pw;
    rising *= (S + (2.0L * j - 1.0L)) * (S + 2.0L * j);
    pw /= x * x;
    fact *= (2.0L * j + 1.0L) * (2.0L * j + 2.0L);
  }
  return cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

inline cplx riemann_zeta(cplx s) { return hurwitz_zeta(s, 1.0); }

}  // namespace holotrace
