#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "kerrwave/core/errors.hpp"

namespace kerrwave {

// Root of a x + b x^3 = y with a > 0 on the branch where the left side is
// increasing (|x| < sqrt(a / (3 |b|)) when b < 0). Newton from the guess with a
// bisection safeguard; relative tolerance 1e-14.
inline double solve_monotone_cubic(double a, double b, double y, double guess = 0.0) {
  if (!(a > 0.0)) throw DivisionError("linear coefficient must be positive");
  if (y == 0.0) return 0.0;
  const double s = y < 0.0 ? -1.0 : 1.0;
  const double t = std::abs(y);
  double lo = 0.0, hi;
  if (b >= 0.0) {
    hi = t / a;
  } else {
    const double xc = std::sqrt(a / (-3.0 * b));
    if (t > (2.0 / 3.0) * a * xc) throw FieldExitError("no admissible field for this displacement");
    hi = xc;
  }
  double x = std::clamp(s * guess, lo, hi);
  if (x == 0.0 && b == 0.0) return s * t / a;
  for (int it = 0; it < 100; ++it) {
    const double f = a * x + b * x * x * x - t;
    if (f > 0.0) hi = x;
    else lo = x;
    const double df = a + 3.0 * b * x * x;
    double xn = df > 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-14 * std::abs(xn) || hi - lo <= 1e-15 * hi) return s * xn;
    x = xn;
  }
  return s * x;
}

// e with (eps1 + eps3 |e|^2) e = d: the modulus solves eps3 r^3 + eps1 r = |d|.
inline std::array<double, 2> invert_constitutive(const std::array<double, 2>& d, double eps1, double eps3) {
  const double nd = std::hypot(d[0], d[1]);
  if (nd == 0.0) return {0.0, 0.0};
  const double r = solve_monotone_cubic(eps1, eps3, nd, nd / eps1);
  return {r / nd * d[0], r / nd * d[1]};
}

// Positivity margin of the quasilinear symbol: the smallest of mu0,
// eps1 + eps3 |v|^2 and eps1 + 3 eps3 |v|^2, minus eta.
inline double symbol_margin(double eps1, double eps3, double v2, double mu0, double eta) {
  return std::min({mu0, eps1 + eps3 * v2, eps1 + 3.0 * eps3 * v2}) - eta;
}

}  // namespace kerrwave
