#pragma once

// Brute-force SNAIL operating point: dense sign-change scan plus long-double
// bisection, with expansion coefficients from finite differences of the
// current. Shares no code with the library solver.

#include <cmath>

namespace oracle {

struct SnailPoint {
  double phi_star;  // reduced phase
  double alpha;     // dI/dphi / Ic
  double gamma;     // -(d3I/dphi3) / (6 Ic)
};

inline long double snail_i(long double phi, long double phi_ext, long double r) {
  return r * std::sin(phi) + std::sin((phi - phi_ext) / 3.0L);
}

inline SnailPoint scan_snail(double phi_ext, double r) {
  const long double pi = 3.141592653589793238462643383279L;
  const int n = 200000;
  long double lo = phi_ext - pi, hi = phi_ext + pi;
  long double prev = snail_i(lo, phi_ext, r);
  long double a = lo, b = hi;
  for (int k = 1; k <= n; ++k) {
    const long double x = lo + (hi - lo) * k / n;
    const long double v = snail_i(x, phi_ext, r);
    if ((prev <= 0) != (v <= 0)) {
      a = x - (hi - lo) / n;
      b = x;
      break;
    }
    prev = v;
  }
  for (int k = 0; k < 200; ++k) {
    const long double m = 0.5L * (a + b);
    if ((snail_i(a, phi_ext, r) <= 0) == (snail_i(m, phi_ext, r) <= 0)) a = m;
    else b = m;
  }
  const long double x = 0.5L * (a + b);
  const long double h = 1e-3L;
  auto f = [&](long double y) { return snail_i(y, phi_ext, r); };
  const long double d1 = (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
  const long double d3 = (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h) + 8 * f(x + 2 * h) -
                          f(x + 3 * h)) /
                         (8 * h * h * h);
  return {static_cast<double>(x), static_cast<double>(d1), static_cast<double>(-d3 / 6)};
}

}  // namespace oracle
