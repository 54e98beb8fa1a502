#pragma once

// Numerical inversion of the pump-depletion gain law G = g / (1 + 2 g Ps / Pp)
// by bisection on the signal power, independent of the closed-form P1dB.

#include <cmath>

namespace oracle {

/// Signal power (dBm) at which the gain is 1 dB below g (linear).
inline double bisect_p1db(double g_lin, double pump_dbm) {
  const double pp = 1e-3 * std::pow(10.0, pump_dbm / 10);
  auto gain_db = [&](double ps_dbm) {
    const double ps = 1e-3 * std::pow(10.0, ps_dbm / 10);
    return 10 * std::log10(g_lin / (1 + 2 * g_lin * ps / pp));
  };
  const double target = 10 * std::log10(g_lin) - 1;
  double lo = -250, hi = pump_dbm + 20;
  for (int k = 0; k < 200; ++k) {
    const double m = 0.5 * (lo + hi);
    if (gain_db(m) > target) lo = m;
    else hi = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
