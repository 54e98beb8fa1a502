#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace twpa {

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

/// 0 W maps to -inf dBm.
inline double watt_to_dbm(double watt) {
  if (watt <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(watt / 1e-3);
}

inline double power_ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }
inline double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }

inline double hz_to_rad(double f) { return 2.0 * std::numbers::pi * f; }
inline double rad_to_hz(double omega) { return omega / (2.0 * std::numbers::pi); }

}  // namespace twpa
