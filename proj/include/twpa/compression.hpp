#pragma once

// 1-dB compression analysis: the pump-depletion gain law, P1dB extraction
// from gain-vs-power curves, band summaries and gain-vs-position maps.

#include <optional>
#include <span>
#include <vector>

#include "twpa/response.hpp"

namespace twpa {

/// Lossless, depletion-only compression law G = g_lin / (1 + 2 g_lin P_sig / P_p).
struct AnalyticGainModel {
  double g_lin = 100.0;      // linear power ratio
  double pump_power = 0.0;   // W
};

double analytic_gain(const AnalyticGainModel& model, double signal_power_w);

/// Closed-form input power (dBm) at which analytic_gain drops 1 dB below g_lin.
double analytic_p1db(const AnalyticGainModel& model);

inline constexpr int kDefaultPowerSmoothing = 5;
inline constexpr int kDefaultFrequencySmoothing = 11;

struct CompressionPoint {
  double p1db_dbm = 0.0;
  double g_lin_db = 0.0;
  bool non_monotonic = false;  // smoothed curve re-crosses the threshold upward
};

/// Smooths the curve with a centered moving average, takes the smoothed gain
/// at the lowest power as G_lin, and returns the first downward crossing of
/// G_lin - 1 dB scanning upward in power, linearly interpolated.
/// Errors: InvalidArgument, BadWindow, NoCrossing.
CompressionPoint extract_p1db(std::span<const double> powers_dbm, std::span<const double> gains_db,
                              int smoothing_window = kDefaultPowerSmoothing);

struct CompressionSummary {
  std::vector<double> frequencies;  // Hz
  std::vector<double> g_lin_db;
  // Absent where the gain never compresses by 1 dB inside the power range.
  std::vector<std::optional<double>> p1db_dbm;
  std::vector<std::optional<double>> pout_at_p1db_dbm;
  std::vector<std::optional<double>> pump_s21_at_p1db_db;
  std::vector<bool> non_monotonic;

  bool operator==(const CompressionSummary&) const = default;
};

/// Column-wise extract_p1db. The pump transmission at P1dB is read from the
/// pump surface column, smoothed with the same window, by linear
/// interpolation in power.
CompressionSummary compression_summary(const ResponseSurface& surface,
                                       int smoothing_window = kDefaultPowerSmoothing);

struct StabilityMap {
  std::vector<int> positions;       // unit-cell index 0..N
  std::vector<double> frequencies;  // Hz
  Matrix gain_db;                   // [position x frequency], |A_s(x)/A_s(0)|^2
};

StabilityMap stability_map(const std::vector<double>& frequencies, double p_sig_dbm,
                           const PumpTone& pump, const Amplifier& amp, const IntegratorConfig& cfg,
                           int workers = 1);

}  // namespace twpa
