#pragma once

// Measured-data processing: smoothing, pump-point removal, and
// reconstruction of iso-power profiles referred to the device input.

#include <complex>
#include <span>
#include <vector>

namespace twpa {

/// Centered moving average. Near the edges the window shrinks symmetrically,
/// so output length equals input length. Errors: BadWindow (even, < 1, or
/// longer than the series).
std::vector<double> moving_average(std::span<const double> series, int window);

/// Removes +-pi jumps between consecutive samples.
std::vector<double> unwrap_phase(std::span<const double> phase);

struct FrequencyProfile {
  std::vector<double> frequencies;  // Hz, increasing
  std::vector<double> values;
};

/// Drops the sample at the pump frequency (if any), then applies an
/// 11-point moving average.
FrequencyProfile band_average_profile(const FrequencyProfile& profile, double pump_frequency,
                                      int window = 11);

/// Smooths a complex trace as dB magnitude and unwrapped phase separately.
/// Returns (dB, rad).
std::pair<std::vector<double>, std::vector<double>> smooth_complex_profile(
    std::span<const std::complex<double>> s21, int window);

struct RawVnaDataset {
  std::vector<double> room_temp_powers;  // dBm, increasing
  std::vector<double> frequencies;       // Hz
  std::vector<std::complex<double>> s21; // [power x frequency], row-major
  // Input-line transmission in dB (negative for loss), as returned by
  // input_line_attenuation. Device-input power = RT power + attenuation_db.
  std::vector<double> attenuation_db;

  void validate() const;
  std::complex<double> at(std::size_t power, std::size_t freq) const {
    return s21[power * frequencies.size() + freq];
  }
};

struct IsoPowerProfile {
  double p_sig_dbm = 0.0;                   // frequency average of the cut
  std::vector<double> source_power_dbm;     // selected RT power per frequency
  std::vector<double> device_power_dbm;     // its device-input power
  std::vector<std::complex<double>> s21;

  double max_scatter_db() const;
};

/// Errors: InvalidArgument, GridMismatch, EmptyOverlap.
std::vector<IsoPowerProfile> iso_power_reconstruct(const RawVnaDataset& raw);

}  // namespace twpa
