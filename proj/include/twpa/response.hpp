#pragma once

// Normalized signal gain and pump transmission, reproducing the ON/OFF
// normalization used with two VNAs: gain is (pump on) - (pump off) and pump
// transmission is (signal on) - (signal off), both in dB.

#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "twpa/cme_engine.hpp"

namespace twpa {

struct PumpTone {
  double frequency = 7.5e9;  // Hz
  double power_dbm = -78.4;  // at device input
  bool operator==(const PumpTone&) const = default;
};

struct SweepGrid {
  std::vector<double> signal_frequencies;  // Hz, strictly increasing
  std::vector<double> signal_powers;       // dBm at device input, strictly increasing
  PumpTone pump;

  void validate() const;
  bool operator==(const SweepGrid&) const = default;
};

/// Row-major [power][frequency] matrix.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::vector<double> column(std::size_t c) const;
  std::vector<double> row(std::size_t r) const;
  bool operator==(const Matrix&) const = default;
};

struct ResponseSurface {
  SweepGrid grid;
  Matrix gain_db;      // [power x frequency]
  Matrix pump_s21_db;  // [power x frequency]
};

struct GainPoint {
  double gain_db = 0.0;
  double pump_s21_db = 0.0;
};

/// Memoizes the two reference runs. Pump-off references are keyed by
/// (f_s, f_p, P_sig); the signal-off reference depends only on the pump tone.
/// Safe for concurrent use.
class ReferenceCache {
 public:
  double pump_off_signal(double f_s, double f_p, double p_sig_dbm, const auto& compute) {
    return lookup(pump_off_, std::make_tuple(f_s, f_p, p_sig_dbm), compute);
  }
  double signal_off_pump(double f_p, double p_p_dbm, const auto& compute) {
    return lookup(signal_off_, std::make_tuple(f_p, p_p_dbm, 0.0), compute);
  }
  std::size_t size() const;

 private:
  using Key = std::tuple<double, double, double>;
  double lookup(std::map<Key, double>& table, const Key& key, const auto& compute) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = table.find(key); it != table.end()) return it->second;
    }
    const double value = compute();
    std::unique_lock lock(mutex_);
    table.emplace(key, value);
    return value;
  }

  mutable std::shared_mutex mutex_;
  std::map<Key, double> pump_off_;
  std::map<Key, double> signal_off_;
};

/// Three integrations (both tones, pump off, signal off), normalized in dB.
/// Errors: DegenerateFrequency, propagated engine errors.
GainPoint gain_point(double f_sig, double p_sig_dbm, const PumpTone& pump, const Amplifier& amp,
                     const IntegratorConfig& cfg, ReferenceCache* cache = nullptr);

/// Evaluates every grid cell. Cells are distributed over `workers` threads;
/// the assembled surface does not depend on the worker count. A failing cell
/// is rethrown with its coordinates.
ResponseSurface sweep(const SweepGrid& grid, const Amplifier& amp, const IntegratorConfig& cfg,
                      int workers = 1);

}  // namespace twpa
