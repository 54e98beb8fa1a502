#include "twpa/compression.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "twpa/error.hpp"
#include "twpa/reduction.hpp"
#include "twpa/units.hpp"

namespace twpa {

namespace {

// 10^0.1 - 1: the power-ratio excess that corresponds to a 1 dB drop.
const double kOneDbExcess = std::pow(10.0, 0.1) - 1.0;

double interpolate(double x0, double y0, double x1, double y1, double x) {
  return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
}

}  // namespace

double analytic_gain(const AnalyticGainModel& model, double signal_power_w) {
  if (!(signal_power_w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "signal power must be >= 0");
  if (!(model.pump_power > 0.0)) throw Error(ErrorCode::InvalidArgument, "pump power must be > 0");
  return model.g_lin / (1.0 + 2.0 * model.g_lin * signal_power_w / model.pump_power);
}

double analytic_p1db(const AnalyticGainModel& model) {
  if (!(model.g_lin > 0.0)) throw Error(ErrorCode::InvalidArgument, "g_lin must be > 0");
  if (!(model.pump_power > 0.0)) throw Error(ErrorCode::InvalidArgument, "pump power must be > 0");
  return watt_to_dbm(model.pump_power) + 10.0 * std::log10(kOneDbExcess / (2.0 * model.g_lin));
}

CompressionPoint extract_p1db(std::span<const double> powers_dbm, std::span<const double> gains_db,
                              int smoothing_window) {
  if (powers_dbm.size() != gains_db.size()) {
    throw Error(ErrorCode::GridMismatch, "power and gain series lengths differ");
  }
  if (smoothing_window < 1 || powers_dbm.size() < 2 * static_cast<std::size_t>(smoothing_window) ||
      powers_dbm.size() < 2) {
    std::ostringstream msg;
    msg << "P1dB extraction needs at least 2 x window (" << smoothing_window << ") samples, got "
        << powers_dbm.size();
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  for (std::size_t i = 1; i < powers_dbm.size(); ++i) {
    if (!(powers_dbm[i] > powers_dbm[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "powers must be strictly increasing");
    }
  }

  const auto smooth = moving_average(gains_db, smoothing_window);
  CompressionPoint cp;
  cp.g_lin_db = smooth.front();
  const double threshold = cp.g_lin_db - 1.0;

  std::size_t hit = 0;
  for (std::size_t i = 1; i < smooth.size(); ++i) {
    if (smooth[i] <= threshold) {
      hit = i;
      break;
    }
  }
  if (hit == 0) {
    throw Error(ErrorCode::NoCrossing, "gain never drops 1 dB below its low-power value");
  }
  cp.p1db_dbm = interpolate(smooth[hit - 1], powers_dbm[hit - 1], smooth[hit], powers_dbm[hit], threshold);
  for (std::size_t i = hit + 1; i < smooth.size(); ++i) {
    if (smooth[i] > threshold) {
      cp.non_monotonic = true;
      break;
    }
  }
  return cp;
}

CompressionSummary compression_summary(const ResponseSurface& surface, int smoothing_window) {
  const auto& powers = surface.grid.signal_powers;
  if (powers.size() < 2) throw Error(ErrorCode::InvalidArgument, "compression summary needs >= 2 power rows");
  // Short power axes get the largest odd window that still leaves 2 x window samples.
  int window = smoothing_window;
  while (window > 1 && powers.size() < 2 * static_cast<std::size_t>(window)) window -= 2;

  CompressionSummary s;
  const std::size_t nf = surface.grid.signal_frequencies.size();
  s.frequencies = surface.grid.signal_frequencies;
  s.g_lin_db.resize(nf);
  s.p1db_dbm.resize(nf);
  s.pout_at_p1db_dbm.resize(nf);
  s.pump_s21_at_p1db_db.resize(nf);
  s.non_monotonic.assign(nf, false);

  for (std::size_t c = 0; c < nf; ++c) {
    const auto gains = surface.gain_db.column(c);
    try {
      const auto cp = extract_p1db(powers, gains, window);
      s.g_lin_db[c] = cp.g_lin_db;
      s.p1db_dbm[c] = cp.p1db_dbm;
      s.pout_at_p1db_dbm[c] = cp.p1db_dbm + cp.g_lin_db - 1.0;
      s.non_monotonic[c] = cp.non_monotonic;

      const auto pump = moving_average(surface.pump_s21_db.column(c), window);
      std::size_t hi = 1;
      while (hi + 1 < powers.size() && powers[hi] < cp.p1db_dbm) ++hi;
      s.pump_s21_at_p1db_db[c] = interpolate(powers[hi - 1], pump[hi - 1], powers[hi], pump[hi], cp.p1db_dbm);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
      s.g_lin_db[c] = moving_average(gains, window).front();
    }
  }
  return s;
}

StabilityMap stability_map(const std::vector<double>& frequencies, double p_sig_dbm, const PumpTone& pump,
                           const Amplifier& amp, const IntegratorConfig& cfg, int workers) {
  const int n_cells = amp.device.n_cells;
  StabilityMap map;
  map.frequencies = frequencies;
  map.positions.resize(static_cast<std::size_t>(n_cells) + 1);
  for (int j = 0; j <= n_cells; ++j) map.positions[static_cast<std::size_t>(j)] = j;
  map.gain_db = Matrix(map.positions.size(), frequencies.size());

  IntegratorConfig per_cell = cfg;
  per_cell.dense_output_points = n_cells + 1;
  const double p_sig = dbm_to_watt(p_sig_dbm);
  const double p_pump = dbm_to_watt(pump.power_dbm);
  const double z0 = char_impedance(amp.op, amp.device);
  if (!(p_sig > 0.0)) throw Error(ErrorCode::InvalidArgument, "stability map needs a finite signal power");

  std::vector<std::exception_ptr> failures(frequencies.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < frequencies.size(); c = next++) {
      try {
        const auto freqs =
            FrequencyTriple::from_pump_signal(hz_to_rad(pump.frequency), hz_to_rad(frequencies[c]));
        const auto coeffs = nonlinear_coefficients(freqs, amp, p_sig);
        const auto s0 = initial_state(p_sig, p_pump, freqs, z0);
        const auto traj = integrate(s0, coeffs, amp.device.length(), per_cell);
        const double ref = std::norm(s0.a_s);
        for (std::size_t j = 0; j < traj.size(); ++j) {
          map.gain_db(j, c) = power_ratio_to_db(std::norm(traj[j].a_s) / ref);
        }
      } catch (...) {
        failures[c] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(frequencies.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return map;
}

}  // namespace twpa
