#include "twpa/response.hpp"

#include <atomic>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>

#include "twpa/error.hpp"
#include "twpa/units.hpp"

namespace twpa {

void SweepGrid::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  if (signal_frequencies.empty() || signal_powers.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep grid must have at least one frequency and one power");
  }
  for (double f : signal_frequencies) {
    if (!(f > 0.0)) throw Error(ErrorCode::InvalidArgument, "signal frequencies must be positive");
    if (f == pump.frequency) {
      throw Error(ErrorCode::DegenerateFrequency, "pump frequency must not appear in the signal grid");
    }
  }
  if (!increasing(signal_frequencies)) {
    throw Error(ErrorCode::InvalidArgument, "signal frequencies must be strictly increasing");
  }
  if (!increasing(signal_powers)) {
    throw Error(ErrorCode::InvalidArgument, "signal powers must be strictly increasing");
  }
  for (double p : signal_powers) {
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "signal powers must be finite");
  }
  if (!(pump.frequency > 0.0) || !std::isfinite(pump.power_dbm)) {
    throw Error(ErrorCode::InvalidArgument, "pump tone must have positive frequency and finite power");
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<double> Matrix::row(std::size_t r) const {
  return {data.begin() + static_cast<std::ptrdiff_t>(r * cols),
          data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)};
}

std::size_t ReferenceCache::size() const {
  std::shared_lock lock(mutex_);
  return pump_off_.size() + signal_off_.size();
}

GainPoint gain_point(double f_sig, double p_sig_dbm, const PumpTone& pump, const Amplifier& amp,
                     const IntegratorConfig& cfg, ReferenceCache* cache) {
  if (f_sig == pump.frequency) {
    throw Error(ErrorCode::DegenerateFrequency, "signal frequency equals pump frequency");
  }
  const auto freqs = FrequencyTriple::from_pump_signal(hz_to_rad(pump.frequency), hz_to_rad(f_sig));
  const double p_sig = dbm_to_watt(p_sig_dbm);
  const double p_pump = dbm_to_watt(pump.power_dbm);

  const auto on = raw_transmissions(p_sig, p_pump, freqs, amp, cfg);

  auto pump_off = [&] { return raw_transmissions(p_sig, 0.0, freqs, amp, cfg).signal; };
  auto signal_off = [&] { return raw_transmissions(0.0, p_pump, freqs, amp, cfg).pump; };

  const double ref_signal =
      cache ? cache->pump_off_signal(f_sig, pump.frequency, p_sig_dbm, pump_off) : pump_off();
  const double ref_pump =
      cache ? cache->signal_off_pump(pump.frequency, pump.power_dbm, signal_off) : signal_off();

  return GainPoint{power_ratio_to_db(on.signal) - power_ratio_to_db(ref_signal),
                   power_ratio_to_db(on.pump) - power_ratio_to_db(ref_pump)};
}

ResponseSurface sweep(const SweepGrid& grid, const Amplifier& amp, const IntegratorConfig& cfg,
                      int workers) {
  grid.validate();
  cfg.validate();
  const std::size_t nf = grid.signal_frequencies.size();
  const std::size_t np = grid.signal_powers.size();
  const std::size_t cells = nf * np;

  ResponseSurface surface{grid, Matrix(np, nf), Matrix(np, nf)};
  std::vector<std::exception_ptr> failures(cells);
  ReferenceCache cache;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t cell = next++; cell < cells; cell = next++) {
      const std::size_t r = cell / nf;
      const std::size_t c = cell % nf;
      try {
        const auto g = gain_point(grid.signal_frequencies[c], grid.signal_powers[r], grid.pump, amp, cfg,
                                  &cache);
        surface.gain_db(r, c) = g.gain_db;
        surface.pump_s21_db(r, c) = g.pump_s21_db;
      } catch (...) {
        failures[cell] = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(cells)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }

  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (!failures[cell]) continue;
    const std::size_t r = cell / nf;
    const std::size_t c = cell % nf;
    std::ostringstream where;
    where << "sweep cell (f_sig = " << grid.signal_frequencies[c] << " Hz, P_sig = "
          << grid.signal_powers[r] << " dBm): ";
    try {
      std::rethrow_exception(failures[cell]);
    } catch (const Error& e) {
      throw Error(e.code(), where.str() + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidArgument, where.str() + e.what());
    }
  }
  return surface;
}

}  // namespace twpa
