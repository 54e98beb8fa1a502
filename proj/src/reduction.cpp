#include "twpa/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "twpa/error.hpp"

namespace twpa {

std::vector<double> moving_average(std::span<const double> series, int window) {
  const auto n = static_cast<long>(series.size());
  if (window < 1 || window % 2 == 0 || window > n) {
    std::ostringstream msg;
    msg << "moving-average window " << window << " invalid for a series of length " << n;
    throw Error(ErrorCode::BadWindow, msg.str());
  }
  const long half = window / 2;
  std::vector<double> out(series.size());
  for (long i = 0; i < n; ++i) {
    const long h = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (long j = i - h; j <= i + h; ++j) sum += series[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<double> unwrap_phase(std::span<const double> phase) {
  std::vector<double> out(phase.begin(), phase.end());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double offset = 0.0;
  for (std::size_t i = 1; i < phase.size(); ++i) {
    const double jump = phase[i] - phase[i - 1];
    if (jump > std::numbers::pi) offset -= two_pi * std::round(jump / two_pi);
    else if (jump < -std::numbers::pi) offset += two_pi * std::round(-jump / two_pi);
    out[i] = phase[i] + offset;
  }
  return out;
}

FrequencyProfile band_average_profile(const FrequencyProfile& profile, double pump_frequency, int window) {
  if (profile.frequencies.size() != profile.values.size()) {
    throw Error(ErrorCode::GridMismatch, "profile frequency and value lengths differ");
  }
  FrequencyProfile kept;
  for (std::size_t i = 0; i < profile.frequencies.size(); ++i) {
    if (profile.frequencies[i] == pump_frequency) continue;
    kept.frequencies.push_back(profile.frequencies[i]);
    kept.values.push_back(profile.values[i]);
  }
  kept.values = moving_average(kept.values, window);
  return kept;
}

std::pair<std::vector<double>, std::vector<double>> smooth_complex_profile(
    std::span<const std::complex<double>> s21, int window) {
  std::vector<double> mag_db(s21.size()), phase(s21.size());
  for (std::size_t i = 0; i < s21.size(); ++i) {
    mag_db[i] = 20.0 * std::log10(std::abs(s21[i]));
    phase[i] = std::arg(s21[i]);
  }
  return {moving_average(mag_db, window), moving_average(unwrap_phase(phase), window)};
}

void RawVnaDataset::validate() const {
  if (room_temp_powers.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "iso-power reconstruction needs at least two RT powers");
  }
  if (frequencies.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no frequencies");
  if (s21.size() != room_temp_powers.size() * frequencies.size()) {
    throw Error(ErrorCode::GridMismatch, "S21 matrix shape does not match the power/frequency axes");
  }
  if (attenuation_db.size() != frequencies.size()) {
    throw Error(ErrorCode::GridMismatch, "attenuation length does not match the frequency axis");
  }
  for (double a : attenuation_db)
    if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "attenuation must be finite");
  for (std::size_t i = 1; i < room_temp_powers.size(); ++i) {
    if (!(room_temp_powers[i] > room_temp_powers[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "RT powers must be strictly increasing");
    }
  }
}

double IsoPowerProfile::max_scatter_db() const {
  double worst = 0.0;
  for (double p : device_power_dbm) worst = std::max(worst, std::abs(p - p_sig_dbm));
  return worst;
}

std::vector<IsoPowerProfile> iso_power_reconstruct(const RawVnaDataset& raw) {
  raw.validate();
  const std::size_t np = raw.room_temp_powers.size();
  const std::size_t nf = raw.frequencies.size();
  auto device_power = [&](std::size_t p, std::size_t f) {
    return raw.room_temp_powers[p] + raw.attenuation_db[f];
  };

  double p_min = -std::numeric_limits<double>::infinity();
  double p_max = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < nf; ++f) {
    p_min = std::max(p_min, device_power(0, f));
    p_max = std::min(p_max, device_power(np - 1, f));
  }
  if (p_min > p_max) {
    std::ostringstream msg;
    msg << "no device-input power common to all frequencies (P_min = " << p_min
        << " dBm > P_max = " << p_max << " dBm)";
    throw Error(ErrorCode::EmptyOverlap, msg.str());
  }

  // Per-frequency truncation of the power axis.
  constexpr double eps = 1e-9;
  std::vector<std::vector<std::size_t>> kept(nf);
  std::size_t cuts = np;
  for (std::size_t f = 0; f < nf; ++f) {
    for (std::size_t p = 0; p < np; ++p) {
      const double pd = device_power(p, f);
      if (pd >= p_min - eps && pd <= p_max + eps) kept[f].push_back(p);
    }
    cuts = std::min(cuts, kept[f].size());
  }

  std::vector<IsoPowerProfile> profiles;
  profiles.reserve(cuts);
  for (std::size_t k = 0; k < cuts; ++k) {
    double sum = 0.0;
    for (std::size_t f = 0; f < nf; ++f) sum += device_power(kept[f][k], f);
    IsoPowerProfile prof;
    prof.p_sig_dbm = sum / static_cast<double>(nf);
    for (std::size_t f = 0; f < nf; ++f) {
      // Nearest retained sample; on an exact tie the lower power wins.
      std::size_t best = kept[f].front();
      double best_dist = std::abs(device_power(best, f) - prof.p_sig_dbm);
      for (std::size_t p : kept[f]) {
        const double dist = std::abs(device_power(p, f) - prof.p_sig_dbm);
        if (dist < best_dist) {
          best = p;
          best_dist = dist;
        }
      }
      prof.source_power_dbm.push_back(raw.room_temp_powers[best]);
      prof.device_power_dbm.push_back(device_power(best, f));
      prof.s21.push_back(raw.at(best, f));
    }
    profiles.push_back(std::move(prof));
  }
  return profiles;
}

}  // namespace twpa
