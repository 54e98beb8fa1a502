#include "twpa/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twpa/error.hpp"

namespace twpa {

namespace {

constexpr double kPi = std::numbers::pi;

// Normalized current I/Ic as a function of the reduced phase phi = Phi/phi0.
double normalized_current(double phi, double phi_ext, double r) {
  return r * std::sin(phi) + std::sin((phi - phi_ext) / 3.0);
}

double normalized_current_slope(double phi, double phi_ext, double r) {
  return r * std::cos(phi) + std::cos((phi - phi_ext) / 3.0) / 3.0;
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void DeviceParams::validate() const {
  if (n_cells < 1) invalid("n_cells must be >= 1");
  if (!(cell_length > 0.0)) invalid("cell_length must be > 0");
  if (!(critical_current > 0.0)) invalid("critical_current must be > 0");
  if (!(junction_ratio >= 0.0 && junction_ratio < 1.0)) invalid("junction_ratio must be in [0, 1)");
  if (!(snail_capacitance > 0.0)) invalid("snail_capacitance must be > 0");
  if (!(ground_capacitance > 0.0)) invalid("ground_capacitance must be > 0");
  if (!std::isfinite(external_flux)) invalid("external_flux must be finite");
}

double snail_current(double flux, const DeviceParams& params) {
  const double phi0 = PhysicalConstants::reduced_flux_quantum;
  return params.critical_current *
         normalized_current(flux / phi0, params.external_flux / phi0, params.junction_ratio);
}

SnailOperatingPoint solve_operating_point(const DeviceParams& params) {
  params.validate();
  const double phi0 = PhysicalConstants::reduced_flux_quantum;
  const double r = params.junction_ratio;
  const double phi_ext = params.external_flux / phi0;

  auto f = [&](double phi) { return normalized_current(phi, phi_ext, r); };

  double lo = phi_ext - kPi;
  double hi = phi_ext + kPi;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) hi = lo;
  else if (f_hi == 0.0) lo = hi;
  else if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw Error(ErrorCode::NoRoot, "current-phase relation does not change sign in the bias bracket");
  }

  // Bisection to a narrow bracket, then Newton polishing kept inside it.
  for (int i = 0; i < 60 && hi - lo > 1e-6; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  double phi = 0.5 * (lo + hi);
  for (int i = 0; i < 50; ++i) {
    const double value = f(phi);
    if (value == 0.0) break;
    const double slope = normalized_current_slope(phi, phi_ext, r);
    if (slope == 0.0) break;
    const double next = std::clamp(phi - value / slope, lo, hi);
    if (std::abs(f(next)) >= std::abs(value)) break;
    phi = next;
  }
  if (!(std::abs(f(phi)) < 1e-12)) {
    throw Error(ErrorCode::NoRoot, "root refinement did not reach |I| < 1e-12 Ic");
  }

  SnailOperatingPoint op;
  op.phase_bias = phi * phi0;
  const double c_large = std::cos((phi - phi_ext) / 3.0);
  const double c_small = std::cos(phi);
  op.alpha_tilde = r * c_small + c_large / 3.0;
  op.gamma_tilde = (r * c_small + c_large / 27.0) / 6.0;
  if (!(op.alpha_tilde > 0.0)) {
    std::ostringstream msg;
    msg << "alpha_tilde = " << op.alpha_tilde << " <= 0, linear inductance undefined";
    throw Error(ErrorCode::NonpositiveAlpha, msg.str());
  }
  op.inductance = phi0 / (op.alpha_tilde * params.critical_current);
  op.kerr_scale = 6.0 * op.gamma_tilde / (op.alpha_tilde * op.alpha_tilde * op.alpha_tilde);
  return op;
}

double plasma_frequency(const SnailOperatingPoint& op, const DeviceParams& params) {
  return 1.0 / std::sqrt(op.inductance * params.snail_capacitance);
}

double dispersion_k(double omega, const SnailOperatingPoint& op, const DeviceParams& params) {
  const double L = op.inductance;
  const double denom = 1.0 - L * params.snail_capacitance * omega * omega;
  if (!(denom > 0.0)) {
    std::ostringstream msg;
    msg << "omega = " << omega << " rad/s is at or above the plasma frequency "
        << plasma_frequency(op, params) << " rad/s";
    throw Error(ErrorCode::AbovePlasmaFrequency, msg.str());
  }
  return omega * std::sqrt(L * params.ground_capacitance) / (params.cell_length * std::sqrt(denom));
}

bool exceeds_continuum_limit(double k, const DeviceParams& params) {
  return k * params.cell_length > kContinuumLimitKa;
}

double loss_k_imag(double k, double tan_delta) { return tan_delta * k / 2.0; }

double char_impedance(const SnailOperatingPoint& op, const DeviceParams& params) {
  return std::sqrt(op.inductance / params.ground_capacitance);
}

void LossModel::validate() const {
  if (!(pump_tan_delta >= 0.0)) invalid("pump tan delta must be >= 0");
  for (std::size_t i = 0; i < signal_table.size(); ++i) {
    const auto& [power, td] = signal_table[i];
    if (!std::isfinite(power)) invalid("loss table power must be finite");
    if (!(td >= 0.0)) invalid("loss table tan delta must be >= 0");
    if (i > 0 && !(power > signal_table[i - 1].first)) {
      invalid("loss table powers must be strictly increasing");
    }
  }
}

double tan_delta_lookup(const LossModel& model, ToneRole role, double power_dbm) {
  if (role == ToneRole::Pump) return model.pump_tan_delta;
  const auto& table = model.signal_table;
  if (table.empty()) throw Error(ErrorCode::EmptyTable, "signal loss table is empty");
  if (!(power_dbm > table.front().first)) return table.front().second;  // also catches -inf
  if (power_dbm >= table.back().first) return table.back().second;
  const auto upper = std::upper_bound(table.begin(), table.end(), power_dbm,
                                      [](double p, const auto& node) { return p < node.first; });
  const auto lower = upper - 1;
  if (power_dbm == lower->first) return lower->second;
  const double t = (power_dbm - lower->first) / (upper->first - lower->first);
  return lower->second + t * (upper->second - lower->second);
}

Amplifier make_amplifier(const DeviceParams& device, const LossModel& losses) {
  losses.validate();
  return Amplifier{device, solve_operating_point(device), losses};
}

}  // namespace twpa
