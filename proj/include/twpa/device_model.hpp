#pragma once

// SNAIL-chain device physics: current-phase relation, flux-dependent linear
// inductance, dispersion, characteristic impedance and dielectric loss.
// Everything here is SI; dBm only appears in the loss-table lookup.

#include <numbers>
#include <utility>
#include <vector>

namespace twpa {

/// CODATA 2018 exact/recommended values. Every module reads constants from here.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;           // J s
  static constexpr double electron_charge = 1.602176634e-19;  // C
  static constexpr double boltzmann = 1.380649e-23;         // J/K
  static constexpr double reduced_flux_quantum = hbar / (2.0 * electron_charge);  // Wb
  static constexpr double flux_quantum = 2.0 * std::numbers::pi * reduced_flux_quantum;  // Wb
};

struct DeviceParams {
  int n_cells = 700;
  double cell_length = 8.7e-6;         // m
  double junction_ratio = 0.062;       // r, small/large junction critical-current ratio
  double critical_current = 1.4e-6;    // A, large junctions
  double snail_capacitance = 31e-15;   // F
  double ground_capacitance = 223.5e-15;  // F
  double external_flux = 0.5 * PhysicalConstants::flux_quantum;  // Wb

  double length() const { return n_cells * cell_length; }
  bool operator==(const DeviceParams&) const = default;

  /// Throws Error(InvalidArgument) when an invariant is violated.
  void validate() const;
};

/// Taylor coefficients of the SNAIL current-phase relation around its zero.
struct SnailOperatingPoint {
  double phase_bias = 0.0;   // Phi*, Wb
  double alpha_tilde = 0.0;
  double gamma_tilde = 0.0;
  double inductance = 0.0;   // H, phi0 / (alpha_tilde Ic)
  double kerr_scale = 0.0;   // 6 gamma_tilde / alpha_tilde^3
};

/// SNAIL current I(Phi) for the given bias, in A.
double snail_current(double flux, const DeviceParams& params);

/// Finds Phi* with I(Phi*) = 0 in [Phi_ext - Phi0/2, Phi_ext + Phi0/2] and
/// evaluates the linear/cubic expansion coefficients there.
/// Errors: NoRoot, NonpositiveAlpha.
SnailOperatingPoint solve_operating_point(const DeviceParams& params);

/// Linear wavevector in rad/m. Errors: AbovePlasmaFrequency.
double dispersion_k(double omega, const SnailOperatingPoint& op, const DeviceParams& params);

/// Angular plasma frequency 1/sqrt(L CJ).
double plasma_frequency(const SnailOperatingPoint& op, const DeviceParams& params);

/// True when k a exceeds the range where the continuum wave equation holds.
bool exceeds_continuum_limit(double k, const DeviceParams& params);

inline constexpr double kContinuumLimitKa = 0.5;  // rad per cell

/// Field attenuation rate k'' = tan(delta) k / 2, Np/m.
double loss_k_imag(double k, double tan_delta);

double char_impedance(const SnailOperatingPoint& op, const DeviceParams& params);

enum class ToneRole { Pump, Signal, Idler };

/// Dielectric loss model: one pump value plus a signal/idler table indexed by
/// the tone's device-input power. The table is interpolated linearly in dBm and
/// clamped at both ends.
struct LossModel {
  double pump_tan_delta = 2.19e-3;
  std::vector<std::pair<double, double>> signal_table;  // (dBm, tan delta), increasing power

  void validate() const;
  bool operator==(const LossModel&) const = default;
};

/// Errors: EmptyTable (signal/idler roles only).
double tan_delta_lookup(const LossModel& model, ToneRole role, double power_dbm);

/// Device, its solved operating point and loss model travel together through
/// the simulation layers. Tests may edit `op` directly, e.g. to switch the
/// nonlinearity off with kerr_scale = 0.
struct Amplifier {
  DeviceParams device;
  SnailOperatingPoint op;
  LossModel losses;
};

Amplifier make_amplifier(const DeviceParams& device, const LossModel& losses);

}  // namespace twpa
