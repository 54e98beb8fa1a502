#pragma once

// Coupled-mode equations for the pump, signal and idler envelopes of a
// four-wave-mixing SNAIL TWPA, and their numerical integration along x.

#include <complex>
#include <vector>

#include "twpa/device_model.hpp"

namespace twpa {

using Complex = std::complex<double>;

/// Pump/signal/idler angular frequencies with 2 omega_p = omega_s + omega_i.
struct FrequencyTriple {
  double omega_p = 0.0;
  double omega_s = 0.0;
  double omega_i = 0.0;

  /// Builds the triple from pump and signal, deriving the idler.
  /// Errors: InvalidArgument (non-positive tones, idler <= 0),
  /// DegenerateFrequency (signal == pump).
  static FrequencyTriple from_pump_signal(double omega_p, double omega_s);
};

struct NonlinearCoefficients {
  // self-Kerr, 1/(m Wb^2)
  double alpha_pp = 0.0, alpha_ss = 0.0, alpha_ii = 0.0;
  // cross-Kerr, alpha_jm multiplies |A_m|^2 in the equation for A_j
  double alpha_sp = 0.0, alpha_ip = 0.0, alpha_si = 0.0, alpha_is = 0.0, alpha_ps = 0.0,
         alpha_pi = 0.0;
  // four-wave mixing
  double kappa_si = 0.0, kappa_is = 0.0, kappa_psi = 0.0;
  double delta_k_linear = 0.0;  // 2 k_p - k_s - k_i, rad/m
  double loss_p = 0.0, loss_s = 0.0, loss_i = 0.0;  // k'', Np/m

  // Linear wavevectors used to build the coefficients, kept for diagnostics.
  double k_p = 0.0, k_s = 0.0, k_i = 0.0;
};

/// Coefficients for one operating point. Signal and idler loss tangents come
/// from the table at the signal input power; the pump uses its fixed value.
/// Errors: AbovePlasmaFrequency, EmptyTable.
NonlinearCoefficients nonlinear_coefficients(const FrequencyTriple& freqs, const Amplifier& amp,
                                             double signal_power_w);

/// Largest k a among the three tones of a coefficient set.
double max_phase_per_cell(const NonlinearCoefficients& coeffs, const DeviceParams& device);

struct EnvelopeState {
  double x = 0.0;  // m
  Complex a_p, a_s, a_i;  // Wb
};

/// A_{s,p}(0) = sqrt(P Z0)/omega, zero phase; idler starts empty.
EnvelopeState initial_state(double signal_power_w, double pump_power_w,
                            const FrequencyTriple& freqs, double z0);

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-24;  // Wb
  double max_step = 1e-4;  // m
  int dense_output_points = 201;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

/// Right-hand side of the coupled-mode equations at position x.
void cme_rhs(const NonlinearCoefficients& c, double x, const Complex& a_p, const Complex& a_s,
             const Complex& a_i, Complex& d_p, Complex& d_s, Complex& d_i);

/// Integrates over [0, length]. The result holds cfg.dense_output_points
/// uniformly spaced samples, the first at x = 0 and the last at x = length.
/// Errors: InvalidArgument, StepSizeUnderflow, NonFiniteState.
std::vector<EnvelopeState> integrate(const EnvelopeState& state0, const NonlinearCoefficients& coeffs,
                                     double length, const IntegratorConfig& cfg);

struct RawTransmission {
  double signal = 1.0;  // |A_s(l)/A_s(0)|^2
  double pump = 1.0;    // |A_p(l)/A_p(0)|^2
};

/// Power transmissions through the device. A tone injected with zero power
/// reports its loss-only transmission exp(-2 k'' l).
RawTransmission raw_transmissions(double signal_power_w, double pump_power_w,
                                  const FrequencyTriple& freqs, const Amplifier& amp,
                                  const IntegratorConfig& cfg);

}  // namespace twpa
