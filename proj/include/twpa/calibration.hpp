#pragma once

// Calibration fits used to extract the simulation inputs from linear
// characterization data: dispersion from transmission phase, SNAIL
// parameters from L(flux), loss tangent from the transmission slope, and
// amplification-chain gain from a thermal noise source.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "twpa/device_model.hpp"
#include "twpa/least_squares.hpp"

namespace twpa {

struct PhaseTrace {
  std::vector<double> frequencies;  // Hz, increasing
  std::vector<double> phase;        // rad; wrapped input is unwrapped before fitting
  double external_flux = 0.0;       // Wb
};

struct MagnitudeTrace {
  std::vector<double> frequencies;  // Hz
  std::vector<double> s21_db;
  double input_power_dbm = 0.0;
};

struct NoisePowerTrace {
  std::vector<double> frequencies;          // Hz
  std::vector<double> source_temperatures;  // K, increasing
  Eigen::MatrixXd measured_power;           // W, [temperature x frequency]
  double bandwidth = 0.0;                   // Hz
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  std::string unit;
  double standard_error = 0.0;  // +inf when unidentifiable; 0 for fixed entries
};

struct FitResult {
  std::string model;
  std::vector<FitParameter> parameters;
  std::vector<FitParameter> fixed;
  Eigen::VectorXd residuals;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;

  /// Value of a fitted or fixed parameter. Throws InvalidArgument if absent.
  double value(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

enum class DispersionStage { One, Two };

struct DispersionFitOptions {
  DispersionStage stage = DispersionStage::One;
  int n_cells = 700;
  // Fixed values; an empty optional means the parameter is fitted.
  std::optional<double> snail_capacitance = 31e-15;  // CJ, F
  std::optional<double> ground_capacitance;          // Cg, F (required in stage two)
  std::optional<double> phase_offset;                // theta0, rad (required in stage two)
  // Starting point for the fitted parameters.
  double initial_inductance = 850e-12;
  double initial_ground_capacitance = 220e-15;
  double initial_snail_capacitance = 31e-15;
  LsqOptions lsq;
};

/// Phase model theta0 + N w sqrt(L Cg) / sqrt(1 - L CJ w^2).
double dispersion_phase(double omega, double theta0, double inductance, double ground_capacitance,
                        double snail_capacitance, int n_cells);

/// Stage one fits (theta0, L, Cg) and optionally CJ; stage two fits L only
/// with Cg and theta0 fixed. Parameter names: theta0 [rad], L [H], Cg [F],
/// CJ [F]. Errors: InvalidArgument, SingularJacobian, NoConvergence.
FitResult fit_dispersion(const PhaseTrace& trace, const DispersionFitOptions& opts = {});

struct FluxSeriesFit {
  std::vector<FitResult> stage_one;
  double mean_ground_capacitance = 0.0;
  std::vector<FitResult> stage_two;
};

/// Runs stage one on every trace, freezes Cg to the flux average and refits
/// L per trace with each trace's stage-one theta0.
FluxSeriesFit fit_dispersion_flux_series(const std::vector<PhaseTrace>& traces,
                                         const DispersionFitOptions& opts = {});

struct WavevectorSeries {
  std::vector<double> frequencies;
  std::vector<double> k;  // rad/m
  std::vector<std::string> warnings;
};

/// k = (theta + theta0) / l per frequency; theta0 is the additive phase
/// correction. Non-positive k is kept but flagged. Errors: InvalidArgument.
WavevectorSeries k_from_phase(const PhaseTrace& trace, double theta0, double length);

struct FluxInductancePoint {
  double external_flux = 0.0;  // Wb
  double inductance = 0.0;     // H
};

struct InductanceFitOptions {
  double initial_ratio = 0.05;
  double initial_critical_current = 1e-6;
  LsqOptions lsq;
};

/// Linear SNAIL inductance phi0 / (alpha_tilde(flux; r) Ic) for a flux bias.
double snail_inductance(double external_flux, double ratio, double critical_current);

/// Fits (r, Ic) with names r [-], Ic [A]. Errors: InvalidArgument, NoConvergence.
FitResult fit_inductance_flux(const std::vector<FluxInductancePoint>& points,
                              const InductanceFitOptions& opts = {});

/// tan(delta) from a dB-per-radian slope of |S21| against k l. Attenuation
/// slopes are negative and give a positive loss tangent.
double loss_tangent_from_slope(double slope_db_per_rad);

/// Linear regression of s21_db on k l. Parameters: tan_delta [-], slope
/// [dB/rad], intercept [dB]. Errors: GridMismatch, DegenerateAbscissa.
FitResult fit_loss_tangent(const MagnitudeTrace& magnitude, const std::vector<double>& k_times_l);

/// Effective noise temperature of a thermal source, (hbar w / 2 kB) coth(hbar w / 2 kB T).
/// T = 0 gives the vacuum floor hbar w / 2 kB.
double noise_source_temperature(double temperature, double omega);

/// Per-frequency fit of P = (N_source + N_sys) G kB df. Parameters: G_sys
/// [dB], N_sys [K]; frequency is recorded as fixed. Errors: InvalidArgument,
/// GridMismatch, NegativeGain, NoConvergence.
std::vector<FitResult> fit_noise_calibration(const NoisePowerTrace& trace);

/// full - g_sys per frequency. Errors: GridMismatch.
std::vector<double> input_line_attenuation(const std::vector<double>& full_s21_db,
                                           const std::vector<double>& g_sys_db);

}  // namespace twpa
