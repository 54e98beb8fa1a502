#include "twpa/calibration.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "twpa/error.hpp"
#include "twpa/reduction.hpp"

namespace twpa {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

void check_increasing(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      std::ostringstream msg;
      msg << what << " must be strictly increasing";
      invalid(msg.str());
    }
  }
}

double two_pi() { return 2.0 * std::numbers::pi; }

// Turns an optimizer result into named parameters. `entries` pairs each
// fitted slot with its name and unit.
void fill_fitted(FitResult& out, const LsqResult& lsq,
                 const std::vector<std::pair<std::string, std::string>>& entries) {
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    out.parameters.push_back({entries[j].first, lsq.params[idx], entries[j].second, lsq.standard_errors[idx]});
  }
  out.residuals = lsq.residuals;
  out.residual_norm = lsq.residual_norm;
  out.iterations = lsq.iterations;
}

}  // namespace

double FitResult::value(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p.value;
  for (const auto& p : fixed)
    if (p.name == name) return p.value;
  invalid("fit result has no parameter '" + name + "'");
}

double FitResult::standard_error(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p.standard_error;
  for (const auto& p : fixed)
    if (p.name == name) return 0.0;
  invalid("fit result has no parameter '" + name + "'");
}

double dispersion_phase(double omega, double theta0, double inductance, double ground_capacitance,
                        double snail_capacitance, int n_cells) {
  const double denom = 1.0 - inductance * snail_capacitance * omega * omega;
  if (!(denom > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return theta0 + n_cells * omega * std::sqrt(inductance * ground_capacitance) / std::sqrt(denom);
}

FitResult fit_dispersion(const PhaseTrace& trace, const DispersionFitOptions& opts) {
  if (trace.frequencies.size() != trace.phase.size()) {
    throw Error(ErrorCode::GridMismatch, "phase trace frequency and phase lengths differ");
  }
  if (trace.frequencies.size() < 4) invalid("dispersion fit needs at least 4 points");
  check_increasing(trace.frequencies, "phase-trace frequencies");
  if (opts.n_cells < 1) invalid("n_cells must be >= 1");
  const bool stage_two = opts.stage == DispersionStage::Two;
  if (stage_two && !(opts.ground_capacitance && opts.phase_offset)) {
    invalid("stage-two dispersion fit requires fixed Cg and theta0");
  }

  const auto theta = unwrap_phase(trace.phase);
  std::vector<double> omega(trace.frequencies.size());
  for (std::size_t i = 0; i < omega.size(); ++i) omega[i] = two_pi() * trace.frequencies[i];

  // Slot layout: fitted parameters in the order theta0, L, Cg, CJ.
  const bool fit_theta0 = !opts.phase_offset;
  const bool fit_cg = !opts.ground_capacitance;
  const bool fit_cj = !opts.snail_capacitance;
  std::vector<std::pair<std::string, std::string>> names;
  std::vector<double> p0;
  const double cj_start = fit_cj ? opts.initial_snail_capacitance : *opts.snail_capacitance;
  const double cg_start = fit_cg ? opts.initial_ground_capacitance : *opts.ground_capacitance;
  if (fit_theta0) {
    names.emplace_back("theta0", "rad");
    p0.push_back(theta.front() -
                 dispersion_phase(omega.front(), 0.0, opts.initial_inductance, cg_start, cj_start, opts.n_cells));
  }
  names.emplace_back("L", "H");
  p0.push_back(opts.initial_inductance);
  if (fit_cg) {
    names.emplace_back("Cg", "F");
    p0.push_back(cg_start);
  }
  if (fit_cj) {
    names.emplace_back("CJ", "F");
    p0.push_back(cj_start);
  }

  auto unpack = [&](const Eigen::VectorXd& p) {
    Eigen::Index j = 0;
    const double t0 = fit_theta0 ? p[j++] : *opts.phase_offset;
    const double l = p[j++];
    const double cg = fit_cg ? p[j++] : *opts.ground_capacitance;
    const double cj = fit_cj ? p[j++] : *opts.snail_capacitance;
    return std::array<double, 4>{t0, l, cg, cj};
  };
  auto residuals = [&](const Eigen::VectorXd& p) {
    const auto [t0, l, cg, cj] = unpack(p);
    Eigen::VectorXd r(static_cast<Eigen::Index>(omega.size()));
    for (std::size_t i = 0; i < omega.size(); ++i) {
      const double model = (l > 0.0 && cg > 0.0 && cj >= 0.0)
                               ? dispersion_phase(omega[i], t0, l, cg, cj, opts.n_cells)
                               : std::numeric_limits<double>::quiet_NaN();
      r[static_cast<Eigen::Index>(i)] = model - theta[i];
    }
    return r;
  };

  const auto lsq = levenberg_marquardt(residuals, Eigen::Map<const Eigen::VectorXd>(p0.data(), static_cast<Eigen::Index>(p0.size())),
                                       opts.lsq);
  FitResult out;
  out.model = stage_two ? "dispersion_stage_two" : "dispersion_stage_one";
  fill_fitted(out, lsq, names);
  if (!fit_theta0) out.fixed.push_back({"theta0", *opts.phase_offset, "rad", 0.0});
  if (!fit_cg) out.fixed.push_back({"Cg", *opts.ground_capacitance, "F", 0.0});
  if (!fit_cj) out.fixed.push_back({"CJ", *opts.snail_capacitance, "F", 0.0});
  out.fixed.push_back({"N", static_cast<double>(opts.n_cells), "", 0.0});
  out.fixed.push_back({"external_flux", trace.external_flux, "Wb", 0.0});
  for (const auto& p : out.parameters) {
    if (std::isinf(p.standard_error)) out.warnings.push_back("parameter " + p.name + " is not identifiable");
  }
  return out;
}

FluxSeriesFit fit_dispersion_flux_series(const std::vector<PhaseTrace>& traces, const DispersionFitOptions& opts) {
  if (traces.empty()) invalid("flux series is empty");
  FluxSeriesFit out;
  DispersionFitOptions one = opts;
  one.stage = DispersionStage::One;
  one.ground_capacitance.reset();
  one.phase_offset.reset();
  double cg_sum = 0.0;
  for (const auto& t : traces) {
    out.stage_one.push_back(fit_dispersion(t, one));
    cg_sum += out.stage_one.back().value("Cg");
  }
  out.mean_ground_capacitance = cg_sum / static_cast<double>(traces.size());

  for (std::size_t i = 0; i < traces.size(); ++i) {
    DispersionFitOptions two = opts;
    two.stage = DispersionStage::Two;
    two.ground_capacitance = out.mean_ground_capacitance;
    two.phase_offset = out.stage_one[i].value("theta0");
    two.initial_inductance = out.stage_one[i].value("L");
    if (!opts.snail_capacitance) two.snail_capacitance = out.stage_one[i].value("CJ");
    out.stage_two.push_back(fit_dispersion(traces[i], two));
  }
  return out;
}

WavevectorSeries k_from_phase(const PhaseTrace& trace, double theta0, double length) {
  if (!(length > 0.0)) invalid("device length must be > 0");
  if (trace.frequencies.size() != trace.phase.size()) {
    throw Error(ErrorCode::GridMismatch, "phase trace frequency and phase lengths differ");
  }
  WavevectorSeries out;
  out.frequencies = trace.frequencies;
  out.k.resize(trace.phase.size());
  std::size_t negative = 0;
  for (std::size_t i = 0; i < trace.phase.size(); ++i) {
    out.k[i] = (trace.phase[i] + theta0) / length;
    if (!(out.k[i] > 0.0)) ++negative;
  }
  if (negative > 0) {
    std::ostringstream msg;
    msg << negative << " non-positive wavevector(s); the phase offset is likely wrong";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double snail_inductance(double external_flux, double ratio, double critical_current) {
  DeviceParams d;
  d.junction_ratio = ratio;
  d.critical_current = critical_current;
  d.external_flux = external_flux;
  return solve_operating_point(d).inductance;
}

FitResult fit_inductance_flux(const std::vector<FluxInductancePoint>& points, const InductanceFitOptions& opts) {
  if (points.size() < 3) invalid("inductance fit needs at least 3 flux points");
  double fmin = points.front().external_flux, fmax = fmin;
  for (const auto& p : points) {
    if (!(p.inductance > 0.0) || !std::isfinite(p.external_flux)) invalid("inductances must be > 0 and flux finite");
    fmin = std::min(fmin, p.external_flux);
    fmax = std::max(fmax, p.external_flux);
  }
  if (!(fmax - fmin > 0.01 * PhysicalConstants::flux_quantum)) {
    invalid("flux points must span more than 1% of a flux quantum");
  }

  // Relative residuals: every flux point weighs the same.
  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      double model = std::numeric_limits<double>::quiet_NaN();
      try {
        model = snail_inductance(points[i].external_flux, p[0], p[1]);
      } catch (const Error&) {
        // Outside the single-valued regime; reject the trial point.
      }
      r[static_cast<Eigen::Index>(i)] = model / points[i].inductance - 1.0;
    }
    return r;
  };
  Eigen::Vector2d p0(opts.initial_ratio, opts.initial_critical_current);
  const auto lsq = levenberg_marquardt(residuals, p0, opts.lsq);
  FitResult out;
  out.model = "snail_inductance";
  fill_fitted(out, lsq, {{"r", ""}, {"Ic", "A"}});
  return out;
}

double loss_tangent_from_slope(double slope_db_per_rad) {
  // |S21|dB = -(20 / ln 10) (tan d / 2) k l
  return -slope_db_per_rad * 2.0 * std::log(10.0) / 20.0;
}

FitResult fit_loss_tangent(const MagnitudeTrace& magnitude, const std::vector<double>& k_times_l) {
  const std::size_t n = k_times_l.size();
  if (magnitude.s21_db.size() != n) throw Error(ErrorCode::GridMismatch, "magnitude and k l series lengths differ");
  if (n < 2) invalid("loss-tangent fit needs at least 2 points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(magnitude.s21_db[i]) || !std::isfinite(k_times_l[i])) invalid("non-finite entry in loss trace");
  }
  const double mx = std::accumulate(k_times_l.begin(), k_times_l.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(magnitude.s21_db.begin(), magnitude.s21_db.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (k_times_l[i] - mx) * (k_times_l[i] - mx);
    sxy += (k_times_l[i] - mx) * (magnitude.s21_db[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateAbscissa, "k l has zero variance");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  FitResult out;
  out.model = "loss_tangent";
  out.residuals.resize(static_cast<Eigen::Index>(n));
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = intercept + slope * k_times_l[i] - magnitude.s21_db[i];
    out.residuals[static_cast<Eigen::Index>(i)] = r;
    ss += r * r;
  }
  out.residual_norm = std::sqrt(ss);
  const double s2 = n > 2 ? ss / static_cast<double>(n - 2) : 0.0;
  const double se_slope = std::sqrt(s2 / sxx);
  const double se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  const double scale = 2.0 * std::log(10.0) / 20.0;
  out.parameters = {{"tan_delta", loss_tangent_from_slope(slope), "", se_slope * scale},
                    {"slope", slope, "dB/rad", se_slope},
                    {"intercept", intercept, "dB", se_intercept}};
  out.fixed.push_back({"input_power", magnitude.input_power_dbm, "dBm", 0.0});
  if (slope > 0.0) out.warnings.push_back("positive slope gives a negative loss tangent");
  return out;
}

double noise_source_temperature(double temperature, double omega) {
  if (!(temperature >= 0.0)) invalid("temperature must be >= 0");
  if (!(omega > 0.0)) invalid("frequency must be > 0");
  const double t_quantum = PhysicalConstants::hbar * omega / (2.0 * PhysicalConstants::boltzmann);
  if (temperature == 0.0) return t_quantum;
  return t_quantum / std::tanh(t_quantum / temperature);
}

std::vector<FitResult> fit_noise_calibration(const NoisePowerTrace& trace) {
  const auto nt = trace.source_temperatures.size();
  const auto nf = trace.frequencies.size();
  if (nt < 2) invalid("noise calibration needs at least 2 source temperatures");
  check_increasing(trace.source_temperatures, "source temperatures");
  if (static_cast<std::size_t>(trace.measured_power.rows()) != nt ||
      static_cast<std::size_t>(trace.measured_power.cols()) != nf) {
    throw Error(ErrorCode::GridMismatch, "noise power matrix shape does not match the axes");
  }
  if (!(trace.bandwidth > 0.0)) invalid("bandwidth must be > 0");
  if (!(trace.measured_power.array() > 0.0).all()) invalid("measured powers must be > 0");

  const double kb_df = PhysicalConstants::boltzmann * trace.bandwidth;
  std::vector<FitResult> results;
  for (std::size_t c = 0; c < nf; ++c) {
    const double omega = two_pi() * trace.frequencies[c];
    Eigen::VectorXd n_src(static_cast<Eigen::Index>(nt));
    for (std::size_t t = 0; t < nt; ++t) {
      n_src[static_cast<Eigen::Index>(t)] = noise_source_temperature(trace.source_temperatures[t], omega);
    }
    const Eigen::VectorXd p = trace.measured_power.col(static_cast<Eigen::Index>(c));

    // Linear start: P = a N_src + b with a = G kB df, b = N_sys G kB df.
    const double mx = n_src.mean(), my = p.mean();
    const double sxx = (n_src.array() - mx).square().sum();
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateAbscissa, "source noise temperatures coincide");
    const double a = ((n_src.array() - mx) * (p.array() - my)).sum() / sxx;
    const double b = my - a * mx;
    if (!(a > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive system gain at " << trace.frequencies[c] << " Hz";
      throw Error(ErrorCode::NegativeGain, msg.str());
    }

    // Residuals relative to the mean power keep the problem well scaled.
    auto residuals = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
      const double gain = std::pow(10.0, q[0] / 10.0);
      return ((n_src.array() + q[1]) * gain * kb_df - p.array()) / my;
    };
    Eigen::Vector2d q0(10.0 * std::log10(a / kb_df), b / a);
    const auto lsq = levenberg_marquardt(residuals, q0);
    if (!std::isfinite(lsq.params[0])) throw Error(ErrorCode::NegativeGain, "fitted gain is not positive");

    FitResult out;
    out.model = "noise_calibration";
    fill_fitted(out, lsq, {{"G_sys", "dB"}, {"N_sys", "K"}});
    out.residuals *= my;  // back to watts
    out.residual_norm = out.residuals.norm();
    out.fixed.push_back({"frequency", trace.frequencies[c], "Hz", 0.0});
    out.fixed.push_back({"bandwidth", trace.bandwidth, "Hz", 0.0});
    results.push_back(std::move(out));
  }
  return results;
}

std::vector<double> input_line_attenuation(const std::vector<double>& full_s21_db,
                                           const std::vector<double>& g_sys_db) {
  if (full_s21_db.size() != g_sys_db.size()) {
    throw Error(ErrorCode::GridMismatch, "full transmission and system gain lengths differ");
  }
  std::vector<double> out(full_s21_db.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = full_s21_db[i] - g_sys_db[i];
  return out;
}

}  // namespace twpa
