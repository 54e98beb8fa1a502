// twpa: command-line front end for the TWPA compression toolkit.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
// Failures print one JSON object on stderr and remove any partial outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "twpa/calibration.hpp"
#include "twpa/compression.hpp"
#include "twpa/config.hpp"
#include "twpa/io.hpp"
#include "twpa/plot.hpp"
#include "twpa/reduction.hpp"
#include "twpa/response.hpp"
#include "twpa/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  int workers = 0;
  std::string out_dir;
  bool plot = false;
  std::uint64_t seed = 0;
};

// Tracks files written by a command so a failed run leaves nothing behind.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& text) {
    if (!fs::exists(dir_)) {
      fs::create_directories(dir_);
      created_dir_ = true;
    }
    const fs::path path = dir_ / name;
    written_.push_back(path);
    twpa::write_text(path, text);
  }

  void discard() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    written_.clear();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : written_) out.push_back(p.filename().string());
    return out;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool created_dir_ = false;
};

void log(const std::string& msg) { std::cerr << "[twpa] " << msg << '\n'; }

struct Context {
  GlobalOptions global;
  twpa::RunConfig config;
  std::vector<std::string> defaults_applied;
  std::vector<std::string> warnings;
  int workers = 1;
};

Context make_context(const GlobalOptions& g) {
  Context ctx;
  ctx.global = g;
  if (!g.config_path.empty()) {
    ctx.config = twpa::load_config(g.config_path, &ctx.defaults_applied);
    for (const auto& k : ctx.defaults_applied) log("default applied: " + k);
  } else {
    log("no --config given; using the built-in Table I defaults");
  }
  if (!g.out_dir.empty()) ctx.config.output.directory = g.out_dir;
  if (g.plot) ctx.config.output.svg = true;
  ctx.workers = g.workers > 0 ? g.workers : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  return ctx;
}

twpa::Amplifier make_amplifier(Context& ctx) {
  auto amp = twpa::make_amplifier(ctx.config.device, ctx.config.losses);
  const double kp = twpa::dispersion_k(twpa::hz_to_rad(ctx.config.sweep.pump.frequency), amp.op, amp.device);
  if (twpa::exceeds_continuum_limit(kp, amp.device)) {
    std::ostringstream msg;
    msg << "pump k a = " << kp * amp.device.cell_length << " rad exceeds the continuum limit "
        << twpa::kContinuumLimitKa << "; discreteness corrections are ignored";
    ctx.warnings.push_back(msg.str());
    log("warning: " + msg.str());
  }
  return amp;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string iso_time() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_manifest(Outputs& out, const Context& ctx, const std::string& command, double seconds) {
  json m = {{"command", command},
            {"config", ctx.global.config_path},
            {"workers", ctx.workers},
            {"seed", ctx.global.seed},
            {"started_utc", iso_time()},
            {"elapsed_s", seconds},
            {"defaults_applied", ctx.defaults_applied},
            {"warnings", ctx.warnings},
            {"outputs", out.names()}};
  out.write("manifest.json", dump(m));
}

std::vector<double> ghz_axis(const std::vector<double>& hz) {
  std::vector<double> out;
  for (double f : hz) out.push_back(f * 1e-9);
  return out;
}

// --- commands ---------------------------------------------------------------

void cmd_simulate(Context& ctx, Outputs& out, std::optional<double> f_ghz, std::optional<double> p_dbm) {
  const auto amp = make_amplifier(ctx);
  const double f_sig = f_ghz ? *f_ghz * 1e9 : ctx.config.probe_frequency;
  const double p_sig = p_dbm ? *p_dbm : ctx.config.probe_power_dbm;
  const auto& pump = ctx.config.sweep.pump;
  const auto freqs = twpa::FrequencyTriple::from_pump_signal(twpa::hz_to_rad(pump.frequency), twpa::hz_to_rad(f_sig));
  const double ps = twpa::dbm_to_watt(p_sig);
  const auto coeffs = twpa::nonlinear_coefficients(freqs, amp, ps);
  const auto s0 = twpa::initial_state(ps, twpa::dbm_to_watt(pump.power_dbm), freqs, twpa::char_impedance(amp.op, amp.device));
  const auto traj = twpa::integrate(s0, coeffs, amp.device.length(), ctx.config.integrator);
  out.write("trajectory.csv", twpa::trajectory_csv(traj, amp.device.cell_length));
  if (ctx.config.output.svg) {
    twpa::PlotSeries sp{"pump"}, ss{"signal"}, si{"idler"};
    for (const auto& s : traj) {
      const double cell = s.x / amp.device.cell_length;
      sp.x.push_back(cell), ss.x.push_back(cell), si.x.push_back(cell);
      sp.y.push_back(twpa::power_ratio_to_db(std::norm(s.a_p) / std::norm(s0.a_p)));
      ss.y.push_back(twpa::power_ratio_to_db(std::norm(s.a_s) / std::norm(s0.a_s)));
      si.y.push_back(twpa::power_ratio_to_db(std::norm(s.a_i) / std::norm(s0.a_s)));
    }
    out.write("trajectory.svg", twpa::svg_line_plot("Envelope power along the line", "cell index",
                                                    "|A|^2 relative to input (dB)", {sp, ss, si}));
  }
}

twpa::ResponseSurface run_sweep(Context& ctx, Outputs& out) {
  const auto amp = make_amplifier(ctx);
  log("sweeping " + std::to_string(ctx.config.sweep.signal_frequencies.size()) + " frequencies x " +
      std::to_string(ctx.config.sweep.signal_powers.size()) + " powers on " + std::to_string(ctx.workers) +
      " workers");
  auto surface = twpa::sweep(ctx.config.sweep, amp, ctx.config.integrator, ctx.workers);
  if (ctx.config.output.csv) out.write("sweep.csv", twpa::sweep_csv(surface));
  if (ctx.config.output.json) out.write("sweep.json", dump(twpa::to_json(surface)));
  if (ctx.config.output.svg) {
    const auto f = ghz_axis(surface.grid.signal_frequencies);
    const std::vector<double> p = surface.grid.signal_powers;
    out.write("gain.svg", twpa::svg_heatmap("Signal gain", "signal frequency (GHz)", "signal power (dBm)", f, p,
                                            surface.gain_db, "gain (dB)"));
    out.write("pump_s21.svg", twpa::svg_heatmap("Pump transmission", "signal frequency (GHz)",
                                                "signal power (dBm)", f, p, surface.pump_s21_db, "S21 (dB)"));
  }
  return surface;
}

void cmd_p1db(Context& ctx, Outputs& out, int window) {
  const auto surface = run_sweep(ctx, out);
  const auto summary = twpa::compression_summary(surface, window);
  if (ctx.config.output.csv) out.write("summary.csv", twpa::summary_csv(summary));
  if (ctx.config.output.json) out.write("summary.json", dump(twpa::to_json(summary)));
  if (ctx.config.output.svg) {
    twpa::PlotSeries p1{"P1dB"}, pout{"Pout at P1dB"}, glin{"G_lin"};
    for (std::size_t i = 0; i < summary.frequencies.size(); ++i) {
      const double f = summary.frequencies[i] * 1e-9;
      p1.x.push_back(f), pout.x.push_back(f), glin.x.push_back(f);
      p1.y.push_back(summary.p1db_dbm[i].value_or(NAN));
      pout.y.push_back(summary.pout_at_p1db_dbm[i].value_or(NAN));
      glin.y.push_back(summary.g_lin_db[i]);
    }
    out.write("p1db.svg", twpa::svg_line_plot("Compression point", "signal frequency (GHz)", "power (dBm)", {p1, pout}));
    out.write("g_lin.svg", twpa::svg_line_plot("Small-signal gain", "signal frequency (GHz)", "gain (dB)", {glin}));
  }
}

void cmd_stability(Context& ctx, Outputs& out, std::optional<double> p_dbm) {
  const auto amp = make_amplifier(ctx);
  const double p = p_dbm ? *p_dbm : ctx.config.stability_power_dbm;
  const auto map = twpa::stability_map(ctx.config.sweep.signal_frequencies, p, ctx.config.sweep.pump, amp,
                                       ctx.config.integrator, ctx.workers);
  out.write("stability.csv", twpa::stability_csv(map));
  if (ctx.config.output.svg) {
    std::vector<double> pos(map.positions.begin(), map.positions.end());
    out.write("stability.svg", twpa::svg_heatmap("Signal gain along the line", "signal frequency (GHz)",
                                                 "cell index", ghz_axis(map.frequencies), pos, map.gain_db,
                                                 "gain (dB)"));
  }
}

void cmd_analytic(Context& ctx, Outputs& out, const std::vector<double>& g_lin_db, std::optional<double> pump_dbm,
                  double p_start, double p_stop, int points) {
  if (points < 2 || !(p_stop > p_start)) {
    throw twpa::Error(twpa::ErrorCode::InvalidArgument, "analytic curve needs points >= 2 and p_stop > p_start");
  }
  const double pp = pump_dbm ? *pump_dbm : ctx.config.sweep.pump.power_dbm;
  std::ostringstream csv;
  csv << "g_lin_dB,P_p_dBm,P_sig_dBm,gain_dB\n";
  json summary = json::array();
  std::vector<twpa::PlotSeries> series;
  for (double g : g_lin_db) {
    const twpa::AnalyticGainModel model{twpa::db_to_power_ratio(g), twpa::dbm_to_watt(pp)};
    twpa::PlotSeries s{"G_lin = " + twpa::format_double(g) + " dB"};
    for (int i = 0; i < points; ++i) {
      const double p = p_start + (p_stop - p_start) * i / (points - 1);
      const double gain = twpa::power_ratio_to_db(twpa::analytic_gain(model, twpa::dbm_to_watt(p)));
      csv << twpa::format_double(g) << ',' << twpa::format_double(pp) << ',' << twpa::format_double(p) << ','
          << twpa::format_double(gain) << '\n';
      s.x.push_back(p);
      s.y.push_back(gain);
    }
    series.push_back(std::move(s));
    summary.push_back({{"g_lin_dB", g}, {"P_p_dBm", pp}, {"P1dB_dBm", twpa::analytic_p1db(model)}});
  }
  out.write("analytic.csv", csv.str());
  out.write("analytic.json", dump(summary));
  if (ctx.config.output.svg) {
    out.write("analytic.svg", twpa::svg_line_plot("Pump-depletion gain law", "signal power (dBm)", "gain (dB)", series));
  }
}

void cmd_fit_dispersion(Context& ctx, Outputs& out, const std::string& input, bool cj_free) {
  const auto table = twpa::read_csv(input);
  const auto f = table.numbers("f_GHz", 9);
  const auto phase = table.numbers("phase_rad");
  std::vector<double> flux(f.size(), ctx.config.device.external_flux);
  if (std::find(table.header.begin(), table.header.end(), "flux_Wb") != table.header.end()) {
    flux = table.numbers("flux_Wb");
  }
  std::vector<twpa::PhaseTrace> traces;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (traces.empty() || traces.back().external_flux != flux[i]) traces.push_back({{}, {}, flux[i]});
    traces.back().frequencies.push_back(f[i]);
    traces.back().phase.push_back(phase[i]);
  }
  twpa::DispersionFitOptions opts;
  opts.n_cells = ctx.config.device.n_cells;
  if (cj_free) opts.snail_capacitance.reset();
  else opts.snail_capacitance = ctx.config.device.snail_capacitance;

  json result;
  std::vector<twpa::FitResult> final_fits;
  if (traces.size() == 1) {
    final_fits.push_back(twpa::fit_dispersion(traces.front(), opts));
    result = twpa::to_json(final_fits.front());
  } else {
    const auto series = twpa::fit_dispersion_flux_series(traces, opts);
    json one = json::array(), two = json::array();
    for (const auto& r : series.stage_one) one.push_back(twpa::to_json(r));
    for (const auto& r : series.stage_two) two.push_back(twpa::to_json(r));
    result = {{"stage_one", one}, {"mean_Cg_F", series.mean_ground_capacitance}, {"stage_two", two}};
    final_fits = series.stage_two;
  }
  // Wavevectors: the fitted intercept is the phase to remove, so it enters
  // k = (theta + theta0) / l with a negative sign.
  std::ostringstream k_csv;
  k_csv << "flux_Wb,f_GHz,k_rad_per_m\n";
  for (std::size_t t = 0; t < traces.size(); ++t) {
    auto unwrapped = traces[t];
    unwrapped.phase = twpa::unwrap_phase(traces[t].phase);
    const auto k = twpa::k_from_phase(unwrapped, -final_fits[t].value("theta0"), ctx.config.device.length());
    for (const auto& w : k.warnings) ctx.warnings.push_back(w);
    for (std::size_t i = 0; i < k.k.size(); ++i) {
      k_csv << twpa::format_double(traces[t].external_flux) << ',' << twpa::format_shifted(k.frequencies[i], 9) << ','
            << twpa::format_double(k.k[i]) << '\n';
    }
  }
  out.write("fit_dispersion.json", dump(result));
  out.write("wavevector.csv", k_csv.str());
}

void cmd_fit_inductance(Outputs& out, const std::string& input) {
  const auto table = twpa::read_csv(input);
  const auto flux = table.numbers("flux_Wb");
  const auto l = table.numbers("L_H");
  std::vector<twpa::FluxInductancePoint> pts;
  for (std::size_t i = 0; i < flux.size(); ++i) pts.push_back({flux[i], l[i]});
  out.write("fit_inductance.json", dump(twpa::to_json(twpa::fit_inductance_flux(pts))));
}

void cmd_fit_loss(Outputs& out, const std::string& input, double input_power_dbm) {
  const auto table = twpa::read_csv(input);
  twpa::MagnitudeTrace m{table.numbers("f_GHz", 9), table.numbers("s21_dB"), input_power_dbm};
  out.write("fit_loss.json", dump(twpa::to_json(twpa::fit_loss_tangent(m, table.numbers("kl_rad")))));
}

void cmd_fit_noise(Outputs& out, const std::string& input, double bandwidth) {
  const auto table = twpa::read_csv(input);
  const auto f = table.numbers("f_GHz", 9);
  const auto t = table.numbers("T_K");
  const auto p = table.numbers("P_W");
  twpa::NoisePowerTrace trace;
  trace.bandwidth = bandwidth;
  for (double x : f)
    if (std::find(trace.frequencies.begin(), trace.frequencies.end(), x) == trace.frequencies.end())
      trace.frequencies.push_back(x);
  for (double x : t)
    if (std::find(trace.source_temperatures.begin(), trace.source_temperatures.end(), x) ==
        trace.source_temperatures.end())
      trace.source_temperatures.push_back(x);
  trace.measured_power = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(trace.source_temperatures.size()),
                                                   static_cast<Eigen::Index>(trace.frequencies.size()), NAN);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto r = std::find(trace.source_temperatures.begin(), trace.source_temperatures.end(), t[i]) -
                   trace.source_temperatures.begin();
    const auto c = std::find(trace.frequencies.begin(), trace.frequencies.end(), f[i]) - trace.frequencies.begin();
    trace.measured_power(r, c) = p[i];
  }
  if (!trace.measured_power.allFinite()) {
    throw twpa::Error(twpa::ErrorCode::GridMismatch, "noise CSV does not cover every (temperature, frequency) pair");
  }
  json arr = json::array();
  for (const auto& r : twpa::fit_noise_calibration(trace)) arr.push_back(twpa::to_json(r));
  out.write("fit_noise.json", dump(arr));
}

void cmd_reduce(Context& ctx, Outputs& out, const std::string& input, const std::string& attenuation) {
  const auto raw_table = twpa::read_csv(input);
  const auto att_table = twpa::read_csv(attenuation);
  const auto p_rt = raw_table.numbers("P_RT_dBm");
  const auto f = raw_table.numbers("f_GHz", 9);
  const auto re = raw_table.numbers("Re_S21");
  const auto im = raw_table.numbers("Im_S21");

  twpa::RawVnaDataset raw;
  for (double x : p_rt)
    if (std::find(raw.room_temp_powers.begin(), raw.room_temp_powers.end(), x) == raw.room_temp_powers.end())
      raw.room_temp_powers.push_back(x);
  for (double x : f)
    if (std::find(raw.frequencies.begin(), raw.frequencies.end(), x) == raw.frequencies.end())
      raw.frequencies.push_back(x);
  if (raw.room_temp_powers.size() * raw.frequencies.size() != f.size()) {
    throw twpa::Error(twpa::ErrorCode::GridMismatch, "raw CSV does not cover a full power x frequency grid");
  }
  raw.s21.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto r = static_cast<std::size_t>(
        std::find(raw.room_temp_powers.begin(), raw.room_temp_powers.end(), p_rt[i]) - raw.room_temp_powers.begin());
    const auto c =
        static_cast<std::size_t>(std::find(raw.frequencies.begin(), raw.frequencies.end(), f[i]) - raw.frequencies.begin());
    raw.s21[r * raw.frequencies.size() + c] = {re[i], im[i]};
  }
  const auto att_f = att_table.numbers("f_GHz", 9);
  const auto att = att_table.numbers("attenuation_dB");
  if (att_f != raw.frequencies) {
    throw twpa::Error(twpa::ErrorCode::GridMismatch, "attenuation frequencies differ from the raw data");
  }
  raw.attenuation_db = att;
  const auto profiles = twpa::iso_power_reconstruct(raw);
  out.write("iso_power.csv", twpa::iso_power_csv(profiles, raw.frequencies));
  json j = json::array();
  for (const auto& p : profiles) j.push_back({{"P_sig_dBm", p.p_sig_dbm}, {"max_scatter_dB", p.max_scatter_db()}});
  out.write("reduce.json", dump(j));
  if (ctx.config.output.svg) {
    std::vector<twpa::PlotSeries> series;
    for (const auto& p : profiles) {
      twpa::PlotSeries s{twpa::format_double(p.p_sig_dbm) + " dBm", ghz_axis(raw.frequencies), {}};
      for (const auto& v : p.s21) s.y.push_back(20.0 * std::log10(std::abs(v)));
      series.push_back(std::move(s));
    }
    out.write("iso_power.svg", twpa::svg_line_plot("Iso-power transmission", "frequency (GHz)", "|S21| (dB)", series));
  }
}

int exit_code_for(twpa::ErrorCode code) {
  switch (twpa::category_of(code)) {
    case twpa::ErrorCategory::Validation: return 2;
    case twpa::ErrorCategory::Numerical: return 3;
    case twpa::ErrorCategory::Io: return 4;
  }
  return 3;
}

void report(const std::string& code, const std::string& category, const std::string& message,
            const json& extra = json::object()) {
  json j = {{"error", code}, {"category", category}, {"message", message}};
  j.update(extra);
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gain-compression simulation and calibration toolkit for Josephson TWPAs"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration file")->envname("TWPA_CONFIG");
  app.add_option("--workers", g.workers, "Worker threads (default: hardware concurrency)")
      ->envname("TWPA_WORKERS")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out_dir, "Output directory (overrides [output] directory)")->envname("TWPA_OUT");
  app.add_flag("--plot", g.plot, "Also emit SVG plots")->envname("TWPA_PLOT");
  app.add_option("--seed", g.seed, "Seed for synthetic-data generators (recorded in the manifest)")
      ->envname("TWPA_SEED");

  std::optional<double> f_ghz, p_dbm, pump_dbm;
  auto* simulate = app.add_subcommand("simulate", "Envelope trajectory for one signal tone");
  simulate->add_option("--frequency", f_ghz, "Signal frequency in GHz (default: [sweep] probe_frequency)");
  simulate->add_option("--power", p_dbm, "Signal power in dBm (default: [sweep] probe_power)");

  app.add_subcommand("sweep", "Gain and pump-transmission surface over the sweep grid");
  int window = twpa::kDefaultPowerSmoothing;
  auto* p1db = app.add_subcommand("p1db", "Sweep plus per-frequency compression summary");
  p1db->add_option("--window", window, "Moving-average window along power (odd)");

  auto* stability = app.add_subcommand("stability", "Signal gain versus position along the line");
  stability->add_option("--power", p_dbm, "Signal power in dBm (default: [sweep] stability_power)");

  std::vector<double> g_lin{20.0};
  double p_start = -130.0, p_stop = -80.0;
  int points = 201;
  auto* analytic = app.add_subcommand("analytic", "Closed-form pump-depletion gain curves");
  analytic->add_option("--g-lin-db", g_lin, "Small-signal gain(s) in dB")->expected(1, -1);
  analytic->add_option("--pump-dbm", pump_dbm, "Pump power in dBm (default: [pump] power)");
  analytic->add_option("--p-start", p_start, "First signal power, dBm");
  analytic->add_option("--p-stop", p_stop, "Last signal power, dBm");
  analytic->add_option("--points", points, "Number of signal powers");

  auto* fit = app.add_subcommand("fit", "Calibration fits from CSV input");
  fit->require_subcommand(1);
  std::string input;
  bool cj_free = false;
  auto* fit_disp = fit->add_subcommand("dispersion", "Phase trace(s): flux_Wb, f_GHz, phase_rad");
  fit_disp->add_option("--input", input, "Input CSV")->required();
  fit_disp->add_flag("--cj-free", cj_free, "Fit CJ instead of fixing it to the config value");
  auto* fit_ind = fit->add_subcommand("inductance", "L(flux): flux_Wb, L_H");
  fit_ind->add_option("--input", input, "Input CSV")->required();
  double loss_power = NAN;
  auto* fit_loss = fit->add_subcommand("loss", "Normalized |S21|: f_GHz, s21_dB, kl_rad");
  fit_loss->add_option("--input", input, "Input CSV")->required();
  fit_loss->add_option("--input-power", loss_power, "Probe power in dBm (recorded)");
  double bandwidth = 0.0;
  auto* fit_noise = fit->add_subcommand("noise", "Thermal-source powers: f_GHz, T_K, P_W");
  fit_noise->add_option("--input", input, "Input CSV")->required();
  fit_noise->add_option("--bandwidth", bandwidth, "Measurement bandwidth in Hz")->required();

  std::string attenuation;
  auto* reduce = app.add_subcommand("reduce", "Iso-power profiles from raw VNA sweeps");
  reduce->add_option("--input", input, "Raw CSV: P_RT_dBm, f_GHz, Re_S21, Im_S21")->required();
  reduce->add_option("--attenuation", attenuation, "Input-line CSV: f_GHz, attenuation_dB")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("InvalidArgument", "validation", e.what());
    return 2;
  }

  std::optional<Outputs> outputs;
  std::string command;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    Context ctx = make_context(g);
    outputs.emplace(ctx.config.output.directory);
    if (simulate->parsed()) command = "simulate", cmd_simulate(ctx, *outputs, f_ghz, p_dbm);
    else if (app.got_subcommand("sweep")) command = "sweep", run_sweep(ctx, *outputs);
    else if (p1db->parsed()) command = "p1db", cmd_p1db(ctx, *outputs, window);
    else if (stability->parsed()) command = "stability", cmd_stability(ctx, *outputs, p_dbm);
    else if (analytic->parsed()) command = "analytic", cmd_analytic(ctx, *outputs, g_lin, pump_dbm, p_start, p_stop, points);
    else if (fit_disp->parsed()) command = "fit dispersion", cmd_fit_dispersion(ctx, *outputs, input, cj_free);
    else if (fit_ind->parsed()) command = "fit inductance", cmd_fit_inductance(*outputs, input);
    else if (fit_loss->parsed()) command = "fit loss", cmd_fit_loss(*outputs, input, loss_power);
    else if (fit_noise->parsed()) command = "fit noise", cmd_fit_noise(*outputs, input, bandwidth);
    else if (reduce->parsed()) command = "reduce", cmd_reduce(ctx, *outputs, input, attenuation);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(*outputs, ctx, command, seconds);
    log(command + " done in " + twpa::format_double(std::round(seconds * 1000.0) / 1000.0) + " s; outputs in " +
        outputs->dir().string());
    return 0;
  } catch (const twpa::ParseFailure& e) {
    if (outputs) outputs->discard();
    report(std::string(twpa::to_string(e.code())), "validation", e.what(), {{"line", e.line()}, {"column", e.column()}});
    return exit_code_for(e.code());
  } catch (const twpa::Error& e) {
    if (outputs) outputs->discard();
    const int code = exit_code_for(e.code());
    report(std::string(twpa::to_string(e.code())), code == 2 ? "validation" : code == 3 ? "numerical" : "io",
           e.what());
    return code;
  } catch (const fs::filesystem_error& e) {
    if (outputs) outputs->discard();
    report("IoError", "io", e.what());
    return 4;
  } catch (const std::exception& e) {
    if (outputs) outputs->discard();
    report("Internal", "numerical", e.what());
    return 3;
  }
}
