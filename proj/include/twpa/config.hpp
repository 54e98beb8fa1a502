#pragma once

// Run configuration: a flat, sectioned key = value text format with explicit
// unit suffixes.
//
//   [device]       n_cells, cell_length, junction_ratio, critical_current,
//                  snail_capacitance, ground_capacitance, external_flux
//   [loss]         pump_tan_delta, signal_table = P dBm : tan_delta, ...
//   [pump]         frequency, power
//   [sweep]        frequencies = list | f_start, f_stop, f_step
//                  powers = list | p_start, p_stop, p_step
//                  probe_frequency, probe_power, stability_power
//   [integrator]   rel_tol, abs_tol, max_step, dense_output_points
//   [output]       directory, csv, json, svg
//
// Missing keys take the defaults below (the bundled Table I device).

#include <filesystem>
#include <string>
#include <vector>

#include "twpa/cme_engine.hpp"
#include "twpa/device_model.hpp"
#include "twpa/error.hpp"
#include "twpa/response.hpp"

namespace twpa {

/// Default signal/idler loss table, (device-input dBm, tan delta).
std::vector<std::pair<double, double>> default_signal_loss_table();

struct OutputOptions {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
  DeviceParams device;
  LossModel losses{2.19e-3, default_signal_loss_table()};
  SweepGrid sweep;  // pump tone lives in sweep.pump
  double probe_frequency = 6e9;       // Hz, `simulate`
  double probe_power_dbm = -100.0;    // `simulate`
  double stability_power_dbm = -94.6; // `stability`
  IntegratorConfig integrator;
  OutputOptions output;

  RunConfig();
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Parse failure with a 1-based source position.
class ParseFailure : public Error {
 public:
  ParseFailure(ErrorCode code, const std::string& message, int line, int column);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_, column_;
};

/// Parses configuration text. Keys not present keep their defaults; their
/// names ("section.key") are appended to `defaults_applied` when given.
/// Errors: ParseFailure (ParseError, UnknownKey, UnitError), InvalidArgument.
RunConfig parse_config(const std::string& text, std::vector<std::string>* defaults_applied = nullptr);

/// Errors: IoError plus everything parse_config raises.
RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* defaults_applied = nullptr);

/// Writes every key explicitly in base SI units (dBm for powers) with
/// shortest round-trip number formatting, so parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace twpa
