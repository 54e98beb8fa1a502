#pragma once

// CSV and JSON artifacts. Every CSV has one header row naming each column
// with its unit; numbers use shortest round-trip formatting (GHz columns are
// shifted textually from Hz), so reading an emitted file reproduces the
// in-memory object bit for bit.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "twpa/calibration.hpp"
#include "twpa/cme_engine.hpp"
#include "twpa/compression.hpp"
#include "twpa/reduction.hpp"
#include "twpa/response.hpp"

namespace twpa {

/// `value` * 10^-shift as the shortest decimal that parses back exactly
/// (after re-applying the shift). Used for Hz -> GHz columns.
std::string format_shifted(double value, int shift);

/// Parses `text` * 10^shift with a single correctly rounded conversion.
/// Errors: ParseError.
double parse_shifted(const std::string& text, int shift);

struct CsvTable {
  std::vector<std::string> comments;  // lines starting with '#', without the marker
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column. Errors: ParseError.
  std::size_t column(const std::string& name) const;
  /// Column parsed as numbers scaled by 10^shift; empty fields are NaN.
  std::vector<double> numbers(const std::string& name, int shift = 0) const;
};

CsvTable parse_csv(const std::string& text);
/// Errors: IoError, ParseError.
CsvTable read_csv(const std::filesystem::path& path);
/// Errors: IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

// --- response surface: f_sig_GHz, P_sig_dBm, gain_dB, pump_s21_dB
std::string sweep_csv(const ResponseSurface& surface);
ResponseSurface parse_sweep_csv(const std::string& text);
nlohmann::json to_json(const ResponseSurface& surface);

// --- compression summary: f_sig_GHz, P1dB_dBm, G_lin_dB, Pout_dBm,
//     pump_s21_at_P1dB_dB, non_monotonic (empty fields where absent)
std::string summary_csv(const CompressionSummary& summary);
CompressionSummary parse_summary_csv(const std::string& text);
nlohmann::json to_json(const CompressionSummary& summary);

// --- trajectory: x_m, cell_index, Re/Im of A_p, A_s, A_i (Wb)
std::string trajectory_csv(const std::vector<EnvelopeState>& trajectory, double cell_length);
std::vector<EnvelopeState> parse_trajectory_csv(const std::string& text);

// --- stability map, long format: cell_index, f_sig_GHz, gain_dB
std::string stability_csv(const StabilityMap& map);
StabilityMap parse_stability_csv(const std::string& text);

// --- iso-power profiles: P_sig_dBm, f_GHz, P_RT_dBm, P_dev_dBm, Re_S21, Im_S21
std::string iso_power_csv(const std::vector<IsoPowerProfile>& profiles, const std::vector<double>& frequencies);

nlohmann::json to_json(const FitResult& fit);

}  // namespace twpa
