#include "twpa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "twpa/config.hpp"
#include "twpa/error.hpp"

namespace twpa {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string ghz(double hz) { return format_shifted(hz, 9); }

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

// Parses "key=value, key=value" pairs from a comment line.
std::map<std::string, std::string> comment_pairs(const std::vector<std::string>& comments) {
  std::map<std::string, std::string> out;
  for (const auto& c : comments) {
    for (const auto& token : split_fields(c)) {
      const auto eq = token.find('=');
      if (eq != std::string::npos) out[trim(token.substr(0, eq))] = trim(token.substr(eq + 1));
    }
  }
  return out;
}

// Distinct values in order of first appearance.
std::vector<double> distinct(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v)
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  return out;
}

std::size_t index_of(const std::vector<double>& v, double x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json matrix_json(const Matrix& m) {
  auto out = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) out.push_back(m.row(r));
  return out;
}

}  // namespace

std::string format_shifted(double value, int shift) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (value == 0.0) return std::signbit(value) ? "-0" : "0";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
  const std::string sci(buf, end);
  const auto epos = sci.find('e');
  std::string mant = sci.substr(0, epos);
  const int exp10 = std::stoi(sci.substr(epos + 1)) - shift;
  const bool negative = mant.front() == '-';
  if (negative) mant.erase(0, 1);
  std::string digits;
  for (char c : mant)
    if (c != '.') digits.push_back(c);

  std::string out;
  const int n = static_cast<int>(digits.size());
  if (exp10 < -6 || exp10 > 20) {
    out = digits.substr(0, 1);
    if (n > 1) out += "." + digits.substr(1);
    out += "e" + std::to_string(exp10);
  } else if (exp10 + 1 >= n) {
    out = digits + std::string(static_cast<std::size_t>(exp10 + 1 - n), '0');
  } else if (exp10 < 0) {
    out = "0." + std::string(static_cast<std::size_t>(-exp10 - 1), '0') + digits;
  } else {
    out = digits.substr(0, static_cast<std::size_t>(exp10 + 1)) + "." + digits.substr(static_cast<std::size_t>(exp10 + 1));
  }
  return negative ? "-" + out : out;
}

double parse_shifted(const std::string& raw, int shift) {
  const std::string text = trim(raw);
  if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  std::string mantissa = text;
  long exponent = shift;
  const auto epos = text.find_first_of("eE");
  if (epos != std::string::npos) {
    long e = 0;
    const char* first = text.data() + epos + 1;
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto [p, ec] = std::from_chars(first, last, e);
    if (ec != std::errc() || p != last) parse_error("malformed number '" + text + "'");
    exponent += e;
    mantissa = text.substr(0, epos);
  }
  if (mantissa.empty() || mantissa.find_first_not_of("-.0123456789") != std::string::npos) {
    parse_error("malformed number '" + text + "'");
  }
  const std::string literal = mantissa + "e" + std::to_string(exponent);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(literal.data(), literal.data() + literal.size(), v);
  if (ec != std::errc() || p != literal.data() + literal.size()) parse_error("malformed number '" + text + "'");
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) parse_error("CSV is missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numbers(const std::string& name, int shift) const {
  const auto c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_shifted(r[c], shift));
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (trim(line).front() == '#') {
      t.comments.push_back(trim(trim(line).substr(1)));
      continue;
    }
    auto fields = split_fields(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      std::ostringstream msg;
      msg << "CSV line " << line_no << " has " << fields.size() << " fields, header has " << t.header.size();
      parse_error(msg.str());
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) parse_error("CSV has no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string sweep_csv(const ResponseSurface& s) {
  std::ostringstream out;
  out << "# pump_frequency_GHz=" << ghz(s.grid.pump.frequency)
      << ", pump_power_dBm=" << format_double(s.grid.pump.power_dbm) << "\n";
  out << "f_sig_GHz,P_sig_dBm,gain_dB,pump_s21_dB\n";
  for (std::size_t r = 0; r < s.grid.signal_powers.size(); ++r) {
    for (std::size_t c = 0; c < s.grid.signal_frequencies.size(); ++c) {
      out << ghz(s.grid.signal_frequencies[c]) << ',' << format_double(s.grid.signal_powers[r]) << ','
          << format_double(s.gain_db(r, c)) << ',' << format_double(s.pump_s21_db(r, c)) << '\n';
    }
  }
  return out.str();
}

ResponseSurface parse_sweep_csv(const std::string& text) {
  const auto t = parse_csv(text);
  const auto f = t.numbers("f_sig_GHz", 9);
  const auto p = t.numbers("P_sig_dBm");
  const auto g = t.numbers("gain_dB");
  const auto ps = t.numbers("pump_s21_dB");
  ResponseSurface s;
  const auto meta = comment_pairs(t.comments);
  if (meta.contains("pump_frequency_GHz")) s.grid.pump.frequency = parse_shifted(meta.at("pump_frequency_GHz"), 9);
  if (meta.contains("pump_power_dBm")) s.grid.pump.power_dbm = parse_shifted(meta.at("pump_power_dBm"), 0);
  s.grid.signal_frequencies = distinct(f);
  s.grid.signal_powers = distinct(p);
  const auto nf = s.grid.signal_frequencies.size(), np = s.grid.signal_powers.size();
  if (nf * np != f.size()) parse_error("sweep CSV does not cover a full frequency x power grid");
  s.gain_db = Matrix(np, nf);
  s.pump_s21_db = Matrix(np, nf);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto r = index_of(s.grid.signal_powers, p[i]);
    const auto c = index_of(s.grid.signal_frequencies, f[i]);
    s.gain_db(r, c) = g[i];
    s.pump_s21_db(r, c) = ps[i];
  }
  return s;
}

nlohmann::json to_json(const ResponseSurface& s) {
  return {{"pump", {{"frequency_Hz", s.grid.pump.frequency}, {"power_dBm", s.grid.pump.power_dbm}}},
          {"signal_frequencies_Hz", s.grid.signal_frequencies},
          {"signal_powers_dBm", s.grid.signal_powers},
          {"gain_dB", matrix_json(s.gain_db)},
          {"pump_s21_dB", matrix_json(s.pump_s21_db)}};
}

std::string summary_csv(const CompressionSummary& s) {
  std::ostringstream out;
  out << "f_sig_GHz,P1dB_dBm,G_lin_dB,Pout_dBm,pump_s21_at_P1dB_dB,non_monotonic\n";
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    out << ghz(s.frequencies[i]) << ',' << optional_field(s.p1db_dbm[i]) << ',' << format_double(s.g_lin_db[i])
        << ',' << optional_field(s.pout_at_p1db_dbm[i]) << ',' << optional_field(s.pump_s21_at_p1db_db[i]) << ','
        << (s.non_monotonic[i] ? 1 : 0) << '\n';
  }
  return out.str();
}

CompressionSummary parse_summary_csv(const std::string& text) {
  const auto t = parse_csv(text);
  CompressionSummary s;
  s.frequencies = t.numbers("f_sig_GHz", 9);
  s.g_lin_db = t.numbers("G_lin_dB");
  auto optional_column = [&](const std::string& name) {
    std::vector<std::optional<double>> out;
    for (double v : t.numbers(name)) out.push_back(std::isnan(v) ? std::nullopt : std::optional<double>(v));
    return out;
  };
  s.p1db_dbm = optional_column("P1dB_dBm");
  s.pout_at_p1db_dbm = optional_column("Pout_dBm");
  s.pump_s21_at_p1db_db = optional_column("pump_s21_at_P1dB_dB");
  for (double v : t.numbers("non_monotonic")) s.non_monotonic.push_back(v != 0.0);
  return s;
}

nlohmann::json to_json(const CompressionSummary& s) {
  auto rows = nlohmann::json::array();
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
    rows.push_back({{"f_sig_Hz", s.frequencies[i]},
                    {"P1dB_dBm", opt(s.p1db_dbm[i])},
                    {"G_lin_dB", s.g_lin_db[i]},
                    {"Pout_dBm", opt(s.pout_at_p1db_dbm[i])},
                    {"pump_s21_at_P1dB_dB", opt(s.pump_s21_at_p1db_db[i])},
                    {"non_monotonic", static_cast<bool>(s.non_monotonic[i])}});
  }
  return {{"summary", rows}};
}

std::string trajectory_csv(const std::vector<EnvelopeState>& traj, double cell_length) {
  std::ostringstream out;
  out << "x_m,cell_index,Re_A_p_Wb,Im_A_p_Wb,Re_A_s_Wb,Im_A_s_Wb,Re_A_i_Wb,Im_A_i_Wb\n";
  for (const auto& s : traj) {
    out << format_double(s.x) << ',' << format_double(s.x / cell_length) << ',' << format_double(s.a_p.real()) << ','
        << format_double(s.a_p.imag()) << ',' << format_double(s.a_s.real()) << ',' << format_double(s.a_s.imag())
        << ',' << format_double(s.a_i.real()) << ',' << format_double(s.a_i.imag()) << '\n';
  }
  return out.str();
}

std::vector<EnvelopeState> parse_trajectory_csv(const std::string& text) {
  const auto t = parse_csv(text);
  const auto x = t.numbers("x_m");
  const auto prp = t.numbers("Re_A_p_Wb"), pip = t.numbers("Im_A_p_Wb");
  const auto srp = t.numbers("Re_A_s_Wb"), sip = t.numbers("Im_A_s_Wb");
  const auto irp = t.numbers("Re_A_i_Wb"), iip = t.numbers("Im_A_i_Wb");
  std::vector<EnvelopeState> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = {x[i], {prp[i], pip[i]}, {srp[i], sip[i]}, {irp[i], iip[i]}};
  }
  return out;
}

std::string stability_csv(const StabilityMap& m) {
  std::ostringstream out;
  out << "cell_index,f_sig_GHz,gain_dB\n";
  for (std::size_t r = 0; r < m.positions.size(); ++r) {
    for (std::size_t c = 0; c < m.frequencies.size(); ++c) {
      out << m.positions[r] << ',' << ghz(m.frequencies[c]) << ',' << format_double(m.gain_db(r, c)) << '\n';
    }
  }
  return out.str();
}

StabilityMap parse_stability_csv(const std::string& text) {
  const auto t = parse_csv(text);
  const auto pos = t.numbers("cell_index");
  const auto f = t.numbers("f_sig_GHz", 9);
  const auto g = t.numbers("gain_dB");
  StabilityMap m;
  m.frequencies = distinct(f);
  const auto positions = distinct(pos);
  for (double p : positions) m.positions.push_back(static_cast<int>(p));
  if (positions.size() * m.frequencies.size() != f.size()) parse_error("stability CSV is not a full grid");
  m.gain_db = Matrix(positions.size(), m.frequencies.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    m.gain_db(index_of(positions, pos[i]), index_of(m.frequencies, f[i])) = g[i];
  }
  return m;
}

std::string iso_power_csv(const std::vector<IsoPowerProfile>& profiles, const std::vector<double>& frequencies) {
  std::ostringstream out;
  out << "P_sig_dBm,f_GHz,P_RT_dBm,P_dev_dBm,Re_S21,Im_S21\n";
  for (const auto& prof : profiles) {
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
      out << format_double(prof.p_sig_dbm) << ',' << ghz(frequencies[i]) << ','
          << format_double(prof.source_power_dbm[i]) << ',' << format_double(prof.device_power_dbm[i]) << ','
          << format_double(prof.s21[i].real()) << ',' << format_double(prof.s21[i].imag()) << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(const FitResult& fit) {
  auto params = [](const std::vector<FitParameter>& ps, bool with_error) {
    auto arr = nlohmann::json::array();
    for (const auto& p : ps) {
      nlohmann::json j = {{"name", p.name}, {"value", p.value}, {"unit", p.unit}};
      // Unidentifiable parameters have an infinite standard error, written as null.
      if (with_error) j["standard_error"] = number_or_null(p.standard_error);
      arr.push_back(j);
    }
    return arr;
  };
  std::vector<double> residuals(fit.residuals.data(), fit.residuals.data() + fit.residuals.size());
  return {{"model", fit.model},
          {"parameters", params(fit.parameters, true)},
          {"fixed", params(fit.fixed, false)},
          {"residual_norm", fit.residual_norm},
          {"iterations", fit.iterations},
          {"residuals", residuals},
          {"warnings", fit.warnings}};
}

}  // namespace twpa
