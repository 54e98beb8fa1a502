#include "twpa/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace twpa {

namespace {

enum class Dim { None, Frequency, Power, Decibel, Inductance, Capacitance, Current, Length, Flux };

struct UnitInfo {
  Dim dim;
  int exponent;       // decimal scale, applied textually for exact rounding
  double factor = 1;  // non-decimal scale (flux quantum)
};

const std::map<std::string, UnitInfo>& unit_table() {
  static const std::map<std::string, UnitInfo> table = {
      {"Hz", {Dim::Frequency, 0}},    {"kHz", {Dim::Frequency, 3}},  {"MHz", {Dim::Frequency, 6}},
      {"GHz", {Dim::Frequency, 9}},   {"dBm", {Dim::Power, 0}},      {"dB", {Dim::Decibel, 0}},      {"H", {Dim::Inductance, 0}},
      {"nH", {Dim::Inductance, -9}},  {"pH", {Dim::Inductance, -12}}, {"F", {Dim::Capacitance, 0}},
      {"pF", {Dim::Capacitance, -12}}, {"fF", {Dim::Capacitance, -15}}, {"A", {Dim::Current, 0}},
      {"mA", {Dim::Current, -3}},     {"uA", {Dim::Current, -6}},    {"nA", {Dim::Current, -9}},
      {"m", {Dim::Length, 0}},        {"mm", {Dim::Length, -3}},     {"um", {Dim::Length, -6}},
      {"nm", {Dim::Length, -9}},      {"Wb", {Dim::Flux, 0}},
      {"Phi0", {Dim::Flux, 0, PhysicalConstants::flux_quantum}},
  };
  return table;
}

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::None: return "dimensionless";
    case Dim::Frequency: return "frequency (Hz, kHz, MHz, GHz)";
    case Dim::Power: return "power (dBm)";
    case Dim::Decibel: return "power ratio (dB)";
    case Dim::Inductance: return "inductance (H, nH, pH)";
    case Dim::Capacitance: return "capacitance (F, pF, fF)";
    case Dim::Current: return "current (A, mA, uA, nA)";
    case Dim::Length: return "length (m, mm, um, nm)";
    case Dim::Flux: return "flux (Wb, Phi0)";
  }
  return "";
}

struct Item {
  std::string text;
  int column;  // 1-based
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits on `sep`, trimming each piece and tracking its column.
std::vector<Item> split(const std::string& s, int base_column, char sep) {
  std::vector<Item> out;
  std::size_t start = 0;
  while (true) {
    const auto end = s.find(sep, start);
    const std::string piece = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
    const auto lead = piece.find_first_not_of(" \t");
    out.push_back({trim(piece), base_column + static_cast<int>(start + (lead == std::string::npos ? 0 : lead))});
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

class Parser {
 public:
  Parser(int line) : line_(line) {}

  [[noreturn]] void fail(ErrorCode code, const std::string& what, int column) const {
    std::ostringstream msg;
    msg << "line " << line_ << ", column " << column << ": " << what;
    throw ParseFailure(code, msg.str(), line_, column);
  }

  double quantity(const Item& item, Dim dim) const {
    if (item.text.empty()) fail(ErrorCode::ParseError, "missing value", item.column);
    const auto space = item.text.find_first_of(" \t");
    const std::string number = item.text.substr(0, space);
    const std::string unit = space == std::string::npos ? "" : trim(item.text.substr(space));

    UnitInfo info{Dim::None, 0};
    if (!unit.empty()) {
      const auto it = unit_table().find(unit);
      if (it == unit_table().end()) {
        fail(ErrorCode::UnitError, "unknown unit '" + unit + "'", item.column + static_cast<int>(space) + 1);
      }
      info = it->second;
    }
    if (info.dim != dim) {
      if (unit.empty()) fail(ErrorCode::UnitError, std::string("missing unit, expected ") + dim_name(dim), item.column);
      fail(ErrorCode::UnitError, "unit '" + unit + "' is not a " + dim_name(dim), item.column);
    }

    // Fold the unit's decimal exponent into the literal so the conversion is
    // correctly rounded: "4.3 GHz" parses as 4.3e9, not 4.3 * 1e9.
    std::string mantissa = number;
    long exponent = info.exponent;
    const auto epos = number.find_first_of("eE");
    if (epos != std::string::npos) {
      long e = 0;
      const auto* first = number.data() + epos + 1;
      const auto* last = number.data() + number.size();
      if (first != last && *first == '+') ++first;
      const auto [p, ec] = std::from_chars(first, last, e);
      if (ec != std::errc() || p != last) fail(ErrorCode::ParseError, "malformed number '" + number + "'", item.column);
      exponent += e;
      mantissa = number.substr(0, epos);
    }
    const std::string literal = mantissa + "e" + std::to_string(exponent);
    double value = 0.0;
    const auto* first = literal.data();
    if (!mantissa.empty() && mantissa.front() == '+') ++first;
    const auto [p, ec] = std::from_chars(first, literal.data() + literal.size(), value);
    if (ec != std::errc() || p != literal.data() + literal.size() || mantissa.empty() ||
        mantissa.find_first_not_of("+-.0123456789") != std::string::npos) {
      fail(ErrorCode::ParseError, "malformed number '" + number + "'", item.column);
    }
    return value * info.factor;
  }

  int integer(const Item& item) const {
    int v = 0;
    const auto [p, ec] = std::from_chars(item.text.data(), item.text.data() + item.text.size(), v);
    if (ec != std::errc() || p != item.text.data() + item.text.size()) {
      fail(ErrorCode::ParseError, "expected an integer, got '" + item.text + "'", item.column);
    }
    return v;
  }

  bool boolean(const Item& item) const {
    if (item.text == "true") return true;
    if (item.text == "false") return false;
    fail(ErrorCode::ParseError, "expected true or false, got '" + item.text + "'", item.column);
  }

 private:
  int line_;
};

std::vector<double> arange(double start, double stop, double step, const char* what) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " range needs step > 0 and stop >= start");
  }
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  std::vector<double> out;
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::vector<double> table_i_frequencies() { return arange(4e9, 11e9, 1e8, "frequency"); }
std::vector<double> table_i_powers() { return arange(-124.0, -86.0, 2.0, "power"); }

std::vector<double> drop_value(std::vector<double> v, double x) {
  std::erase(v, x);
  return v;
}

}  // namespace

std::vector<std::pair<double, double>> default_signal_loss_table() {
  return {{-125.0, 3.8e-3}, {-115.0, 3.6e-3}, {-105.0, 3.4e-3}, {-95.0, 3.2e-3}, {-85.0, 3.0e-3}};
}

RunConfig::RunConfig() {
  sweep.signal_frequencies = drop_value(table_i_frequencies(), sweep.pump.frequency);
  sweep.signal_powers = table_i_powers();
}

void RunConfig::validate() const {
  device.validate();
  losses.validate();
  sweep.validate();
  integrator.validate();
  if (!(sweep.pump.frequency > 0.0) || !std::isfinite(sweep.pump.power_dbm)) {
    throw Error(ErrorCode::InvalidArgument, "pump frequency must be > 0 and power finite");
  }
  if (!(probe_frequency > 0.0) || !std::isfinite(probe_power_dbm) || !std::isfinite(stability_power_dbm)) {
    throw Error(ErrorCode::InvalidArgument, "probe frequency must be > 0 and powers finite");
  }
  if (output.directory.empty()) throw Error(ErrorCode::InvalidArgument, "output directory must not be empty");
}

ParseFailure::ParseFailure(ErrorCode code, const std::string& message, int line, int column)
    : Error(code, message), line_(line), column_(column) {}

RunConfig parse_config(const std::string& text, std::vector<std::string>* defaults_applied) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::optional<std::vector<double>> freq_list, power_list;
  std::map<std::string, double> ranges;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const Parser p(line_no);
    std::string line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;
    const int indent = static_cast<int>(line.find_first_not_of(" \t"));
    const std::string body = trim(line);
    if (body.front() == '[') {
      if (body.back() != ']') p.fail(ErrorCode::ParseError, "unterminated section header", indent + 1);
      section = trim(body.substr(1, body.size() - 2));
      static const std::set<std::string> sections = {"device", "loss", "pump", "sweep", "integrator", "output"};
      if (!sections.contains(section)) p.fail(ErrorCode::UnknownKey, "unknown section [" + section + "]", indent + 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail(ErrorCode::ParseError, "expected key = value", indent + 1);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) p.fail(ErrorCode::ParseError, "empty key", indent + 1);
    if (section.empty()) p.fail(ErrorCode::ParseError, "key outside of a section", indent + 1);
    const std::string value_raw = line.substr(eq + 1);
    const auto lead = value_raw.find_first_not_of(" \t");
    const int vcol = static_cast<int>(eq) + 2 + static_cast<int>(lead == std::string::npos ? 0 : lead);
    const Item value{trim(value_raw), vcol};
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) p.fail(ErrorCode::ParseError, "duplicate key '" + full + "'", indent + 1);

    auto list = [&](Dim dim) {
      std::vector<double> out;
      for (const auto& item : split(value.text, value.column, ',')) out.push_back(p.quantity(item, dim));
      return out;
    };

    if (full == "device.n_cells") cfg.device.n_cells = p.integer(value);
    else if (full == "device.cell_length") cfg.device.cell_length = p.quantity(value, Dim::Length);
    else if (full == "device.junction_ratio") cfg.device.junction_ratio = p.quantity(value, Dim::None);
    else if (full == "device.critical_current") cfg.device.critical_current = p.quantity(value, Dim::Current);
    else if (full == "device.snail_capacitance") cfg.device.snail_capacitance = p.quantity(value, Dim::Capacitance);
    else if (full == "device.ground_capacitance") cfg.device.ground_capacitance = p.quantity(value, Dim::Capacitance);
    else if (full == "device.external_flux") cfg.device.external_flux = p.quantity(value, Dim::Flux);
    else if (full == "loss.pump_tan_delta") cfg.losses.pump_tan_delta = p.quantity(value, Dim::None);
    else if (full == "loss.signal_table") {
      cfg.losses.signal_table.clear();
      for (const auto& entry : split(value.text, value.column, ',')) {
        const auto parts = split(entry.text, entry.column, ':');
        if (parts.size() != 2) p.fail(ErrorCode::ParseError, "table entries are 'P dBm : tan_delta'", entry.column);
        cfg.losses.signal_table.emplace_back(p.quantity(parts[0], Dim::Power), p.quantity(parts[1], Dim::None));
      }
    } else if (full == "pump.frequency") cfg.sweep.pump.frequency = p.quantity(value, Dim::Frequency);
    else if (full == "pump.power") cfg.sweep.pump.power_dbm = p.quantity(value, Dim::Power);
    else if (full == "sweep.frequencies") freq_list = list(Dim::Frequency);
    else if (full == "sweep.powers") power_list = list(Dim::Power);
    else if (key == "f_start" || key == "f_stop" || key == "f_step") {
      if (section != "sweep") p.fail(ErrorCode::UnknownKey, "unknown key '" + full + "'", indent + 1);
      ranges[key] = p.quantity(value, Dim::Frequency);
    } else if (key == "p_start" || key == "p_stop" || key == "p_step") {
      if (section != "sweep") p.fail(ErrorCode::UnknownKey, "unknown key '" + full + "'", indent + 1);
      ranges[key] = p.quantity(value, key == "p_step" ? Dim::Decibel : Dim::Power);
    } else if (full == "sweep.probe_frequency") cfg.probe_frequency = p.quantity(value, Dim::Frequency);
    else if (full == "sweep.probe_power") cfg.probe_power_dbm = p.quantity(value, Dim::Power);
    else if (full == "sweep.stability_power") cfg.stability_power_dbm = p.quantity(value, Dim::Power);
    else if (full == "integrator.rel_tol") cfg.integrator.rel_tol = p.quantity(value, Dim::None);
    else if (full == "integrator.abs_tol") cfg.integrator.abs_tol = p.quantity(value, Dim::Flux);
    else if (full == "integrator.max_step") cfg.integrator.max_step = p.quantity(value, Dim::Length);
    else if (full == "integrator.dense_output_points") cfg.integrator.dense_output_points = p.integer(value);
    else if (full == "output.directory") cfg.output.directory = value.text;
    else if (full == "output.csv") cfg.output.csv = p.boolean(value);
    else if (full == "output.json") cfg.output.json = p.boolean(value);
    else if (full == "output.svg") cfg.output.svg = p.boolean(value);
    else p.fail(ErrorCode::UnknownKey, "unknown key '" + full + "'", indent + 1);
  }

  auto resolve = [&](const char* prefix, std::optional<std::vector<double>>& listed,
                     std::vector<double>& target, const char* what) {
    const std::string s = std::string(prefix) + "_start", e = std::string(prefix) + "_stop",
                      st = std::string(prefix) + "_step";
    const int n = static_cast<int>(ranges.count(s) + ranges.count(e) + ranges.count(st));
    if (listed && n > 0) {
      throw Error(ErrorCode::InvalidArgument, std::string("sweep ") + what + ": give either a list or a range");
    }
    if (n > 0 && n < 3) {
      throw Error(ErrorCode::InvalidArgument, std::string("sweep ") + what + " range needs start, stop and step");
    }
    if (listed) target = *listed;
    else if (n == 3) target = arange(ranges[s], ranges[e], ranges[st], what);
    else if (defaults_applied) defaults_applied->push_back(std::string("sweep.") + what);
  };
  resolve("f", freq_list, cfg.sweep.signal_frequencies, "frequencies");
  resolve("p", power_list, cfg.sweep.signal_powers, "powers");
  // The pump frequency is never a valid signal frequency.
  cfg.sweep.signal_frequencies = drop_value(cfg.sweep.signal_frequencies, cfg.sweep.pump.frequency);

  if (defaults_applied) {
    static const std::vector<std::string> keys = {
        "device.n_cells", "device.cell_length", "device.junction_ratio", "device.critical_current",
        "device.snail_capacitance", "device.ground_capacitance", "device.external_flux",
        "loss.pump_tan_delta", "loss.signal_table", "pump.frequency", "pump.power",
        "sweep.probe_frequency", "sweep.probe_power", "sweep.stability_power", "integrator.rel_tol",
        "integrator.abs_tol", "integrator.max_step", "integrator.dense_output_points",
        "output.directory", "output.csv", "output.json", "output.svg"};
    for (const auto& k : keys)
      if (!seen.contains(k)) defaults_applied->push_back(k);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::vector<std::string>* defaults_applied) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), defaults_applied);
}

std::string format_double(double value) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  auto list = [](const std::vector<double>& v, const char* unit) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += format_double(v[i]) + " " + unit;
    }
    return s;
  };
  out << "[device]\n"
      << "n_cells = " << c.device.n_cells << "\n"
      << "cell_length = " << format_double(c.device.cell_length) << " m\n"
      << "junction_ratio = " << format_double(c.device.junction_ratio) << "\n"
      << "critical_current = " << format_double(c.device.critical_current) << " A\n"
      << "snail_capacitance = " << format_double(c.device.snail_capacitance) << " F\n"
      << "ground_capacitance = " << format_double(c.device.ground_capacitance) << " F\n"
      << "external_flux = " << format_double(c.device.external_flux) << " Wb\n\n";
  out << "[loss]\n"
      << "pump_tan_delta = " << format_double(c.losses.pump_tan_delta) << "\n"
      << "signal_table = ";
  for (std::size_t i = 0; i < c.losses.signal_table.size(); ++i) {
    if (i) out << ", ";
    out << format_double(c.losses.signal_table[i].first) << " dBm : "
        << format_double(c.losses.signal_table[i].second);
  }
  out << "\n\n[pump]\n"
      << "frequency = " << format_double(c.sweep.pump.frequency) << " Hz\n"
      << "power = " << format_double(c.sweep.pump.power_dbm) << " dBm\n\n";
  out << "[sweep]\n"
      << "frequencies = " << list(c.sweep.signal_frequencies, "Hz") << "\n"
      << "powers = " << list(c.sweep.signal_powers, "dBm") << "\n"
      << "probe_frequency = " << format_double(c.probe_frequency) << " Hz\n"
      << "probe_power = " << format_double(c.probe_power_dbm) << " dBm\n"
      << "stability_power = " << format_double(c.stability_power_dbm) << " dBm\n\n";
  out << "[integrator]\n"
      << "rel_tol = " << format_double(c.integrator.rel_tol) << "\n"
      << "abs_tol = " << format_double(c.integrator.abs_tol) << " Wb\n"
      << "max_step = " << format_double(c.integrator.max_step) << " m\n"
      << "dense_output_points = " << c.integrator.dense_output_points << "\n\n";
  out << "[output]\n"
      << "directory = " << c.output.directory << "\n"
      << "csv = " << (c.output.csv ? "true" : "false") << "\n"
      << "json = " << (c.output.json ? "true" : "false") << "\n"
      << "svg = " << (c.output.svg ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace twpa
