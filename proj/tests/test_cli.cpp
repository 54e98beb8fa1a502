#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "twpa/calibration.hpp"
#include "twpa/config.hpp"
#include "twpa/io.hpp"

namespace fs = std::filesystem;
using namespace twpa;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("twpa_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI; returns its exit status and captures stderr.
int run(const std::string& args, std::string* err = nullptr, const fs::path& stderr_file = {}) {
  const fs::path errf = stderr_file.empty() ? fs::temp_directory_path() / "twpa_cli_stderr.txt" : stderr_file;
  const std::string cmd = std::string("\"") + TWPA_CLI_PATH + "\" " + args + " 2>\"" + errf.string() + "\" >/dev/null";
  const int status = std::system(cmd.c_str());
  if (err) *err = slurp(errf);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string kSmallGrid =
    "[sweep]\nfrequencies = 6 GHz\npowers = -110 dBm\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analytic curve places P1dB at the closed form") {
  TempDir d;
  REQUIRE(run("--out \"" + d.path.string() + "\" analytic --g-lin-db 20 --pump-dbm -78.4") == 0);
  const auto j = nlohmann::json::parse(slurp(d.path / "analytic.json"));
  CHECK(j[0]["P1dB_dBm"].get<double>() == doctest::Approx(-107.27).epsilon(1e-3));
  const auto t = read_csv(d.path / "analytic.csv");
  CHECK(t.rows.size() == 201);
  CHECK(fs::exists(d.path / "manifest.json"));
}

TEST_CASE("identical runs give byte-identical outputs") {
  TempDir a, b;
  REQUIRE(run("--out \"" + a.path.string() + "\" analytic --g-lin-db 15 20") == 0);
  REQUIRE(run("--out \"" + b.path.string() + "\" analytic --g-lin-db 15 20") == 0);
  CHECK(slurp(a.path / "analytic.csv") == slurp(b.path / "analytic.csv"));
  CHECK(slurp(a.path / "analytic.json") == slurp(b.path / "analytic.json"));
}

TEST_CASE("sweep on a 1x1 grid") {
  TempDir d;
  write(d.path / "small.conf", kSmallGrid);
  REQUIRE(run("--config \"" + (d.path / "small.conf").string() + "\" --out \"" + (d.path / "o").string() +
              "\" --plot sweep") == 0);
  const auto text = slurp(d.path / "o" / "sweep.csv");
  const auto t = parse_csv(text);
  CHECK(t.rows.size() == 1);
  const auto s = parse_sweep_csv(text);
  CHECK(s.grid.signal_frequencies == std::vector<double>{6e9});
  CHECK(s.gain_db(0, 0) > 5.0);
  CHECK(fs::exists(d.path / "o" / "gain.svg"));
  CHECK(fs::exists(d.path / "o" / "sweep.json"));
}

TEST_CASE("p1db summary satisfies the output identity") {
  TempDir d;
  write(d.path / "p.conf",
        "[sweep]\nfrequencies = 6 GHz, 9 GHz\np_start = -124 dBm\np_stop = -90 dBm\np_step = 2 dB\n");
  REQUIRE(run("--config \"" + (d.path / "p.conf").string() + "\" --workers 2 --out \"" + d.path.string() + "\" p1db") == 0);
  const auto s = parse_summary_csv(slurp(d.path / "summary.csv"));
  REQUIRE(s.frequencies.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    if (!s.p1db_dbm[i]) continue;
    CHECK(*s.pout_at_p1db_dbm[i] == *s.p1db_dbm[i] + s.g_lin_db[i] - 1.0);
  }
}

TEST_CASE("simulate and stability emit trajectories") {
  TempDir d;
  REQUIRE(run("--out \"" + d.path.string() + "\" simulate --frequency 6 --power -100") == 0);
  const auto traj = parse_trajectory_csv(slurp(d.path / "trajectory.csv"));
  CHECK(traj.size() == 201);
  CHECK(traj.front().x == 0.0);
  CHECK(std::abs(traj.back().a_s) > std::abs(traj.front().a_s));

  write(d.path / "s.conf", "[sweep]\nfrequencies = 6 GHz, 9 GHz\npowers = -110 dBm\n");
  REQUIRE(run("--config \"" + (d.path / "s.conf").string() + "\" --out \"" + d.path.string() + "\" stability") == 0);
  const auto map = parse_stability_csv(slurp(d.path / "stability.csv"));
  CHECK(map.positions.size() == 701);
  CHECK(map.gain_db(0, 0) == 0.0);
}

TEST_CASE("fit inductance from CSV") {
  TempDir d;
  std::ostringstream csv;
  csv << "flux_Wb,L_H\n";
  for (int j = 0; j <= 10; ++j) {
    const double flux = PhysicalConstants::flux_quantum * j / 10.0;
    csv << format_double(flux) << "," << format_double(snail_inductance(flux, 0.062, 1.4e-6)) << "\n";
  }
  write(d.path / "l.csv", csv.str());
  REQUIRE(run("--out \"" + d.path.string() + "\" fit inductance --input \"" + (d.path / "l.csv").string() + "\"") == 0);
  const auto j = nlohmann::json::parse(slurp(d.path / "fit_inductance.json"));
  const auto dump = j.dump();
  CHECK(dump.find("\"r\"") != std::string::npos);
  CHECK(dump.find("\"Ic\"") != std::string::npos);
}

TEST_CASE("exit codes and error reporting") {
  TempDir d;
  std::string err;
  write(d.path / "bad.conf", "[device]\ncritical_current = -1 uA\n");
  CHECK(run("--config \"" + (d.path / "bad.conf").string() + "\" --out \"" + (d.path / "o").string() + "\" sweep", &err) == 2);
  CHECK(err.find("\"category\"") != std::string::npos);
  CHECK_FALSE(fs::exists(d.path / "o"));

  write(d.path / "unk.conf", "[device]\n\nfoo = 1\n");
  CHECK(run("--config \"" + (d.path / "unk.conf").string() + "\" analytic", &err) == 2);
  CHECK(err.find("UnknownKey") != std::string::npos);
  CHECK(err.find("\"line\":3") != std::string::npos);

  CHECK(run("--out \"" + d.path.string() + "\" fit loss --input /nonexistent/x.csv", &err) == 4);
  CHECK(run("--config /nonexistent/x.conf analytic", &err) == 4);
  CHECK(run("nosuchcommand", &err) == 2);

  // Numerical failure: measured noise power falls as the source heats up.
  write(d.path / "noise.csv", "f_GHz,T_K,P_W\n6,0.05,2e-9\n6,1,1e-9\n");
  CHECK(run("--out \"" + (d.path / "n").string() + "\" fit noise --bandwidth 1e6 --input \"" +
                (d.path / "noise.csv").string() + "\"",
            &err) == 3);
  CHECK(err.find("NegativeGain") != std::string::npos);
  CHECK_FALSE(fs::exists(d.path / "n"));
}

TEST_CASE("environment variables mirror flags") {
  TempDir d;
  const std::string cmd = "TWPA_OUT=\"" + d.path.string() + "\" \"" + TWPA_CLI_PATH +
                          "\" analytic --g-lin-db 10 >/dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(d.path / "analytic.csv"));
}

}  // TEST_SUITE
