#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles/analytic_inverse.hpp"
#include "test_util.hpp"
#include "twpa/compression.hpp"
#include "twpa/units.hpp"

using namespace twpa;
using test::code_of;

namespace {

AnalyticGainModel model(double g_lin_db, double pump_dbm = -78.4) {
  return {db_to_power_ratio(g_lin_db), dbm_to_watt(pump_dbm)};
}

// Samples the depletion law from lo to hi dBm in steps of `step`.
void synth_curve(const AnalyticGainModel& m, double lo, double hi, double step, std::vector<double>& p,
                 std::vector<double>& g) {
  p.clear();
  g.clear();
  for (double x = lo; x <= hi + 1e-9; x += step) {
    p.push_back(x);
    g.push_back(power_ratio_to_db(analytic_gain(m, dbm_to_watt(x))));
  }
}

}  // namespace

TEST_SUITE("compression") {

TEST_CASE("analytic gain law") {
  const auto m = model(20.0);
  CHECK(analytic_gain(m, 0.0) == m.g_lin);
  const double half = m.pump_power / (2.0 * m.g_lin);
  CHECK(analytic_gain(m, half) == doctest::Approx(m.g_lin / 2.0));
  double prev = analytic_gain(m, 0.0);
  for (int i = 1; i < 50; ++i) {
    const double g = analytic_gain(m, dbm_to_watt(-140.0 + i));
    CHECK(g < prev);
    prev = g;
  }
  CHECK(code_of([&] { analytic_gain(m, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { analytic_gain({100.0, 0.0}, 1e-12); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("closed-form P1dB against bisection") {
  const auto m = model(20.0);
  const double p1 = analytic_p1db(m);
  CHECK(p1 == doctest::Approx(oracle::bisect_p1db(100.0, -78.4)).epsilon(1e-8));
  CHECK(p1 == doctest::Approx(-107.27).epsilon(1e-3));
  CHECK(analytic_gain(m, dbm_to_watt(p1)) / m.g_lin == doctest::Approx(std::pow(10.0, -0.1)).epsilon(1e-12));
  // Doubling g_lin lowers P1dB by 10 log10 2.
  CHECK(p1 - analytic_p1db({200.0, m.pump_power}) == doctest::Approx(10.0 * std::log10(2.0)).epsilon(1e-12));
  // Output-referred compression is independent of g_lin.
  const double c0 = p1 + 10.0 * std::log10(2.0 * m.g_lin);
  for (double g : {10.0, 15.0, 25.0, 30.0}) {
    const auto mg = model(g);
    CHECK(analytic_p1db(mg) + 10.0 * std::log10(2.0 * mg.g_lin) == doctest::Approx(c0).epsilon(1e-12));
  }
  CHECK(code_of([] { analytic_p1db({0.0, 1e-11}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("extract P1dB from synthetic depletion curves") {
  std::vector<double> p, g;
  for (double glin : {10.0, 15.0, 20.0, 25.0}) {
    const auto m = model(glin);
    synth_curve(m, -140.0, -80.0, 0.25, p, g);
    const auto cp = extract_p1db(p, g);
    CAPTURE(glin);
    CHECK(std::abs(cp.p1db_dbm - analytic_p1db(m)) < 0.1);
    CHECK(cp.g_lin_db == doctest::Approx(glin).epsilon(1e-3));
    CHECK_FALSE(cp.non_monotonic);
  }
}

TEST_CASE("P1dB is invariant under vertical offsets") {
  std::vector<double> p, g;
  synth_curve(model(18.0), -140.0, -80.0, 0.5, p, g);
  const auto a = extract_p1db(p, g);
  for (double& v : g) v += 3.7;
  const auto b = extract_p1db(p, g);
  CHECK(b.p1db_dbm == doctest::Approx(a.p1db_dbm).epsilon(1e-12));
  CHECK(b.g_lin_db == doctest::Approx(a.g_lin_db + 3.7).epsilon(1e-12));
}

TEST_CASE("extract P1dB error paths") {
  std::vector<double> p, g;
  for (int i = 0; i < 20; ++i) {
    p.push_back(-120.0 + i);
    g.push_back(15.0);
  }
  CHECK(code_of([&] { extract_p1db(p, g); }) == ErrorCode::NoCrossing);
  CHECK(code_of([&] { extract_p1db(std::vector<double>(p.begin(), p.begin() + 6), std::vector<double>(g.begin(), g.begin() + 6)); }) ==
        ErrorCode::InvalidArgument);
  g.pop_back();
  CHECK(code_of([&] { extract_p1db(p, g); }) == ErrorCode::GridMismatch);
  g.push_back(15.0);
  std::swap(p[3], p[4]);
  CHECK(code_of([&] { extract_p1db(p, g); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("re-crossing is flagged") {
  std::vector<double> p, g;
  for (int i = 0; i < 30; ++i) {
    p.push_back(-120.0 + i);
    g.push_back(i < 10 ? 20.0 : (i < 20 ? 17.0 : 21.0));
  }
  const auto cp = extract_p1db(p, g, 1);
  CHECK(cp.non_monotonic);
  CHECK(cp.p1db_dbm > -111.0);
  CHECK(cp.p1db_dbm < -110.0);
}

TEST_CASE("summary of a synthetic surface") {
  ResponseSurface s;
  s.grid.pump = {};
  for (int i = 0; i < 6; ++i) s.grid.signal_frequencies.push_back((5.0 + 0.4 * i) * 1e9);
  for (double x = -140.0; x <= -80.0 + 1e-9; x += 0.5) s.grid.signal_powers.push_back(x);
  const std::size_t np = s.grid.signal_powers.size();
  const std::size_t nf = s.grid.signal_frequencies.size();
  s.gain_db = Matrix(np, nf);
  s.pump_s21_db = Matrix(np, nf);
  std::vector<double> glin_db = {8.0, 12.0, 16.0, 20.0, 24.0, 0.0};
  for (std::size_t c = 0; c < nf; ++c) {
    for (std::size_t r = 0; r < np; ++r) {
      const double p = s.grid.signal_powers[r];
      s.gain_db(r, c) = glin_db[c] == 0.0 ? 0.0 : power_ratio_to_db(analytic_gain(model(glin_db[c]), dbm_to_watt(p)));
      s.pump_s21_db(r, c) = -0.01 * (p + 140.0);  // linear in power
    }
  }
  const auto sum = compression_summary(s);
  for (std::size_t c = 0; c + 1 < nf; ++c) {
    CAPTURE(c);
    REQUIRE(sum.p1db_dbm[c].has_value());
    CHECK(std::abs(*sum.p1db_dbm[c] - analytic_p1db(model(glin_db[c]))) < 0.1);
    CHECK(*sum.pout_at_p1db_dbm[c] == *sum.p1db_dbm[c] + sum.g_lin_db[c] - 1.0);
    CHECK(*sum.pump_s21_at_p1db_db[c] == doctest::Approx(-0.01 * (*sum.p1db_dbm[c] + 140.0)).epsilon(1e-6));
  }
  // Flat column never compresses: entry absent, not fabricated.
  CHECK_FALSE(sum.p1db_dbm.back().has_value());
  CHECK_FALSE(sum.pump_s21_at_p1db_db.back().has_value());
  CHECK(sum.g_lin_db.back() == 0.0);

  ResponseSurface one = s;
  one.grid.signal_powers = {-100.0};
  CHECK(code_of([&] { compression_summary(one); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stability map without nonlinearity follows the loss slope") {
  LossModel losses;
  losses.signal_table = {{-100.0, 3.5e-3}};
  auto amp = make_amplifier(DeviceParams{}, losses);
  amp.op.kerr_scale = 0.0;
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-34;
  const std::vector<double> freqs = {5e9, 9e9};
  const auto map = stability_map(freqs, -94.6, {}, amp, cfg, 2);
  REQUIRE(map.positions.size() == 701);
  REQUIRE(map.gain_db.rows == 701);
  for (std::size_t c = 0; c < freqs.size(); ++c) {
    CHECK(map.gain_db(0, c) == 0.0);
    const double kpp = loss_k_imag(dispersion_k(hz_to_rad(freqs[c]), amp.op, amp.device), 3.5e-3);
    for (std::size_t j = 0; j < map.positions.size(); j += 50) {
      const double x = j * amp.device.cell_length;
      CHECK(map.gain_db(j, c) == doctest::Approx(-20.0 * std::log10(std::exp(1.0)) * kpp * x).epsilon(1e-7).scale(1e-9));
    }
  }
}

TEST_CASE("stability map starts at zero gain and is worker independent") {
  LossModel losses;
  losses.signal_table = {{-100.0, 3.5e-3}};
  const auto amp = make_amplifier(DeviceParams{}, losses);
  const std::vector<double> freqs = {6e9, 7e9, 8e9};
  const auto a = stability_map(freqs, -94.6, {}, amp, {}, 1);
  const auto b = stability_map(freqs, -94.6, {}, amp, {}, 3);
  CHECK(a.gain_db == b.gain_db);
  for (std::size_t c = 0; c < freqs.size(); ++c) CHECK(a.gain_db(0, c) == 0.0);
  CHECK(code_of([&] { stability_map({7.5e9}, -94.6, {}, amp, {}); }) == ErrorCode::DegenerateFrequency);
}

}  // TEST_SUITE
