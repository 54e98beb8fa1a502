#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "twpa/ode.hpp"

using namespace twpa;
using test::code_of;

TEST_SUITE("ode") {

TEST_CASE("harmonic oscillator with dense output") {
  // y'' = -y as a first-order system; exact solution (cos x, -sin x).
  auto rhs = [](double, const ode::State<2>& y) { return ode::State<2>{y[1], -y[0]}; };
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(10.0 * i / 100.0);
  ode::Tolerances tol;
  tol.rel_tol = 1e-11;
  tol.abs_tol = 1e-13;
  ode::Stats stats;
  const auto ys = ode::integrate_dense<2>(rhs, {1.0, 0.0}, 0.0, 10.0, xs, tol, &stats);
  REQUIRE(ys.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(ys[i][0] == doctest::Approx(std::cos(xs[i])).epsilon(1e-8).scale(1.0));
    CHECK(ys[i][1] == doctest::Approx(-std::sin(xs[i])).epsilon(1e-8).scale(1.0));
  }
  CHECK(stats.accepted > 0);
  CHECK(stats.evaluations >= 6 * stats.accepted);
}

TEST_CASE("exponential decay at loose and tight tolerances") {
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{-2.0 * y[0]}; };
  for (double rtol : {1e-6, 1e-10}) {
    ode::Tolerances tol;
    tol.rel_tol = rtol;
    tol.abs_tol = 1e-300;
    const auto ys = ode::integrate_dense<1>(rhs, {1.0}, 0.0, 3.0, {3.0}, tol);
    CHECK(std::abs(ys.back()[0] / std::exp(-6.0) - 1.0) < 50 * rtol);
  }
}

TEST_CASE("endpoint sample is the integrator's own value") {
  auto rhs = [](double x, const ode::State<1>&) { return ode::State<1>{std::cos(x)}; };
  ode::Tolerances tol;
  const auto a = ode::integrate_dense<1>(rhs, {0.0}, 0.0, 2.0, {0.5, 2.0}, tol);
  const auto b = ode::integrate_dense<1>(rhs, {0.0}, 0.0, 2.0, {2.0}, tol);
  CHECK(a.back()[0] == b.back()[0]);
  CHECK(a.back()[0] == doctest::Approx(std::sin(2.0)).epsilon(1e-8));
}

TEST_CASE("max step is honoured") {
  auto rhs = [](double, const ode::State<1>&) { return ode::State<1>{1.0}; };
  ode::Tolerances tol;
  tol.max_step = 0.01;
  ode::Stats stats;
  ode::integrate_dense<1>(rhs, {0.0}, 0.0, 1.0, {1.0}, tol, &stats);
  CHECK(stats.accepted >= 100);
}

TEST_CASE("blow-up is reported") {
  // y' = y^2, y(0) = 1 diverges at x = 1.
  auto rhs = [](double, const ode::State<1>& y) { return ode::State<1>{y[0] * y[0]}; };
  ode::Tolerances tol;
  const auto code = code_of([&] { ode::integrate_dense<1>(rhs, {1.0}, 0.0, 2.0, {2.0}, tol); });
  CHECK((code == ErrorCode::StepSizeUnderflow || code == ErrorCode::NonFiniteState));
}

TEST_CASE("non-finite initial state") {
  auto rhs = [](double, const ode::State<1>& y) { return y; };
  CHECK(code_of([&] { ode::integrate_dense<1>(rhs, {NAN}, 0.0, 1.0, {1.0}, {}); }) == ErrorCode::NonFiniteState);
}

}  // TEST_SUITE
