#include <doctest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "twpa/least_squares.hpp"

using namespace twpa;
using test::code_of;

TEST_SUITE("least_squares") {

TEST_CASE("Rosenbrock as a least-squares problem") {
  auto f = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2);
    r << 10.0 * (p(1) - p(0) * p(0)), 1.0 - p(0);
    return r;
  };
  Eigen::VectorXd p0(2);
  p0 << -1.2, 1.0;
  const auto res = levenberg_marquardt(f, p0);
  CHECK(res.converged);
  CHECK(res.params(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.params(1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.residual_norm < 1e-8);
}

TEST_CASE("exponential fit with mixed scales and standard errors") {
  // y = A exp(-t / tau) on t in seconds with tau ~ 1e-6 s.
  Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(50, 0.0, 5e-6);
  const double a = 3e-3, tau = 1.3e-6;
  Eigen::VectorXd y = (a * (-t.array() / tau).exp()).matrix();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 1e-6 * ((i % 2) ? 1.0 : -1.0);
  auto f = [&](const Eigen::VectorXd& p) { return Eigen::VectorXd(p(0) * (-t.array() / p(1)).exp() - y.array()); };
  Eigen::VectorXd p0(2);
  p0 << 1e-3, 2e-6;
  const auto res = levenberg_marquardt(f, p0);
  CHECK(res.params(0) == doctest::Approx(a).epsilon(1e-3));
  CHECK(res.params(1) == doctest::Approx(tau).epsilon(1e-3));
  CHECK(res.standard_errors(0) > 0.0);
  CHECK(res.standard_errors(0) < 1e-5);
  CHECK(res.residuals.size() == 50);
  CHECK(res.residual_norm == doctest::Approx(res.residuals.norm()));
}

TEST_CASE("linear model: covariance matches the normal equations") {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(20, -1.0, 1.0);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y(i) = 2.0 + 0.5 * x(i) + 0.01 * std::sin(7.0 * i);
  auto f = [&](const Eigen::VectorXd& p) { return Eigen::VectorXd(p(0) + p(1) * x.array() - y.array()); };
  Eigen::VectorXd p0(2);
  p0 << 1.0, 1.0;
  const auto res = levenberg_marquardt(f, p0);
  Eigen::MatrixXd J(20, 2);
  J.col(0).setOnes();
  J.col(1) = x;
  const Eigen::VectorXd exact = (J.transpose() * J).ldlt().solve(J.transpose() * y);
  CHECK(res.params(0) == doctest::Approx(exact(0)).epsilon(1e-9));
  CHECK(res.params(1) == doctest::Approx(exact(1)).epsilon(1e-9));
  const double s2 = res.residuals.squaredNorm() / 18.0;
  const Eigen::MatrixXd cov = s2 * (J.transpose() * J).inverse();
  CHECK(res.standard_errors(0) == doctest::Approx(std::sqrt(cov(0, 0))).epsilon(1e-4));
  CHECK(res.standard_errors(1) == doctest::Approx(std::sqrt(cov(1, 1))).epsilon(1e-4));
}

TEST_CASE("degenerate parameters get infinite standard errors") {
  // Only the product p0 p1 is identifiable.
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  auto f = [&](const Eigen::VectorXd& p) { return Eigen::VectorXd(p(0) * p(1) * x.array() - 3.0 * x.array() + 0.01 * x.array().sin()); };
  Eigen::VectorXd p0(2);
  p0 << 1.0, 2.0;
  const auto res = levenberg_marquardt(f, p0);
  CHECK(res.params(0) * res.params(1) == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(std::isinf(res.standard_errors(0)));
  CHECK(std::isinf(res.standard_errors(1)));
}

TEST_CASE("failure modes") {
  auto dead = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(3);
    r << p(0) - 1.0, p(0) + 1.0, 2.0 * p(0);
    return r;
  };
  Eigen::VectorXd p0(2);
  p0 << 0.5, 0.5;
  CHECK(code_of([&] { levenberg_marquardt(dead, p0); }) == ErrorCode::SingularJacobian);

  auto slow = [](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2);
    r << 10.0 * (p(1) - p(0) * p(0)), 1.0 - p(0);
    return r;
  };
  LsqOptions opts;
  opts.max_iterations = 2;
  Eigen::VectorXd q0(2);
  q0 << -1.2, 1.0;
  CHECK(code_of([&] { levenberg_marquardt(slow, q0, opts); }) == ErrorCode::NoConvergence);
}

}  // TEST_SUITE
