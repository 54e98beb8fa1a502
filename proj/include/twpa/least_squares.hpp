#pragma once

// Levenberg-Marquardt (Eigen's MINPACK port) with a central-difference Jacobian,
// parameter scaling and a linearized covariance.

#include <Eigen/Dense>
#include <functional>

namespace twpa {

struct LsqOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative parameter step
};

struct LsqResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance;      // s^2 (J^T J)^+, +inf on unidentifiable parameters
  Eigen::VectorXd standard_errors;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Minimizes |residuals(p)|^2 from p0. Parameters are internally scaled by
/// |p0| (or 1 for zero entries) so that mixed-unit problems stay balanced.
/// Errors: SingularJacobian (a parameter has no effect on the residuals at
/// the starting point), NoConvergence.
LsqResult levenberg_marquardt(const ResidualFn& residuals, const Eigen::VectorXd& p0,
                              const LsqOptions& opts = {});

}  // namespace twpa
