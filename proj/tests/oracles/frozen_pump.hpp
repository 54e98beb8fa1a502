#pragma once

// Undepleted-pump small-signal gain from the matrix exponential of the
// linearized signal/idler system. The pump only carries self-phase
// modulation; in the frame rotating with half the total pump-induced phase
// mismatch the signal / conjugate-idler pair obeys a constant 2x2 system.

#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

struct FrozenPumpInputs {
  double alpha_pp, alpha_sp, alpha_ip;
  double kappa_si, kappa_is;
  double delta_k;
  std::complex<double> a_p0;
  double length;
};

/// Signal power gain |A_s(l)|^2 / |A_s(0)|^2 for an empty idler input.
inline double frozen_pump_gain(const FrozenPumpInputs& in) {
  using C = std::complex<double>;
  const C i(0, 1);
  const double p = std::norm(in.a_p0);
  const double psi = 2 * in.alpha_pp * p + in.delta_k;
  Eigen::Matrix2cd m;
  m(0, 0) = i * (in.alpha_sp * p - psi / 2);
  m(0, 1) = i * in.kappa_si * in.a_p0 * in.a_p0;
  m(1, 0) = -i * in.kappa_is * std::conj(in.a_p0 * in.a_p0);
  m(1, 1) = -i * (in.alpha_ip * p - psi / 2);
  const Eigen::Matrix2cd prop = (m * in.length).exp();
  return std::norm(prop(0, 0));
}

}  // namespace oracle
