#pragma once

// Adaptive Dormand-Prince 5(4) with its 4th-order continuous extension, driven
// through Boost.Odeint's dense-output stepper. This wrapper adds sampling at
// caller-chosen positions, an exact landing on the end point, and typed errors.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "twpa/error.hpp"

namespace twpa::ode {

struct Tolerances {
  double rel_tol = 1e-9;
  double abs_tol = 1e-24;
  double max_step = 0.0;           // <= 0: unbounded
  long max_steps = 10'000'000;
};

struct Stats {
  long accepted = 0;
  long evaluations = 0;
};

template <std::size_t N>
using State = std::array<double, N>;

/// Integrates y' = rhs(x, y) from x0 to x1 and returns y at each of the
/// requested sample positions (sorted, inside [x0, x1]). The last sample, if
/// equal to x1, is the integrator's own endpoint value.
template <std::size_t N, class Rhs>
std::vector<State<N>> integrate_dense(Rhs&& rhs, State<N> y, double x0, double x1,
                                      const std::vector<double>& samples, const Tolerances& tol,
                                      Stats* stats_out = nullptr) {
  namespace oi = boost::numeric::odeint;
  using S = State<N>;

  Stats stats;
  std::vector<S> out;
  out.reserve(samples.size());
  std::size_t next = 0;

  auto check_finite = [](const S& v, double x) {
    for (double c : v) {
      if (!std::isfinite(c)) {
        std::ostringstream msg;
        msg << "non-finite state at x = " << x;
        throw Error(ErrorCode::NonFiniteState, msg.str());
      }
    }
  };
  check_finite(y, x0);

  while (next < samples.size() && samples[next] <= x0) {
    out.push_back(y);
    ++next;
  }
  const double span = x1 - x0;
  if (!(span > 0.0)) {
    if (stats_out) *stats_out = stats;
    return out;
  }

  auto system = [&](const S& state, S& dydx, double x) {
    ++stats.evaluations;
    dydx = rhs(x, state);
  };

  const double max_dt = tol.max_step > 0.0 ? std::min(tol.max_step, span) : span;
  auto stepper = oi::make_dense_output(tol.abs_tol, tol.rel_tol, max_dt, oi::runge_kutta_dopri5<S>());
  const double h0 = std::min(max_dt, 1e-3 * span);
  stepper.initialize(y, x0, h0);

  const double end_slack = 1e-13 * std::max(std::abs(x1), std::abs(span));
  S ys;
  try {
    while (x1 - stepper.current_time() > end_slack) {
      if (stats.accepted >= tol.max_steps) {
        throw Error(ErrorCode::StepSizeUnderflow, "integration step budget exhausted");
      }
      const double t = stepper.current_time();
      const double dt = stepper.current_time_step();
      if (dt <= 1e-14 * std::max(std::abs(t), std::abs(span))) {
        std::ostringstream msg;
        msg << "step size underflow at x = " << t;
        throw Error(ErrorCode::StepSizeUnderflow, msg.str());
      }
      // Shorten the step that would overshoot so the last one lands on x1.
      if (t + dt > x1) stepper.initialize(stepper.current_state(), t, x1 - t);

      const auto [t_old, t_new] = stepper.do_step(system);
      ++stats.accepted;
      check_finite(stepper.current_state(), t_new);
      const bool at_end = x1 - t_new <= end_slack;
      while (next < samples.size() && (samples[next] <= t_new || at_end)) {
        if (samples[next] >= t_new || (at_end && samples[next] >= x1)) {
          out.push_back(stepper.current_state());
        } else {
          stepper.calc_state(std::max(samples[next], t_old), ys);
          out.push_back(ys);
        }
        ++next;
      }
    }
  } catch (const oi::step_adjustment_error& e) {
    throw Error(ErrorCode::StepSizeUnderflow, e.what());
  }

  if (stats_out) *stats_out = stats;
  return out;
}

}  // namespace twpa::ode
