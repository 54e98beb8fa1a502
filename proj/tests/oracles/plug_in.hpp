#pragma once

// Straight-line evaluation of the linear and nonlinear wave parameters from
// raw device numbers, written out term by term. Used to cross-check the
// library's coefficient assembly.

#include <cmath>

namespace oracle {

struct Device {
  double n = 700, a = 8.7e-6, r = 0.062, ic = 1.4e-6, cj = 31e-15, cg = 223.5e-15;
};

struct PlugIn {
  double L, xi, kp, ks, ki;
  double a_pp, a_ss, a_ii, a_sp, a_ip, a_si, a_is, a_ps, a_pi;
  double k_si, k_is, k_psi, dk;
};

// alpha, gamma: SNAIL expansion coefficients supplied by the caller.
inline PlugIn plug_in(const Device& d, double alpha, double gamma, double fp, double fs) {
  const double hbar = 1.054571817e-34, e = 1.602176634e-19;
  const double phi0 = hbar / (2 * e);
  const double pi = 3.14159265358979323846;
  PlugIn o{};
  o.L = phi0 / (alpha * d.ic);
  o.xi = 6 * gamma / (alpha * alpha * alpha);
  const double wp = 2 * pi * fp, ws = 2 * pi * fs, wi = 2 * wp - ws;
  auto k = [&](double w) { return w * std::sqrt(o.L * d.cg) / (d.a * std::sqrt(1 - o.L * d.cj * w * w)); };
  o.kp = k(wp);
  o.ks = k(ws);
  o.ki = k(wi);
  const double pre = o.xi * std::pow(d.a, 4) / (d.cg * d.ic * d.ic * std::pow(o.L, 3));
  o.a_pp = pre * std::pow(o.kp, 5) / (16 * wp * wp);
  o.a_ss = pre * std::pow(o.ks, 5) / (16 * ws * ws);
  o.a_ii = pre * std::pow(o.ki, 5) / (16 * wi * wi);
  o.a_sp = pre * o.kp * o.kp * std::pow(o.ks, 3) / (8 * ws * ws);
  o.a_ip = pre * o.kp * o.kp * std::pow(o.ki, 3) / (8 * wi * wi);
  o.a_si = pre * o.ki * o.ki * std::pow(o.ks, 3) / (8 * ws * ws);
  o.a_is = pre * o.ks * o.ks * std::pow(o.ki, 3) / (8 * wi * wi);
  o.a_ps = pre * o.ks * o.ks * std::pow(o.kp, 3) / (8 * wp * wp);
  o.a_pi = pre * o.ki * o.ki * std::pow(o.kp, 3) / (8 * wp * wp);
  o.k_si = pre * o.ks * o.ki * o.kp * o.kp * (2 * o.kp - o.ki) / (16 * ws * ws);
  o.k_is = pre * o.ks * o.ki * o.kp * o.kp * (2 * o.kp - o.ks) / (16 * wi * wi);
  o.k_psi = pre * o.ks * o.ki * o.kp * o.kp * (o.ks + o.ki - o.kp) / (8 * wp * wp);
  o.dk = 2 * o.kp - o.ks - o.ki;
  return o;
}

}  // namespace oracle
