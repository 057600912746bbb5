#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "eitsim/lambda_system.hpp"
#include "eitsim/time_evolution.hpp"
#include "eitsim/units.hpp"

namespace testing_support {

using eitsim::complex;

// Rb-87 D1 atom with the given dephasing and ground-coherence decay (Hz).
inline eitsim::AtomParams rb_atom(double gamma_p_hz, double gamma_bc_hz, double density_cm3,
                                  double temperature_c) {
  eitsim::AtomParams a;
  a.gamma_r = eitsim::angular(eitsim::rb87::d1_natural_width_hz / 2.0);
  a.gamma_p = eitsim::angular(gamma_p_hz);
  a.gamma_bc = eitsim::angular(gamma_bc_hz);
  a.wavelength = eitsim::rb87::d1_wavelength;
  a.density = density_cm3 * 1e6;
  a.mass = eitsim::rb87::mass;
  a.temperature = temperature_c + eitsim::constants::celsius_zero;
  return a;
}

inline eitsim::AtomParams buffer_atom() { return rb_atom(120e6, 1e3, 4.7e11, 67.7); }
inline eitsim::AtomParams vacuum_atom() { return rb_atom(0.0, 10e3, 4.2e11, 66.4); }

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Max-norm difference of two states relative to the larger state's max norm.
inline double state_distance(const eitsim::SteadyState& x, const eitsim::SteadyState& y) {
  const double diff = std::max({std::abs(x.rho_aa - y.rho_aa), std::abs(x.rho_bb - y.rho_bb),
                                std::abs(x.rho_cc - y.rho_cc), std::abs(x.rho_ab - y.rho_ab),
                                std::abs(x.rho_ca - y.rho_ca), std::abs(x.rho_cb - y.rho_cb)});
  const double norm = std::max({std::abs(y.rho_aa), std::abs(y.rho_bb), std::abs(y.rho_cc),
                                std::abs(y.rho_ab), std::abs(y.rho_ca), std::abs(y.rho_cb)});
  return diff / norm;
}

inline double relative(complex a, complex b) { return std::abs(a - b) / std::abs(b); }

// Linear response of the time-domain oracle: chi = -eta rho_ab / Omega_p.
inline complex oracle_chi(const eitsim::AtomParams& a, eitsim::FieldPoint f) {
  f.omega_p = 1e-4 * std::abs(f.omega_d);
  const double slow = std::min({a.gamma_r, a.gamma(), a.gamma_bc});
  const eitsim::SteadyState o = eitsim::evolve_to_steady_state(a, f, 1e3 / slow, 1.0);
  return -a.eta() * o.rho_ab / f.omega_p;
}

// Dense trapezoid over +-6u with the Maxwellian written out explicitly.
inline complex trapezoid_chi(const eitsim::AtomParams& a, const eitsim::FieldPoint& f,
                             int points = 100000) {
  using eitsim::constants::pi;
  const double u = a.most_probable_speed();
  const double k = 2.0 * pi / a.wavelength;
  const double lo = -6.0 * u;
  const double h = 12.0 * u / (points - 1);
  complex sum{};
  for (int j = 0; j < points; ++j) {
    const double v = lo + h * j;
    const double w = (j == 0 || j == points - 1 ? 0.5 : 1.0) * h *
                     std::exp(-(v / u) * (v / u)) / (u * std::sqrt(pi));
    eitsim::FieldPoint g = f;
    g.delta_one = f.delta_one + k * v;
    const eitsim::SteadyState s = eitsim::steady_state_populations(a, f.omega_d, g.delta_one);
    sum += w * eitsim::susceptibility(a, g, s).value;
  }
  return sum;
}

}  // namespace testing_support
