#pragma once

// Probe propagation through the cell: dOmega_p/dz = -i chi_bar Omega_p with
// the Doppler-averaged chi_bar held constant along z (undepleted drive).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eitsim/doppler.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/lambda_system.hpp"

namespace eitsim {

struct CellConfig {
  double length = 0.0;  // m
  std::string label;
  AtomParams atom;
  double omega_d = 0.0;       // rad/s
  std::vector<double> scan;   // two-photon detunings, rad/s, strictly increasing
  double delta_one = 0.0;     // rad/s
};

inline void validate(const CellConfig& cell) {
  validate(cell.atom);
  if (!(cell.length > 0.0)) throw InvalidArgument("cell length must be positive");
  for (std::size_t j = 1; j < cell.scan.size(); ++j) {
    if (!(cell.scan[j] > cell.scan[j - 1])) {
      throw InvalidArgument("scan must be strictly increasing");
    }
  }
}

struct TransmissionSpectrum {
  std::vector<double> delta;            // rad/s
  std::vector<complex> amplitude_ratio;  // Omega_p(L) / Omega_p(0)
  std::vector<double> transmission;      // |ratio|^2
};

enum class PropagationMode { closed_form, stepped };

/// exp(-i chi L).
inline complex propagate_uniform(complex chi, double length) {
  return std::exp(complex{0.0, -1.0} * chi * length);
}

/// Classical RK4 on dOmega/dz = -i chi(z) Omega from z = 0 to `length`,
/// starting from Omega = 1. `chi` is any callable double -> complex (m^-1).
template <class ChiOfZ>
complex propagate_stepped(ChiOfZ&& chi, double length, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("propagate_stepped: steps must be positive");
  const complex mi{0.0, -1.0};
  const double h = length / static_cast<double>(steps);
  complex y{1.0, 0.0};
  for (std::size_t n = 0; n < steps; ++n) {
    const double z = h * static_cast<double>(n);
    const complex c0 = chi(z);
    const complex cm = chi(z + 0.5 * h);
    const complex c1 = chi(z + h);
    const complex k1 = mi * c0 * y;
    const complex k2 = mi * cm * (y + 0.5 * h * k1);
    const complex k3 = mi * cm * (y + 0.5 * h * k2);
    const complex k4 = mi * c1 * (y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

/// Output/input probe amplitude at one two-photon detuning.
inline complex propagate_cw(const CellConfig& cell, double delta_two, const VelocityGrid& grid,
                            PropagationMode mode = PropagationMode::closed_form,
                            std::size_t steps = 10000) {
  validate(cell);
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  const complex chi = avg.chi(delta_two).value;
  if (mode == PropagationMode::stepped) {
    return propagate_stepped([chi](double) { return chi; }, cell.length, steps);
  }
  return propagate_uniform(chi, cell.length);
}

namespace detail {
template <class ChiOfDelta>
TransmissionSpectrum tabulate(const CellConfig& cell, ChiOfDelta&& chi) {
  TransmissionSpectrum s;
  s.delta = cell.scan;
  s.amplitude_ratio.reserve(cell.scan.size());
  s.transmission.reserve(cell.scan.size());
  for (double d : cell.scan) {
    const complex r = propagate_uniform(chi(d), cell.length);
    s.amplitude_ratio.push_back(r);
    s.transmission.push_back(std::norm(r));
  }
  return s;
}
}  // namespace detail

/// Transmission over cell.scan. Velocity-class steady states are solved
/// once; output order follows the scan.
inline TransmissionSpectrum scan_spectrum(const CellConfig& cell, const VelocityGrid& grid) {
  validate(cell);
  if (cell.scan.empty()) throw InvalidArgument("empty scan");
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  return detail::tabulate(cell, [&](double d) { return avg.chi(d).value; });
}

/// Coherence-free transmission over cell.scan: the same pumped populations
/// with Gamma_cb -> infinity, i.e. the level the wings approach.
inline TransmissionSpectrum background_spectrum(const CellConfig& cell,
                                                const VelocityGrid& grid) {
  validate(cell);
  if (cell.scan.empty()) throw InvalidArgument("empty scan");
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  return detail::tabulate(cell, [&](double d) { return avg.background(d).value; });
}

}  // namespace eitsim
