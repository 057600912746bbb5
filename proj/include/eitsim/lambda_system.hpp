#pragma once

// Three-level Lambda system: |b> and |c> are ground states, |a> is the
// excited state. The probe couples a-b, the drive couples a-c. Everything
// is expressed in the rotating frame; all rates and detunings are angular
// frequencies (rad/s).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "eitsim/errors.hpp"
#include "eitsim/units.hpp"

namespace eitsim {

using complex = std::complex<double>;

struct AtomParams {
  double gamma_r = 0.0;      // radiative decay of |a> into each ground state
  double gamma_p = 0.0;      // collisional dephasing of the optical coherences
  double gamma_bc = 0.0;     // ground-state coherence decay
  double wavelength = 0.0;   // probe wavelength (m)
  double density = 0.0;      // number density (m^-3); zero describes an empty cell
  double mass = 0.0;         // kg
  double temperature = 0.0;  // K

  /// Polarization decay rate of the optical coherences.
  double gamma() const { return gamma_r + gamma_p; }

  /// Coupling constant (3/8pi) N lambda^2 gamma_r in m^-1 s^-1.
  double eta() const {
    return 3.0 / (8.0 * constants::pi) * density * wavelength * wavelength * gamma_r;
  }

  double wavenumber() const { return constants::two_pi / wavelength; }

  /// u = sqrt(2 k_B T / m).
  double most_probable_speed() const {
    return std::sqrt(2.0 * constants::boltzmann * temperature / mass);
  }

  bool operator==(const AtomParams&) const = default;
};

inline void validate(const AtomParams& atom) {
  if (!(atom.gamma_r >= 0.0) || !(atom.gamma_p >= 0.0) || !(atom.gamma_bc >= 0.0)) {
    throw InvalidArgument("decay rates must be non-negative");
  }
  if (!(atom.wavelength > 0.0)) throw InvalidArgument("wavelength must be positive");
  if (!(atom.density >= 0.0)) throw InvalidArgument("density must be non-negative");
  if (!(atom.mass > 0.0)) throw InvalidArgument("mass must be positive");
  if (!(atom.temperature > 0.0)) throw InvalidArgument("temperature must be positive");
}

struct FieldPoint {
  complex omega_d{0.0, 0.0};  // drive Rabi frequency
  complex omega_p{0.0, 0.0};  // probe Rabi frequency
  double delta_one = 0.0;     // one-photon detuning
  double delta_two = 0.0;     // two-photon detuning

  /// |Omega_p| / |Omega_d|; the closed-form susceptibility needs this small.
  double weak_probe_ratio() const {
    const double d = std::abs(omega_d);
    return d > 0.0 ? std::abs(omega_p) / d : INFINITY;
  }
};

/// Complex relaxation rates of the three coherences. Values are derived on
/// every call from the stored inputs.
class GeneralizedRates {
 public:
  GeneralizedRates(const AtomParams& atom, double delta_one, double delta_two)
      : gamma_(atom.gamma()), gamma_bc_(atom.gamma_bc), delta_one_(delta_one),
        delta_two_(delta_two) {}

  complex gamma_ab() const { return {gamma_, delta_one_ + delta_two_}; }
  complex gamma_ac() const { return {gamma_, delta_one_}; }
  /// rho_ca = conj(rho_ac), so it relaxes at the conjugate rate.
  complex gamma_ca() const { return std::conj(gamma_ac()); }
  complex gamma_cb() const { return {gamma_bc_, delta_two_}; }

 private:
  double gamma_;
  double gamma_bc_;
  double delta_one_;
  double delta_two_;
};

struct SteadyState {
  double rho_aa = 0.0;
  double rho_bb = 0.0;
  double rho_cc = 0.0;
  complex rho_ab{};
  complex rho_ca{};
  complex rho_cb{};

  double trace() const { return rho_aa + rho_bb + rho_cc; }

  /// Checks the trace, population bounds and |rho_xy|^2 <= rho_xx rho_yy.
  bool is_physical(double trace_tol = 1e-12, double positivity_tol = 1e-10) const {
    if (std::abs(trace() - 1.0) > trace_tol) return false;
    for (double p : {rho_aa, rho_bb, rho_cc}) {
      if (p < -positivity_tol || p > 1.0 + positivity_tol) return false;
    }
    return std::norm(rho_ab) <= rho_aa * rho_bb + positivity_tol &&
           std::norm(rho_ca) <= rho_cc * rho_aa + positivity_tol &&
           std::norm(rho_cb) <= rho_cc * rho_bb + positivity_tol;
  }
};

struct ComplexChi {
  complex value{};  // m^-1
};

namespace detail {

// Real unknowns: rho_bb, rho_cc, Re/Im rho_ab, Re/Im rho_ca, Re/Im rho_cb.
// rho_aa is eliminated through the trace.
using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;

inline StateVector density_rhs(const AtomParams& atom, const FieldPoint& field,
                               const StateVector& x) {
  const GeneralizedRates rates(atom, field.delta_one, field.delta_two);
  const complex i{0.0, 1.0};
  const complex od = field.omega_d;
  const complex op = field.omega_p;
  const double gr = atom.gamma_r;
  const double gbc = atom.gamma_bc;

  const double bb = x[0];
  const double cc = x[1];
  const double aa = 1.0 - bb - cc;
  const complex ab{x[2], x[3]};
  const complex ca{x[4], x[5]};
  const complex cb{x[6], x[7]};
  const complex ba = std::conj(ab);
  const complex ac = std::conj(ca);

  const complex dbb = i * std::conj(op) * ab - i * op * ba + gr * aa - gbc * bb + gbc * cc;
  const complex dcc = i * std::conj(od) * ac - i * od * ca + gr * aa - gbc * cc + gbc * bb;
  const complex dab = -rates.gamma_ab() * ab + i * op * (bb - aa) + i * od * cb;
  const complex dca = -rates.gamma_ca() * ca + i * std::conj(od) * (aa - cc) - i * std::conj(op) * cb;
  const complex dcb = -rates.gamma_cb() * cb - i * op * ca + i * std::conj(od) * ab;

  StateVector out;
  out << dbb.real(), dcc.real(), dab.real(), dab.imag(), dca.real(), dca.imag(), dcb.real(),
      dcb.imag();
  return out;
}

inline SteadyState unpack(const StateVector& x) {
  SteadyState s;
  s.rho_bb = x[0];
  s.rho_cc = x[1];
  s.rho_aa = 1.0 - x[0] - x[1];
  s.rho_ab = {x[2], x[3]};
  s.rho_ca = {x[4], x[5]};
  s.rho_cb = {x[6], x[7]};
  return s;
}

}  // namespace detail

/// Steady state of the density-matrix equations for arbitrary probe
/// strength, from a dense solve of the affine system x' = M x + b = 0.
inline SteadyState steady_state(const AtomParams& atom, const FieldPoint& field) {
  using detail::StateMatrix;
  using detail::StateVector;

  // The right-hand side is affine in x; recover M and b column by column.
  StateVector b = detail::density_rhs(atom, field, StateVector::Zero());
  StateMatrix m;
  for (int k = 0; k < 8; ++k) {
    m.col(k) = detail::density_rhs(atom, field, StateVector::Unit(k)) - b;
  }

  // Row equilibration: rows mix rates spanning many decades.
  for (int r = 0; r < 8; ++r) {
    const double s = m.row(r).cwiseAbs().maxCoeff();
    if (s > 0.0) {
      m.row(r) /= s;
      b[r] /= s;
    }
  }

  const Eigen::FullPivLU<StateMatrix> lu(m);
  if (lu.rank() < 8) {
    throw DegenerateParameters("density-matrix steady state is not unique (degenerate rates)");
  }
  StateVector x = lu.solve(-b);
  // One step of iterative refinement.
  const StateVector r = -b - m * x;
  x += lu.solve(r);
  return detail::unpack(x);
}

/// Zero-probe steady state (populations and the drive coherence rho_ca).
inline SteadyState steady_state_populations(const AtomParams& atom, complex omega_d,
                                            double delta_one) {
  validate(atom);
  FieldPoint f;
  f.omega_d = omega_d;
  f.delta_one = delta_one;
  SteadyState s = steady_state(atom, f);
  s.rho_ab = {0.0, 0.0};
  s.rho_cb = {0.0, 0.0};
  return s;
}

/// Weak-probe propagation coefficient (m^-1)
///
///   chi = i eta [Gamma_cb (rho_aa - rho_bb) - (|Omega_d|^2 / Gamma_ca)(rho_aa - rho_cc)]
///         / (Gamma_ab Gamma_cb + |Omega_d|^2)
///
/// which is the first-order-in-Omega_p solution of the density-matrix
/// equations, with chi = -eta rho_ab / Omega_p. `ss` must be the zero-probe
/// steady state at the same drive and one-photon detuning.
inline ComplexChi susceptibility(const AtomParams& atom, const FieldPoint& field,
                                 const SteadyState& ss) {
  const GeneralizedRates rates(atom, field.delta_one, field.delta_two);
  const double od2 = std::norm(field.omega_d);
  const complex gab = rates.gamma_ab();
  const complex gca = rates.gamma_ca();
  const complex gcb = rates.gamma_cb();
  const complex num = gcb * (ss.rho_aa - ss.rho_bb) - od2 / gca * (ss.rho_aa - ss.rho_cc);
  const complex den = gab * gcb + od2;
  return {complex{0.0, atom.eta()} * num / den};
}

/// Coherence-free (Gamma_cb -> infinity) limit of susceptibility(): the
/// pumped two-level response i eta (rho_aa - rho_bb) / Gamma_ab.
inline ComplexChi background_susceptibility(const AtomParams& atom, const FieldPoint& field,
                                            const SteadyState& ss) {
  const GeneralizedRates rates(atom, field.delta_one, field.delta_two);
  return {complex{0.0, atom.eta()} * (ss.rho_aa - ss.rho_bb) / rates.gamma_ab()};
}

/// Rabi frequency of a uniform (top-hat) beam of the given power and
/// diameter acting on a transition with the given dipole moment.
inline double rabi_from_power(double power, double beam_diameter, double dipole_moment) {
  if (!(power >= 0.0) || !(beam_diameter > 0.0) || !(dipole_moment > 0.0)) {
    throw InvalidArgument("rabi_from_power: power >= 0, diameter > 0, dipole > 0 required");
  }
  const double radius = 0.5 * beam_diameter;
  const double intensity = power / (constants::pi * radius * radius);
  const double field = std::sqrt(2.0 * intensity /
                                 (constants::vacuum_permittivity * constants::speed_of_light));
  return dipole_moment * field / constants::hbar;
}

}  // namespace eitsim
