#pragma once

// Direct time integration of the Lambda-system density matrix. The equations
// are assembled independently of steady_state(): the full 3x3 density matrix
// evolves as rho' = i[V, rho] + relaxation, with V the coupling matrix, and is
// propagated with exact exponential steps of growing size.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "eitsim/errors.hpp"
#include "eitsim/lambda_system.hpp"

namespace eitsim {

namespace detail {

using Liouvillian = Eigen::Matrix<complex, 9, 9>;
using DensityVector = Eigen::Matrix<complex, 9, 1>;

// Level order a, b, c; vec(rho) is row-major.
constexpr int level_a = 0;
constexpr int level_b = 1;
constexpr int level_c = 2;
constexpr int idx(int row, int col) { return 3 * row + col; }

inline Liouvillian build_liouvillian(const AtomParams& atom, const FieldPoint& field) {
  Eigen::Matrix3cd v = Eigen::Matrix3cd::Zero();
  v(level_a, level_b) = field.omega_p;
  v(level_a, level_c) = field.omega_d;
  v(level_b, level_a) = std::conj(field.omega_p);
  v(level_c, level_a) = std::conj(field.omega_d);

  const complex i{0.0, 1.0};
  Liouvillian l = Liouvillian::Zero();
  // i (V rho - rho V)
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k) {
        l(idx(r, c), idx(k, c)) += i * v(r, k);
        l(idx(r, c), idx(r, k)) -= i * v(k, c);
      }
    }
  }

  const GeneralizedRates rates(atom, field.delta_one, field.delta_two);
  const double gr = atom.gamma_r;
  const double gbc = atom.gamma_bc;
  const int aa = idx(level_a, level_a);
  const int bb = idx(level_b, level_b);
  const int cc = idx(level_c, level_c);
  l(aa, aa) -= 2.0 * gr;
  l(bb, aa) += gr;
  l(cc, aa) += gr;
  l(bb, bb) -= gbc;
  l(bb, cc) += gbc;
  l(cc, cc) -= gbc;
  l(cc, bb) += gbc;

  const auto relax = [&](int r, int c, complex rate) {
    l(idx(r, c), idx(r, c)) -= rate;
    l(idx(c, r), idx(c, r)) -= std::conj(rate);
  };
  relax(level_a, level_b, rates.gamma_ab());
  relax(level_a, level_c, rates.gamma_ac());
  relax(level_c, level_b, rates.gamma_cb());
  return l;
}

inline SteadyState to_steady_state(const DensityVector& rho) {
  SteadyState s;
  s.rho_aa = rho[idx(level_a, level_a)].real();
  s.rho_bb = rho[idx(level_b, level_b)].real();
  s.rho_cc = rho[idx(level_c, level_c)].real();
  s.rho_ab = rho[idx(level_a, level_b)];
  s.rho_ca = rho[idx(level_c, level_a)];
  s.rho_cb = rho[idx(level_c, level_b)];
  return s;
}

// Largest frequency scale in the problem, used to size the first step and
// to normalise the residual.
inline double max_rate(const AtomParams& atom, const FieldPoint& field) {
  return std::max({2.0 * atom.gamma_r, atom.gamma(), atom.gamma_bc, std::abs(field.omega_d),
                   std::abs(field.omega_p), std::abs(field.delta_one),
                   std::abs(field.delta_one + field.delta_two), std::abs(field.delta_two)});
}

}  // namespace detail

/// Initial condition and observer for evolve_to_steady_state().
struct EvolutionOptions {
  double initial_bb = 0.5;
  double initial_cc = 0.5;
  /// Residual |rho'|_max must drop below tolerance * (largest rate).
  double derivative_tolerance = 1e-10;
  /// Called after every accepted step with the elapsed time.
  std::function<void(double, const SteadyState&)> observer;
};

/// Integrates the density-matrix equations from the given ground-state
/// populations up to t_end and returns the final state. Steps start well
/// below the fastest time scale and double until they reach dt_max, so the
/// cost is logarithmic in t_end. Throws ConvergenceError if the state is
/// still moving at t_end.
inline SteadyState evolve_to_steady_state(const AtomParams& atom, const FieldPoint& field,
                                          double t_end, double dt_max,
                                          const EvolutionOptions& options = {}) {
  validate(atom);
  if (!(t_end > 0.0) || !(dt_max > 0.0)) {
    throw InvalidArgument("evolve_to_steady_state: t_end and dt_max must be positive");
  }
  using detail::DensityVector;
  using detail::Liouvillian;

  const Liouvillian l = detail::build_liouvillian(atom, field);
  const double scale = detail::max_rate(atom, field);

  DensityVector rho = DensityVector::Zero();
  rho[detail::idx(detail::level_b, detail::level_b)] = options.initial_bb;
  rho[detail::idx(detail::level_c, detail::level_c)] = options.initial_cc;
  rho[detail::idx(detail::level_a, detail::level_a)] =
      1.0 - options.initial_bb - options.initial_cc;

  // First step resolves the fastest scale; t_end = 2^levels * h0 so the
  // doubling sequence lands on t_end when dt_max does not intervene.
  double h = t_end;
  const double h_first = scale > 0.0 ? 0.25 / scale : t_end;
  while (h > h_first) h *= 0.5;
  h = std::min(h, dt_max);

  Liouvillian step = (l * complex(h)).exp();
  double t = 0.0;
  bool first = true;
  while (t < t_end) {
    if (t + h > t_end * (1.0 + 1e-14)) {
      h = t_end - t;
      step = (l * complex(h)).exp();
    }
    rho = step * rho;
    // Closure Tr rho = 1. Squaring the propagator doubles its rounding error
    // on the trace each time; renormalizing removes that drift.
    rho /= rho[detail::idx(detail::level_a, detail::level_a)] +
           rho[detail::idx(detail::level_b, detail::level_b)] +
           rho[detail::idx(detail::level_c, detail::level_c)];
    t += h;
    if (options.observer) options.observer(t, detail::to_steady_state(rho));
    if (first) {
      first = false;  // second step repeats h0 so the sum stays a power of two
      continue;
    }
    if (2.0 * h <= dt_max) {
      step = step * step;
      h *= 2.0;
    }
  }

  const DensityVector derivative = l * rho;
  const double residual = derivative.cwiseAbs().maxCoeff();
  if (scale > 0.0 && residual >= options.derivative_tolerance * scale) {
    throw ConvergenceError("density matrix still evolving at t_end (residual " +
                               std::to_string(residual) + " s^-1)",
                           residual);
  }
  return detail::to_steady_state(rho);
}

}  // namespace eitsim
