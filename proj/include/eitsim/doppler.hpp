#pragma once

// Averaging over the 1-D Maxwellian velocity distribution
// W(v) = exp(-v^2/u^2) / (u sqrt(pi)). A moving atom sees the one-photon
// detuning shifted to Delta + k v; the two-photon detuning is unshifted.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eitsim/errors.hpp"
#include "eitsim/lambda_system.hpp"

namespace eitsim {

struct VelocityGrid {
  std::vector<double> nodes;    // m/s, ascending
  std::vector<double> weights;  // Maxwellian embedded, sum to 1
  double most_probable_speed = 0.0;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {
using GaussRule = boost::math::quadrature::gauss<double, 16>;
constexpr std::size_t nodes_per_panel = 16;
}  // namespace detail

/// Composite 16-point Gauss-Legendre rule on [-span u, span u] with the
/// normalized Maxwellian folded into the weights. The node count is rounded
/// up to a whole, even number of panels; the negative half of the grid is
/// the exact mirror image of the positive half.
inline VelocityGrid build_grid(const AtomParams& atom, std::size_t n_nodes, double span) {
  validate(atom);
  if (n_nodes < 8) throw InvalidArgument("build_grid: need at least 8 nodes");
  if (!(span >= 3.0)) throw InvalidArgument("build_grid: span must be at least 3 u");

  const double u = atom.most_probable_speed();
  std::size_t panels = (n_nodes + detail::nodes_per_panel - 1) / detail::nodes_per_panel;
  panels = std::max<std::size_t>(2, panels + panels % 2);
  const std::size_t half_panels = panels / 2;
  const double width = span * u / static_cast<double>(half_panels);

  const auto& x = detail::GaussRule::abscissa();  // non-negative half, ascending
  const auto& w = detail::GaussRule::weights();

  // Positive half, ascending.
  std::vector<double> pos_nodes;
  std::vector<double> pos_weights;
  pos_nodes.reserve(half_panels * detail::nodes_per_panel);
  pos_weights.reserve(half_panels * detail::nodes_per_panel);
  const double norm = 1.0 / (u * std::sqrt(constants::pi));
  for (std::size_t p = 0; p < half_panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * width;
    const double half = 0.5 * width;
    const auto push = [&](double v, double gw) {
      pos_nodes.push_back(v);
      pos_weights.push_back(gw * half * norm * std::exp(-(v * v) / (u * u)));
    };
    for (std::size_t j = x.size(); j-- > 0;) push(mid - half * x[j], w[j]);
    for (std::size_t j = 0; j < x.size(); ++j) push(mid + half * x[j], w[j]);
  }

  VelocityGrid grid;
  grid.most_probable_speed = u;
  const std::size_t m = pos_nodes.size();
  grid.nodes.resize(2 * m);
  grid.weights.resize(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    grid.nodes[m + j] = pos_nodes[j];
    grid.weights[m + j] = pos_weights[j];
    grid.nodes[m - 1 - j] = -pos_nodes[j];
    grid.weights[m - 1 - j] = pos_weights[j];
  }

  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) total += pos_weights[j];
  total *= 2.0;
  for (double& wt : grid.weights) wt /= total;
  return grid;
}

/// Node count whose panels are no wider than two homogeneous half-widths
/// (2 gamma / k), so the Lorentzian structure of chi(Delta + k v) is
/// resolved. Never fewer than 64.
inline std::size_t resolved_node_count(const AtomParams& atom, double span) {
  validate(atom);
  const double u = atom.most_probable_speed();
  const double panel = 2.0 * atom.gamma() / atom.wavenumber();
  std::size_t panels = 2;
  if (panel > 0.0) {
    panels = static_cast<std::size_t>(std::ceil(2.0 * span * u / panel));
    panels = std::max<std::size_t>(2, panels + panels % 2);
  }
  return std::max<std::size_t>(64, panels * detail::nodes_per_panel);
}

/// Weighted sum over the grid of an arbitrary function of velocity. The
/// reduction runs in node order.
template <class F>
auto average(const VelocityGrid& grid, F&& f) -> decltype(f(0.0) * 1.0) {
  using R = decltype(f(0.0) * 1.0);
  R sum{};
  for (std::size_t j = 0; j < grid.size(); ++j) sum += f(grid.nodes[j]) * grid.weights[j];
  return sum;
}

/// Doppler-averaged weak-probe susceptibility for a fixed atom, drive and
/// one-photon detuning. The zero-probe steady state of every velocity class
/// is solved once; chi() and background() then cost one pass over the grid.
class DopplerAverager {
 public:
  DopplerAverager(const AtomParams& atom, complex omega_d, double delta_one,
                  const VelocityGrid& grid)
      : atom_(atom), omega_d_(omega_d), weights_(grid.weights) {
    validate(atom);
    const double k = atom.wavenumber();
    shifted_.reserve(grid.size());
    states_.reserve(grid.size());
    for (double v : grid.nodes) {
      const double d = delta_one + k * v;
      shifted_.push_back(d);
      states_.push_back(steady_state_populations(atom, omega_d, d));
    }
  }

  ComplexChi chi(double delta_two) const {
    complex sum{};
    for (std::size_t j = 0; j < states_.size(); ++j) {
      sum += susceptibility(atom_, field(j, delta_two), states_[j]).value * weights_[j];
    }
    return {sum};
  }

  /// Same average with the ground-state coherence removed (Gamma_cb -> inf).
  ComplexChi background(double delta_two) const {
    complex sum{};
    for (std::size_t j = 0; j < states_.size(); ++j) {
      sum += background_susceptibility(atom_, field(j, delta_two), states_[j]).value *
             weights_[j];
    }
    return {sum};
  }

  const std::vector<SteadyState>& states() const { return states_; }
  const AtomParams& atom() const { return atom_; }

 private:
  FieldPoint field(std::size_t j, double delta_two) const {
    FieldPoint f;
    f.omega_d = omega_d_;
    f.delta_one = shifted_[j];
    f.delta_two = delta_two;
    return f;
  }

  AtomParams atom_;
  complex omega_d_;
  std::vector<double> weights_;
  std::vector<double> shifted_;
  std::vector<SteadyState> states_;
};

/// Sum_j w_j chi(Delta + k v_j) at the field's detunings (probe treated as
/// weak; field.omega_p is ignored).
inline ComplexChi averaged_chi(const AtomParams& atom, const FieldPoint& field,
                               const VelocityGrid& grid) {
  return DopplerAverager(atom, field.omega_d, field.delta_one, grid).chi(field.delta_two);
}

}  // namespace eitsim
