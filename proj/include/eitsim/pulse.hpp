#pragma once

// Pulse propagation through the cell in the frequency domain, and the two
// group-delay estimators (phase slope of H at the carrier, and the shift of
// the output intensity centroid).
//
// Frequency convention: the rates use the e^{-i omega t} convention, in
// which a spectral component whose optical frequency is higher by omega has
// two-photon detuning delta = carrier_delta - omega. Group delay is
// d(arg H)/d(omega) = -d(arg H)/d(delta).

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "eitsim/doppler.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/propagation.hpp"

namespace eitsim {

struct PulseSpec {
  double center_time = 0.0;    // s
  double rms_width = 0.0;      // s, rms width of |E|^2
  double carrier_delta = 0.0;  // rad/s
  std::size_t n_samples = 4096;
  double time_span = 0.0;  // s
};

inline void validate(const PulseSpec& spec) {
  if (!(spec.rms_width > 0.0)) throw InvalidArgument("pulse rms_width must be positive");
  if (!(spec.time_span >= 10.0 * spec.rms_width)) {
    throw InvalidArgument("pulse time_span must be at least 10 rms widths");
  }
  const std::size_t n = spec.n_samples;
  if (n < 256 || (n & (n - 1)) != 0) {
    throw InvalidArgument("pulse samples must be a power of two >= 256");
  }
}

/// Uniform two-photon detuning window [lo, hi] with `points` samples.
struct DeltaWindow {
  double lo = 0.0;  // rad/s
  double hi = 0.0;  // rad/s
  std::size_t points = 257;

  double step() const { return (hi - lo) / static_cast<double>(points - 1); }
};

inline void validate(const DeltaWindow& w) {
  if (!(w.hi > w.lo)) throw InvalidArgument("transfer window must have hi > lo");
  if (w.points < 64) throw InvalidArgument("transfer window needs at least 64 points");
}

struct TransferFunction {
  std::vector<double> delta;  // rad/s, uniform
  std::vector<complex> h;
};

template <class H>
TransferFunction sample_transfer(H&& h, const DeltaWindow& window) {
  validate(window);
  TransferFunction tf;
  tf.delta.resize(window.points);
  tf.h.resize(window.points);
  const double step = window.step();
  for (std::size_t j = 0; j < window.points; ++j) {
    tf.delta[j] = j + 1 == window.points ? window.hi : window.lo + step * static_cast<double>(j);
    tf.h[j] = h(tf.delta[j]);
  }
  return tf;
}

/// H(delta) = Omega_p(L) / Omega_p(0) on a uniform window.
inline TransferFunction transfer_function(const CellConfig& cell, const VelocityGrid& grid,
                                          const DeltaWindow& window) {
  validate(cell);
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  return sample_transfer(
      [&](double d) { return propagate_uniform(avg.chi(d).value, cell.length); }, window);
}

/// Phase-slope group delay d(arg H)/d(omega) at the carrier, from a 5-point
/// central difference of the unwrapped phase (linearly interpolated between
/// samples when the carrier falls between them). Throws
/// PhaseResolutionError if neighbouring samples differ in phase by more
/// than pi/2.
inline double group_delay(const TransferFunction& tf, double carrier_delta) {
  const std::size_t n = tf.delta.size();
  if (n < 5 || tf.h.size() != n) throw InvalidArgument("group_delay: need at least 5 samples");
  const double step = (tf.delta.back() - tf.delta.front()) / static_cast<double>(n - 1);
  const double pos = (carrier_delta - tf.delta.front()) / step;
  const double base = std::floor(pos);
  const double frac = pos - base;
  const long i = static_cast<long>(base);
  const long last = frac > 1e-9 ? i + 1 : i;
  if (i < 2 || last + 2 > static_cast<long>(n) - 1) {
    throw InvalidArgument("group_delay: carrier must lie at least 2 samples inside the window");
  }

  std::vector<double> phase(n);
  phase[0] = std::arg(tf.h[0]);
  for (std::size_t j = 1; j < n; ++j) {
    const double d = std::arg(tf.h[j] * std::conj(tf.h[j - 1]));
    if (std::abs(d) > constants::pi / 2.0) {
      throw PhaseResolutionError("phase step of " + std::to_string(d) +
                                 " rad between transfer samples; sample the window more densely");
    }
    phase[j] = phase[j - 1] + d;
  }

  const auto slope = [&](long k) {
    return (phase[k - 2] - 8.0 * phase[k - 1] + 8.0 * phase[k + 1] - phase[k + 2]) /
           (12.0 * step);
  };
  double dphi = slope(i);
  if (last != i) dphi = (1.0 - frac) * dphi + frac * slope(last);
  return 0.0 - dphi;  // +0 rather than -0 for a flat phase
}

struct DelayResult {
  double group_delay_phase = 0.0;     // s
  double group_delay_centroid = 0.0;  // s
  double group_velocity = 0.0;        // m/s, +inf when the phase delay is zero
  std::vector<double> time;           // s
  std::vector<complex> input;
  std::vector<complex> output;
};

namespace detail {

// First moment of |E|^2 over the samples above 1e-6 of the peak.
inline double centroid(const std::vector<double>& t, const std::vector<complex>& e) {
  double peak = 0.0;
  for (const complex& v : e) peak = std::max(peak, std::norm(v));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double p = std::norm(e[j]);
    if (p > 1e-6 * peak) {
      num += t[j] * p;
      den += p;
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace detail

/// Propagates a Gaussian envelope exp(-(t - t_c)^2 / (4 sigma^2)) through the
/// transfer function `h` (callable rad/s -> complex), evaluated at the exact
/// detuning of every FFT bin. The phase-slope estimate uses `h` sampled on
/// `window`, which must leave a margin of at least 4/sigma (four pulse
/// bandwidths) on both sides of the carrier; otherwise BandwidthOverflow.
template <class H>
DelayResult propagate_pulse(const PulseSpec& spec, const DeltaWindow& window, double length,
                            H&& h) {
  validate(spec);
  validate(window);
  const double bandwidth = 1.0 / spec.rms_width;
  const double margin = std::min(spec.carrier_delta - window.lo, window.hi - spec.carrier_delta);
  if (margin < 4.0 * bandwidth) {
    throw BandwidthOverflow("pulse bandwidth " + std::to_string(bandwidth) +
                            " rad/s needs a margin of " + std::to_string(4.0 * bandwidth) +
                            " rad/s around the carrier; transfer window leaves " +
                            std::to_string(margin) + " rad/s");
  }

  const std::size_t n = spec.n_samples;
  const double dt = spec.time_span / static_cast<double>(n);
  const double t0 = spec.center_time - 0.5 * spec.time_span;
  DelayResult out;
  out.time.resize(n);
  out.input.resize(n);
  const double s2 = 4.0 * spec.rms_width * spec.rms_width;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = t0 + dt * static_cast<double>(j);
    out.time[j] = t;
    const double x = t - spec.center_time;
    out.input[j] = complex{std::exp(-(x * x) / s2), 0.0};
  }

  // Eigen's forward transform uses e^{-i w t}; bin k then carries the
  // component e^{+i w_k t}, i.e. delta = carrier + w_k.
  std::vector<complex> h_bins(n);
  bool identity = true;
  const double dw = constants::two_pi / (dt * static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - n;
    h_bins[k] = h(spec.carrier_delta + kk * dw);
    identity = identity && h_bins[k] == complex{1.0, 0.0};
  }
  if (identity) {
    out.output = out.input;
  } else {
    Eigen::FFT<double> fft;
    std::vector<complex> spectrum;
    fft.fwd(spectrum, out.input);
    for (std::size_t k = 0; k < n; ++k) spectrum[k] *= h_bins[k];
    fft.inv(out.output, spectrum);
  }

  out.group_delay_centroid =
      detail::centroid(out.time, out.output) - detail::centroid(out.time, out.input);
  out.group_delay_phase = group_delay(sample_transfer(h, window), spec.carrier_delta);
  out.group_velocity = out.group_delay_phase == 0.0
                           ? std::numeric_limits<double>::infinity()
                           : length / out.group_delay_phase;
  return out;
}

inline DelayResult propagate_pulse(const CellConfig& cell, const VelocityGrid& grid,
                                   const PulseSpec& spec, const DeltaWindow& window) {
  validate(cell);
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  return propagate_pulse(spec, window, cell.length, [&](double d) {
    return propagate_uniform(avg.chi(d).value, cell.length);
  });
}

}  // namespace eitsim
