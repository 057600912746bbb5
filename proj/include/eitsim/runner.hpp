#pragma once

// Scan and pulse runs driven by a RunConfig, and the CSV/manifest writers
// used by the command-line tool.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "eitsim/config.hpp"
#include "eitsim/doppler.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/lineshape.hpp"
#include "eitsim/propagation.hpp"
#include "eitsim/pulse.hpp"

namespace eitsim {

#ifndef EITSIM_VERSION
#define EITSIM_VERSION "1.0.0"
#endif

inline constexpr const char* version = EITSIM_VERSION;

struct ScanResult {
  double delta_one = 0.0;
  TransmissionSpectrum spectrum;
  LineshapeFit fit;
  bool fitted = false;  // false only for a flat spectrum in a pulse run
};

struct PulseRun {
  ScanResult scan;
  PulseSpec spec;
  DeltaWindow window;
  DelayResult delay;
};

/// Throws InvariantViolation unless every velocity-class steady state has
/// unit trace (1e-12) and the spectrum is passive (T <= 1 + 1e-9).
inline void check_invariants(const DopplerAverager& avg, const TransmissionSpectrum& s) {
  for (const SteadyState& st : avg.states()) {
    if (std::abs(st.trace() - 1.0) > 1e-12) {
      throw InvariantViolation("steady-state trace deviates from 1 by " +
                               std::to_string(st.trace() - 1.0));
    }
  }
  for (std::size_t j = 0; j < s.transmission.size(); ++j) {
    const double t = s.transmission[j];
    if (!(t >= 0.0 && t <= 1.0 + 1e-9)) {
      throw InvariantViolation("transmission " + format_double(t) + " outside [0, 1] at delta = " +
                               format_double(s.delta[j]) + " rad/s");
    }
  }
}

inline ScanResult scan_one(const RunConfig& config, const VelocityGrid& grid, double delta_one,
                           bool allow_flat = false) {
  const CellConfig cell = config.cell(delta_one);
  validate(cell);
  const DopplerAverager avg(cell.atom, cell.omega_d, cell.delta_one, grid);
  ScanResult r;
  r.delta_one = delta_one;
  r.spectrum = detail::tabulate(cell, [&](double d) { return avg.chi(d).value; });
  check_invariants(avg, r.spectrum);
  try {
    r.fit = fit(r.spectrum);
    r.fitted = true;
  } catch (const DegenerateData&) {
    if (!allow_flat) throw;
  }
  return r;
}

/// One spectrum and lineshape fit per entry of config.delta_one.
inline std::vector<ScanResult> run_scan(const RunConfig& config) {
  if (config.delta_one.empty()) throw ConfigError("empty scan: [cell] delta_one has no values");
  const VelocityGrid grid = config.grid();
  std::vector<ScanResult> out;
  out.reserve(config.delta_one.size());
  for (double d : config.delta_one) out.push_back(scan_one(config, grid, d));
  return out;
}

/// Fills unset pulse parameters from a lineshape fit: rms width 10/gamma,
/// carrier at delta0, transfer window +-5 gamma, time span 20 rms widths.
inline void resolve_pulse(PulseSettings& p, const LineshapeFit& f) {
  if (!p.rms_width) p.rms_width = 10.0 / f.gamma_fit;
  if (!p.carrier_delta) p.carrier_delta = f.delta0;
  if (!p.window) p.window = 5.0 * f.gamma_fit;
  if (!p.time_span) p.time_span = 20.0 * *p.rms_width;
}

/// Scans and fits the single configured Delta, resolves the pulse
/// parameters, then propagates the pulse. `config.pulse` is updated with the
/// resolved values. A flat spectrum (e.g. an empty cell) cannot be fitted;
/// it is accepted when rms_width, carrier_delta and window are all given.
inline PulseRun run_pulse(RunConfig& config) {
  if (config.delta_one.empty()) throw ConfigError("empty scan: [cell] delta_one has no values");
  if (config.delta_one.size() != 1) {
    throw ConfigError("pulse runs need exactly one [cell] delta_one value");
  }
  const VelocityGrid grid = config.grid();
  PulseRun run;
  const PulseSettings& p = config.pulse;
  const bool explicit_pulse = p.rms_width && p.carrier_delta && p.window;
  run.scan = scan_one(config, grid, config.delta_one.front(), explicit_pulse);
  resolve_pulse(config.pulse, run.scan.fit);

  run.spec.center_time = config.pulse.center_time;
  run.spec.rms_width = *config.pulse.rms_width;
  run.spec.carrier_delta = *config.pulse.carrier_delta;
  run.spec.n_samples = config.pulse.samples;
  run.spec.time_span = *config.pulse.time_span;
  run.window.lo = run.spec.carrier_delta - *config.pulse.window;
  run.window.hi = run.spec.carrier_delta + *config.pulse.window;
  run.window.points = config.pulse.window_points;
  try {
    validate(run.spec);
    validate(run.window);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[pulse] ") + e.what());
  }

  const CellConfig cell = config.cell(config.delta_one.front());
  run.delay = propagate_pulse(cell, grid, run.spec, run.window);
  return run;
}

// ---------------------------------------------------------------- output

/// File tag for a one-photon detuning, e.g. "D1500MHz".
inline std::string delta_tag(double delta_one) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", hertz(delta_one) / 1e6);
  std::string s = buf;
  for (char& ch : s) {
    if (ch == '-') ch = 'm';
    if (ch == '.') ch = 'p';
  }
  return "D" + s + "MHz";
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

inline void write_spectrum_csv(const std::filesystem::path& path, const TransmissionSpectrum& s) {
  std::ofstream out = detail::open_output(path);
  out << "delta_hz,transmission,re_ratio,im_ratio\n";
  for (std::size_t j = 0; j < s.delta.size(); ++j) {
    out << format_double(hertz(s.delta[j])) << ',' << format_double(s.transmission[j]) << ','
        << format_double(s.amplitude_ratio[j].real()) << ','
        << format_double(s.amplitude_ratio[j].imag()) << '\n';
  }
}

inline void write_fit_csv(const std::filesystem::path& path, const LineshapeFit& f) {
  std::ofstream out = detail::open_output(path);
  out << "A,B,gamma_hz,delta0_hz,C,residual,class\n";
  out << format_double(f.A) << ',' << format_double(f.B) << ',' << format_double(hertz(f.gamma_fit))
      << ',' << format_double(hertz(f.delta0)) << ',' << format_double(f.C) << ','
      << format_double(f.residual_norm) << ',' << to_string(f.resonance) << '\n';
}

inline void write_waveform_csv(const std::filesystem::path& path, const std::vector<double>& t,
                               const std::vector<complex>& e) {
  std::ofstream out = detail::open_output(path);
  out << "time_s,abs_envelope,re,im\n";
  for (std::size_t j = 0; j < t.size(); ++j) {
    out << format_double(t[j]) << ',' << format_double(std::abs(e[j])) << ','
        << format_double(e[j].real()) << ',' << format_double(e[j].imag()) << '\n';
  }
}

/// Infinite group velocity (zero delay) is written as an empty field.
inline void write_delay_csv(const std::filesystem::path& path, const DelayResult& d) {
  std::ofstream out = detail::open_output(path);
  out << "group_delay_phase_s,group_delay_centroid_s,group_velocity_mps\n";
  out << format_double(d.group_delay_phase) << ',' << format_double(d.group_delay_centroid) << ','
      << (std::isfinite(d.group_velocity) ? format_double(d.group_velocity) : "") << '\n';
}

/// Manifest: comment header (version, wall time, extra lines) followed by
/// the resolved configuration, which can be fed back to the tool.
inline void write_manifest(const std::filesystem::path& path, const RunConfig& config,
                           double wall_time_s, const std::vector<std::string>& notes = {}) {
  std::ofstream out = detail::open_output(path);
  out << "# eitsim " << version << "\n";
  out << "# wall_time_s = " << format_double(wall_time_s) << "\n";
  if (!config.preset.empty()) out << "# preset = " << config.preset << "\n";
  for (const std::string& n : notes) out << "# " << n << "\n";
  out << format_config(config);
}

}  // namespace eitsim
