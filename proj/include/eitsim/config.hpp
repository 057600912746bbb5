#pragma once

// Run configuration: built-in presets, INI parsing with unit suffixes, and
// the round-trippable echo written to run manifests.
//
// Dimensioned values need a unit. Frequencies in Hz/kHz/MHz/GHz are
// omega/2pi values and are converted to rad/s; "rad/s" is taken as is.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eitsim/doppler.hpp"
#include "eitsim/errors.hpp"
#include "eitsim/lambda_system.hpp"
#include "eitsim/propagation.hpp"
#include "eitsim/units.hpp"

namespace eitsim {

enum class DriveKind { omega, ratio, power };

struct DriveSettings {
  DriveKind kind = DriveKind::omega;
  double value = 0.0;  // rad/s, dimensionless Omega_d^2/(gamma gamma_bc), or W
  double beam_diameter = 7e-3;
  double dipole_moment = rb87::d1_dipole_moment;

  double omega_d(const AtomParams& atom) const {
    switch (kind) {
      case DriveKind::ratio: return std::sqrt(value * atom.gamma() * atom.gamma_bc);
      case DriveKind::power: return rabi_from_power(value, beam_diameter, dipole_moment);
      case DriveKind::omega: break;
    }
    return value;
  }
};

struct ScanSettings {
  double span = 0.0;  // half-width of the two-photon scan, rad/s
  std::size_t points = 401;

  std::vector<double> points_list() const {
    std::vector<double> d(points);
    for (std::size_t j = 0; j < points; ++j) {
      d[j] = -span + 2.0 * span * static_cast<double>(j) / static_cast<double>(points - 1);
    }
    return d;
  }
};

struct DopplerSettings {
  std::size_t nodes = 0;  // 0 selects resolved_node_count()
  double span = 5.0;
};

/// Unset optional fields are derived from the fitted resonance at run time.
struct PulseSettings {
  std::optional<double> rms_width;      // s; default 10 / gamma_fit
  double center_time = 0.0;             // s
  std::optional<double> carrier_delta;  // rad/s; default fitted delta0
  std::size_t samples = 4096;
  std::optional<double> time_span;  // s; default 20 rms widths
  std::optional<double> window;     // half-width, rad/s; default 5 gamma_fit
  std::size_t window_points = 257;
};

struct RunConfig {
  std::string preset;  // empty for fully explicit configurations
  AtomParams atom;
  DriveSettings drive;
  double length = 0.0;  // m
  std::vector<double> delta_one;
  ScanSettings scan;
  DopplerSettings doppler;
  bool has_pulse = false;
  PulseSettings pulse;
  std::string output_directory = ".";

  double omega_d() const { return drive.omega_d(atom); }

  std::size_t doppler_nodes() const {
    return doppler.nodes > 0 ? doppler.nodes : resolved_node_count(atom, doppler.span);
  }

  VelocityGrid grid() const { return build_grid(atom, doppler_nodes(), doppler.span); }

  CellConfig cell(double delta) const {
    CellConfig c;
    c.length = length;
    c.label = preset;
    c.atom = atom;
    c.omega_d = omega_d();
    c.scan = scan.points_list();
    c.delta_one = delta;
    return c;
  }
};

namespace detail {

inline RunConfig vacuum_preset(const std::string& name) {
  RunConfig c;
  c.preset = name;
  c.atom.gamma_r = angular(rb87::d1_natural_width_hz / 2.0);
  c.atom.gamma_p = 0.0;
  c.atom.gamma_bc = angular(10e3);
  c.atom.wavelength = rb87::d1_wavelength;
  c.atom.density = 4.2e11 * 1e6;
  c.atom.mass = rb87::mass;
  c.atom.temperature = 66.4 + constants::celsius_zero;
  c.drive.kind = DriveKind::power;
  c.drive.value = 630e-6;
  c.length = 4.7e-2;
  for (double g : {0.0, 0.5, 1.0, 1.5, 2.0}) c.delta_one.push_back(angular(g * 1e9));
  c.scan.span = angular(500e3);
  return c;
}

inline RunConfig buffer_preset(const std::string& name) {
  RunConfig c = vacuum_preset(name);
  c.atom.gamma_p = angular(120e6);
  c.atom.gamma_bc = angular(1e3);
  c.atom.density = 4.7e11 * 1e6;
  c.atom.temperature = 67.7 + constants::celsius_zero;
  c.drive.value = 400e-6;
  c.length = 2.5e-2;
  c.scan.span = angular(100e3);
  return c;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"fig3a", "fig3b", "fig4", "fig5a", "fig5b"};
}

/// Built-in presets (Rb-87 D1). fig3a/fig5a: vacuum cell; fig3b/fig5b:
/// buffer-gas cell; fig4: buffer-gas cell at Delta/2pi = 2 GHz with a pulse.
inline RunConfig preset(const std::string& name) {
  if (name == "fig3a" || name == "fig5a") return detail::vacuum_preset(name);
  if (name == "fig3b" || name == "fig5b") return detail::buffer_preset(name);
  if (name == "fig4") {
    RunConfig c = detail::buffer_preset(name);
    c.delta_one = {angular(2e9)};
    c.has_pulse = true;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

namespace detail {

enum class Quantity { rate, length, density, temperature, power, time, mass, dipole, number };

struct Unit {
  std::string_view name;
  double factor;
  double offset;
};

inline const std::vector<Unit>& units_for(Quantity q) {
  static const std::map<Quantity, std::vector<Unit>> table = {
      {Quantity::rate,
       {{"Hz", constants::two_pi, 0.0},
        {"kHz", constants::two_pi * 1e3, 0.0},
        {"MHz", constants::two_pi * 1e6, 0.0},
        {"GHz", constants::two_pi * 1e9, 0.0},
        {"rad/s", 1.0, 0.0}}},
      {Quantity::length,
       {{"m", 1.0, 0.0}, {"cm", 1e-2, 0.0}, {"mm", 1e-3, 0.0}, {"um", 1e-6, 0.0},
        {"nm", 1e-9, 0.0}}},
      {Quantity::density, {{"m^-3", 1.0, 0.0}, {"cm^-3", 1e6, 0.0}}},
      {Quantity::temperature, {{"K", 1.0, 0.0}, {"C", 1.0, constants::celsius_zero}}},
      {Quantity::power, {{"W", 1.0, 0.0}, {"mW", 1e-3, 0.0}, {"uW", 1e-6, 0.0}}},
      {Quantity::time, {{"s", 1.0, 0.0}, {"ms", 1e-3, 0.0}, {"us", 1e-6, 0.0}, {"ns", 1e-9, 0.0}}},
      {Quantity::mass, {{"kg", 1.0, 0.0}, {"u", constants::atomic_mass_unit, 0.0}}},
      {Quantity::dipole, {{"C*m", 1.0, 0.0}, {"Cm", 1.0, 0.0}}},
      {Quantity::number, {}},
  };
  return table.at(q);
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits "<number> <unit>"; the unit may be empty.
inline double split_number(std::string_view text, std::string_view& unit,
                           const std::string& where) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) {
    throw ConfigError(where + ": expected a number, got '" + std::string(text) + "'");
  }
  unit = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  return value;
}

inline double apply_unit(double value, std::string_view unit, Quantity q,
                         const std::string& where) {
  const auto& units = units_for(q);
  if (q == Quantity::number) {
    if (!unit.empty()) {
      throw ConfigError(where + ": value is dimensionless, unexpected unit '" +
                        std::string(unit) + "'");
    }
    return value;
  }
  for (const Unit& u : units) {
    if (u.name == unit) return value * u.factor + u.offset;
  }
  std::string allowed;
  for (const Unit& u : units) allowed += (allowed.empty() ? "" : ", ") + std::string(u.name);
  if (unit.empty()) throw ConfigError(where + ": missing unit (one of " + allowed + ")");
  throw ConfigError(where + ": unknown unit '" + std::string(unit) + "' (expected one of " +
                    allowed + ")");
}

inline double parse_quantity(std::string_view text, Quantity q, const std::string& where) {
  std::string_view unit;
  const double v = split_number(text, unit, where);
  return apply_unit(v, unit, q, where);
}

// "a, b, c unit": a unit on the last entry applies to every entry without
// one. An empty value is an empty list.
inline std::vector<double> parse_list(std::string_view text, Quantity q,
                                      const std::string& where) {
  std::vector<double> values;
  std::vector<std::string_view> units;
  text = trim(text);
  if (text.empty()) return values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item =
        text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    std::string_view unit;
    values.push_back(split_number(item, unit, where));
    units.push_back(unit);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  const std::string_view common = units.back();
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = apply_unit(values[j], units[j].empty() ? common : units[j], q, where);
  }
  return values;
}

inline std::size_t parse_count(std::string_view text, const std::string& where) {
  text = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(where + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

inline bool is_auto(std::string_view text) { return trim(text) == "auto"; }

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

inline Setter quantity(Quantity q, double RunConfig::*member) {
  return [q, member](RunConfig& c, const std::string& v, const std::string& where) {
    c.*member = parse_quantity(v, q, where);
  };
}

inline Setter atom_quantity(Quantity q, double AtomParams::*member) {
  return [q, member](RunConfig& c, const std::string& v, const std::string& where) {
    c.atom.*member = parse_quantity(v, q, where);
  };
}

inline Setter drive(DriveKind kind, Quantity q) {
  return [kind, q](RunConfig& c, const std::string& v, const std::string& where) {
    c.drive.kind = kind;
    c.drive.value = parse_quantity(v, q, where);
  };
}

inline Setter optional_quantity(Quantity q, std::optional<double> PulseSettings::*member) {
  return [q, member](RunConfig& c, const std::string& v, const std::string& where) {
    if (is_auto(v)) {
      c.pulse.*member = std::nullopt;
    } else {
      c.pulse.*member = parse_quantity(v, q, where);
    }
  };
}

inline const std::map<std::string, std::map<std::string, Setter>>& schema() {
  using Q = Quantity;
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"atom",
       {{"gamma_r", atom_quantity(Q::rate, &AtomParams::gamma_r)},
        {"gamma_p", atom_quantity(Q::rate, &AtomParams::gamma_p)},
        {"gamma_bc", atom_quantity(Q::rate, &AtomParams::gamma_bc)},
        {"wavelength", atom_quantity(Q::length, &AtomParams::wavelength)},
        {"density", atom_quantity(Q::density, &AtomParams::density)},
        {"mass", atom_quantity(Q::mass, &AtomParams::mass)},
        {"temperature", atom_quantity(Q::temperature, &AtomParams::temperature)}}},
      {"drive",
       {{"omega_d", drive(DriveKind::omega, Q::rate)},
        {"ratio", drive(DriveKind::ratio, Q::number)},
        {"power", drive(DriveKind::power, Q::power)},
        {"beam_diameter",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.drive.beam_diameter = parse_quantity(v, Q::length, w);
         }},
        {"dipole_moment",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.drive.dipole_moment = parse_quantity(v, Q::dipole, w);
         }}}},
      {"cell",
       {{"length", quantity(Q::length, &RunConfig::length)},
        {"delta_one",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.delta_one = parse_list(v, Q::rate, w);
         }}}},
      {"scan",
       {{"span",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.scan.span = parse_quantity(v, Q::rate, w);
         }},
        {"points",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.scan.points = parse_count(v, w);
         }}}},
      {"doppler",
       {{"nodes",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.doppler.nodes = is_auto(v) ? 0 : parse_count(v, w);
         }},
        {"span",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.doppler.span = parse_quantity(v, Q::number, w);
         }}}},
      {"pulse",
       {{"rms_width", optional_quantity(Q::time, &PulseSettings::rms_width)},
        {"center_time",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.pulse.center_time = parse_quantity(v, Q::time, w);
         }},
        {"carrier_delta", optional_quantity(Q::rate, &PulseSettings::carrier_delta)},
        {"samples",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.pulse.samples = parse_count(v, w);
         }},
        {"time_span", optional_quantity(Q::time, &PulseSettings::time_span)},
        {"window", optional_quantity(Q::rate, &PulseSettings::window)},
        {"window_points",
         [](RunConfig& c, const std::string& v, const std::string& w) {
           c.pulse.window_points = parse_count(v, w);
         }}}},
      {"output",
       {{"directory",
         [](RunConfig& c, const std::string& v, const std::string&) {
           c.output_directory = std::string(trim(v));
         }}}},
  };
  return table;
}

inline void validate_config(const RunConfig& c) {
  try {
    validate(c.atom);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[atom] ") + e.what());
  }
  if (!(c.length > 0.0)) throw ConfigError("[cell] length must be positive");
  if (!(c.scan.span > 0.0)) throw ConfigError("[scan] span must be positive");
  if (c.scan.points < 20) throw ConfigError("[scan] points must be at least 20");
  if (c.doppler.nodes != 0 && c.doppler.nodes < 8) {
    throw ConfigError("[doppler] nodes must be auto or at least 8");
  }
  if (!(c.doppler.span >= 3.0)) throw ConfigError("[doppler] span must be at least 3");
  if (!(c.drive.value >= 0.0)) throw ConfigError("[drive] value must be non-negative");
  if (c.drive.kind == DriveKind::power &&
      (!(c.drive.beam_diameter > 0.0) || !(c.drive.dipole_moment > 0.0))) {
    throw ConfigError("[drive] beam_diameter and dipole_moment must be positive");
  }
}

}  // namespace detail

/// Parses an INI configuration. A top-level `preset = name` starts from that
/// preset; any other key overrides it (reported on `log`). Without a preset
/// the atom, drive, cell and scan blocks must be complete.
inline RunConfig parse_config(std::istream& in, std::ostream* log = nullptr) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), e.line());
  }

  std::string preset_name;
  std::vector<std::pair<std::string, const pt::ptree*>> sections;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key != "preset") throw ConfigError("unknown key '" + key + "' (top level)");
      preset_name = std::string(detail::trim(node.data()));
    } else {
      if (!detail::schema().count(key)) throw ConfigError("unknown section [" + key + "]");
      sections.emplace_back(key, &node);
    }
  }

  RunConfig config = preset_name.empty() ? RunConfig{} : preset(preset_name);
  std::set<std::string> given;
  bool drive_given = false;
  for (const auto& [section, node] : sections) {
    const auto& keys = detail::schema().at(section);
    if (section == "pulse") config.has_pulse = true;
    for (const auto& [key, value] : *node) {
      const auto it = keys.find(key);
      if (it == keys.end()) {
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      }
      const bool is_drive = section == "drive" &&
                            (key == "omega_d" || key == "ratio" || key == "power");
      if (is_drive) {
        if (drive_given) {
          throw ConfigError("[drive]: give only one of omega_d, ratio, power");
        }
        drive_given = true;
      }
      const std::string where = "[" + section + "] " + key;
      it->second(config, value.data(), where);
      given.insert(section + "." + key);
      if (!preset_name.empty() && log) {
        *log << "config: " << where << " = " << value.data() << " overrides preset "
             << preset_name << "\n";
      }
    }
  }

  if (preset_name.empty()) {
    for (const char* key : {"atom.gamma_r", "atom.gamma_p", "atom.gamma_bc", "atom.wavelength",
                            "atom.density", "atom.mass", "atom.temperature", "cell.length",
                            "cell.delta_one", "scan.span"}) {
      if (!given.count(key)) {
        const std::string k(key);
        const auto dot = k.find('.');
        throw ConfigError("missing [" + k.substr(0, dot) + "] " + k.substr(dot + 1) +
                          " (no preset given)");
      }
    }
    if (!drive_given) throw ConfigError("missing [drive] omega_d, ratio or power (no preset given)");
  }
  detail::validate_config(config);
  return config;
}

inline RunConfig parse_config(const std::string& text, std::ostream* log = nullptr) {
  std::istringstream in(text);
  return parse_config(in, log);
}

inline RunConfig load_config(const std::string& path, std::ostream* log = nullptr) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, log);
}

/// Shortest decimal text that round-trips the double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Fully explicit INI text for `c` in rad/s and SI units; parsing it gives
/// back the same values bit for bit. The drive is written as the resolved
/// omega_d and the Doppler node count as the resolved number.
inline std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  const auto line = [&o](const char* key, double v, const char* unit) {
    o << key << " = " << format_double(v) << (unit[0] ? " " : "") << unit << "\n";
  };
  o << "[atom]\n";
  line("gamma_r", c.atom.gamma_r, "rad/s");
  line("gamma_p", c.atom.gamma_p, "rad/s");
  line("gamma_bc", c.atom.gamma_bc, "rad/s");
  line("wavelength", c.atom.wavelength, "m");
  line("density", c.atom.density, "m^-3");
  line("mass", c.atom.mass, "kg");
  line("temperature", c.atom.temperature, "K");
  o << "\n[drive]\n";
  line("omega_d", c.omega_d(), "rad/s");
  o << "\n[cell]\n";
  line("length", c.length, "m");
  o << "delta_one = ";
  for (std::size_t j = 0; j < c.delta_one.size(); ++j) {
    o << (j ? ", " : "") << format_double(c.delta_one[j]);
  }
  o << (c.delta_one.empty() ? "" : " rad/s") << "\n";
  o << "\n[scan]\n";
  line("span", c.scan.span, "rad/s");
  o << "points = " << c.scan.points << "\n";
  o << "\n[doppler]\n";
  o << "nodes = " << c.doppler_nodes() << "\n";
  line("span", c.doppler.span, "");
  if (c.has_pulse) {
    const auto opt = [&](const char* key, const std::optional<double>& v, const char* unit) {
      if (v) {
        line(key, *v, unit);
      } else {
        o << key << " = auto\n";
      }
    };
    o << "\n[pulse]\n";
    opt("rms_width", c.pulse.rms_width, "s");
    line("center_time", c.pulse.center_time, "s");
    opt("carrier_delta", c.pulse.carrier_delta, "rad/s");
    o << "samples = " << c.pulse.samples << "\n";
    opt("time_span", c.pulse.time_span, "s");
    opt("window", c.pulse.window, "rad/s");
    o << "window_points = " << c.pulse.window_points << "\n";
  }
  o << "\n[output]\ndirectory = " << c.output_directory << "\n";
  return o.str();
}

}  // namespace eitsim
