// simulate: probe transmission spectra and pulse delay for a Doppler-broadened
// Lambda system.
//
//   simulate scan  --config <path> [--out <dir>]
//   simulate pulse --config <path> [--out <dir>]
//   simulate presets
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include "eitsim/eitsim.hpp"

namespace fs = std::filesystem;
using namespace eitsim;

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path prepare_output(const RunConfig& config, const std::string& out_override) {
  fs::path dir = out_override.empty() ? fs::path(config.output_directory) : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

int cmd_scan(const std::string& config_path, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig config = load_config(config_path, &std::cerr);
  const fs::path dir = prepare_output(config, out);
  const std::vector<ScanResult> results = run_scan(config);
  for (const ScanResult& r : results) {
    const std::string tag = delta_tag(r.delta_one);
    write_spectrum_csv(dir / ("spectrum_" + tag + ".csv"), r.spectrum);
    write_fit_csv(dir / ("fit_" + tag + ".csv"), r.fit);
    if (!r.fit.converged) std::cerr << "warning: lineshape fit for " << tag << " did not converge\n";
    std::cerr << tag << ": " << to_string(r.fit.resonance) << " A = " << r.fit.A
              << " B = " << r.fit.B << " gamma = " << hertz(r.fit.gamma_fit) << " Hz\n";
  }
  write_manifest(dir / "manifest.txt", config, seconds_since(start),
                 {"omega_d_rad_s = " + format_double(config.omega_d()),
                  "doppler_nodes = " + std::to_string(config.doppler_nodes())});
  return 0;
}

int cmd_pulse(const std::string& config_path, const std::string& out) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig config = load_config(config_path, &std::cerr);
  const fs::path dir = prepare_output(config, out);
  const PulseRun run = run_pulse(config);
  config.has_pulse = true;
  write_waveform_csv(dir / "pulse_in.csv", run.delay.time, run.delay.input);
  write_waveform_csv(dir / "pulse_out.csv", run.delay.time, run.delay.output);
  write_delay_csv(dir / "delay.csv", run.delay);
  std::cerr << "group delay (phase) = " << run.delay.group_delay_phase
            << " s, (centroid) = " << run.delay.group_delay_centroid << " s\n";
  write_manifest(dir / "manifest.txt", config, seconds_since(start),
                 {"omega_d_rad_s = " + format_double(config.omega_d()),
                  "group_delay_phase_s = " + format_double(run.delay.group_delay_phase),
                  "group_delay_centroid_s = " + format_double(run.delay.group_delay_centroid),
                  "resonance = " +
                      (run.scan.fitted ? to_string(run.scan.fit.resonance) : "none (flat spectrum)")});
  return 0;
}

int cmd_presets() {
  for (const std::string& name : preset_names()) {
    RunConfig c = preset(name);
    std::cout << "# preset " << name << "\n" << format_config(c) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lambda-system EIT/EIA transmission and pulse-delay simulator"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  CLI::App* scan = app.add_subcommand("scan", "transmission spectra and lineshape fits");
  scan->add_option("--config", config_path, "configuration file")->required();
  scan->add_option("--out", out, "output directory (overrides [output] directory)");
  CLI::App* pulse = app.add_subcommand("pulse", "Gaussian pulse propagation and group delay");
  pulse->add_option("--config", config_path, "configuration file")->required();
  pulse->add_option("--out", out, "output directory (overrides [output] directory)");
  CLI::App* presets = app.add_subcommand("presets", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (scan->parsed()) return cmd_scan(config_path, out);
    if (pulse->parsed()) return cmd_pulse(config_path, out);
    if (presets->parsed()) return cmd_presets();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  return 0;
}
