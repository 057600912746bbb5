#include <catch_amalgamated.hpp>

#include <random>

#include "eitsim/config.hpp"
#include "eitsim/propagation.hpp"
#include "support.hpp"

using namespace eitsim;
using Catch::Approx;

namespace {

CellConfig preset_cell(const std::string& name, double delta_one_ghz) {
  return preset(name).cell(angular(delta_one_ghz * 1e9));
}

VelocityGrid preset_grid(const std::string& name) { return preset(name).grid(); }

std::size_t argmax_deviation(const std::vector<double>& t, const std::vector<double>& bg) {
  std::size_t best = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (std::abs(t[j] - bg[j]) > std::abs(t[best] - bg[best])) best = j;
  }
  return best;
}

}  // namespace

TEST_CASE("empty cell transmits everything") {
  CellConfig cell = preset_cell("fig5b", 0.0);
  cell.atom.density = 0.0;
  const VelocityGrid g = build_grid(cell.atom, 64, 5.0);
  CHECK(propagate_cw(cell, 0.0, g) == complex(1.0, 0.0));
  const TransmissionSpectrum s = scan_spectrum(cell, g);
  for (double t : s.transmission) CHECK(t == 1.0);
}

TEST_CASE("two-level resonant absorption is pure attenuation") {
  const AtomParams a = testing_support::buffer_atom();
  const double length = 0.025;
  const complex chi(0.0, -a.eta() / a.gamma());
  const complex r = propagate_uniform(chi, length);
  CHECK(r.real() == Approx(std::exp(-a.eta() / a.gamma() * length)).epsilon(1e-14));
  CHECK(r.imag() == 0.0);
}

TEST_CASE("stepped propagation matches the closed form") {
  const CellConfig cell = preset_cell("fig5b", 1.5);
  const VelocityGrid g = preset_grid("fig5b");
  const complex closed = propagate_cw(cell, 0.0, g);
  const complex stepped = propagate_cw(cell, 0.0, g, PropagationMode::stepped, 10000);
  CHECK(std::abs(stepped - closed) / std::abs(closed) < 1e-10);
}

TEST_CASE("stepped propagation integrates a z-dependent coefficient") {
  const complex c(0.3, -2.0);  // chi(z) = c z / L^2, integral c/2 over the cell
  const double length = 0.05;
  const complex r = propagate_stepped([&](double z) { return c * z / (length * length); }, length, 2000);
  const complex expected = std::exp(complex(0.0, -1.0) * c * 0.5);
  CHECK(std::abs(r - expected) < 1e-12);
}

TEST_CASE("cell validation") {
  CellConfig cell = preset_cell("fig5b", 0.0);
  cell.length = 0.0;
  CHECK_THROWS_AS(validate(cell), InvalidArgument);
  cell = preset_cell("fig5b", 0.0);
  std::swap(cell.scan[0], cell.scan[1]);
  CHECK_THROWS_AS(validate(cell), InvalidArgument);
  cell = preset_cell("fig5b", 0.0);
  cell.scan.clear();
  CHECK_THROWS_AS(scan_spectrum(cell, build_grid(cell.atom, 64, 5.0)), InvalidArgument);
}

TEST_CASE("vacuum cell on resonance shows an EIT peak") {
  const CellConfig cell = preset_cell("fig5a", 0.0);
  const VelocityGrid g = preset_grid("fig5a");
  const TransmissionSpectrum s = scan_spectrum(cell, g);
  const std::size_t mid = s.delta.size() / 2;
  CHECK(s.delta[mid] == 0.0);
  const double centre = s.transmission[mid];
  CHECK(centre > s.transmission.front() + 0.3);
  CHECK(centre > s.transmission.back() + 0.3);
  // Peak within a few samples of delta = 0.
  const std::size_t peak =
      std::max_element(s.transmission.begin(), s.transmission.end()) - s.transmission.begin();
  CHECK(std::abs(static_cast<long>(peak) - static_cast<long>(mid)) <= 5);
}

TEST_CASE("buffer cell far detuned shows an absorption dip") {
  for (double d : {1.5, 2.0}) {
    const CellConfig cell = preset_cell("fig5b", d);
    const TransmissionSpectrum s = scan_spectrum(cell, preset_grid("fig5b"));
    const auto low = std::min_element(s.transmission.begin(), s.transmission.end());
    const std::size_t j = low - s.transmission.begin();
    INFO("Delta = " << d << " GHz");
    CHECK(j > 0);
    CHECK(j + 1 < s.transmission.size());
    CHECK(*low < s.transmission.front() - 0.1);
    CHECK(std::abs(s.delta[j]) < angular(20e3));
  }
}

TEST_CASE("wings approach the coherence-free background") {
  for (double d : {1.5, 2.0}) {
    const CellConfig cell = preset_cell("fig5b", d);
    const VelocityGrid g = preset_grid("fig5b");
    const TransmissionSpectrum s = scan_spectrum(cell, g);
    const TransmissionSpectrum bg = background_spectrum(cell, g);
    const std::size_t n = s.delta.size();
    const std::size_t tail = n / 10;
    INFO("Delta = " << d << " GHz");
    for (std::size_t j = 0; j < tail; ++j) {
      // Monotone approach toward the background on both ends.
      CHECK(std::abs(s.transmission[j] - bg.transmission[j]) <=
            std::abs(s.transmission[j + 1] - bg.transmission[j + 1]) + 1e-15);
      CHECK(std::abs(s.transmission[n - 1 - j] - bg.transmission[n - 1 - j]) <=
            std::abs(s.transmission[n - 2 - j] - bg.transmission[n - 2 - j]) + 1e-15);
    }
  }
}

TEST_CASE("far from every resonance the spectrum equals the coherence-free background") {
  // The resonance has a narrow part (fitted width, kHz) and a power-broadened
  // pedestal of width ~Omega_d^2/gamma (~100 kHz); "far" means MHz. Compared
  // on the absolute transmission scale: on resonance the vacuum cell is
  // optically thick and both values are ~1e-10.
  for (const char* name : {"fig5a", "fig5b"}) {
    for (double d : {0.0, 1.0, 2.0}) {
      CellConfig cell = preset_cell(name, d);
      cell.scan = {-angular(20e6), -angular(10e6), angular(10e6), angular(20e6)};
      const VelocityGrid g = preset_grid(name);
      const TransmissionSpectrum s = scan_spectrum(cell, g);
      const TransmissionSpectrum bg = background_spectrum(cell, g);
      INFO(name << " Delta = " << d << " GHz");
      for (std::size_t j = 0; j < s.delta.size(); ++j) {
        CHECK(std::abs(s.transmission[j] - bg.transmission[j]) < 0.01);
      }
    }
  }
}

TEST_CASE("spectra are passive and smooth on presets and random configurations") {
  std::vector<std::pair<CellConfig, VelocityGrid>> cases;
  for (const char* name : {"fig5a", "fig5b"}) {
    for (double d : {0.0, 0.5, 1.0, 1.5, 2.0}) cases.emplace_back(preset_cell(name, d), preset_grid(name));
  }
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    CellConfig cell = preset_cell(trial % 2 ? "fig5a" : "fig5b", 0.0);
    cell.atom.gamma_p = testing_support::log_uniform(rng, 1e2, 1e10);
    cell.atom.gamma_bc = testing_support::log_uniform(rng, 1e2, 1e6);
    cell.atom.density *= testing_support::log_uniform(rng, 1e-2, 1e2);
    cell.omega_d = testing_support::log_uniform(rng, 1e4, 1e9);
    cell.delta_one = std::uniform_real_distribution<double>(-angular(3e9), angular(3e9))(rng);
    cell.length = testing_support::log_uniform(rng, 1e-3, 1e-1);
    std::vector<double> scan;
    for (int j = -20; j <= 20; ++j) scan.push_back(j * angular(10e3));
    cell.scan = scan;
    cases.emplace_back(cell, build_grid(cell.atom, 256, 5.0));
  }
  int index = 0;
  for (const auto& [cell, grid] : cases) {
    const TransmissionSpectrum s = scan_spectrum(cell, grid);
    INFO("case " << index++);
    for (std::size_t j = 0; j < s.transmission.size(); ++j) {
      CHECK(s.transmission[j] >= 0.0);
      CHECK(s.transmission[j] <= 1.0 + 1e-9);
      CHECK(s.transmission[j] == std::norm(s.amplitude_ratio[j]));
    }
  }
}

TEST_CASE("preset spectra have no jumps once the resonance is resolved") {
  // Step small enough that a continuous lineshape changes by < 1e-3 per
  // sample; a branch artifact would not shrink with the step.
  for (const auto& [name, points] : {std::pair<const char*, int>{"fig5a", 20001},
                                     std::pair<const char*, int>{"fig5b", 100001}}) {
    const RunConfig rc = preset(name);
    const VelocityGrid g = rc.grid();
    for (double d : rc.delta_one) {
      CellConfig cell = rc.cell(d);
      cell.scan.resize(points);
      for (int j = 0; j < points; ++j) cell.scan[j] = rc.scan.span * (2.0 * j / (points - 1) - 1.0);
      const TransmissionSpectrum s = scan_spectrum(cell, g);
      double worst = 0.0;
      for (std::size_t j = 1; j < s.transmission.size(); ++j) {
        worst = std::max(worst, std::abs(s.transmission[j] - s.transmission[j - 1]));
      }
      INFO(name << " Delta = " << hertz(d) << " Hz");
      CHECK(worst < 1e-3);
    }
  }
}

TEST_CASE("resonance contrast flips sign in the buffer cell") {
  std::vector<double> contrast;
  for (double d : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const CellConfig cell = preset_cell("fig5b", d);
    const VelocityGrid g = preset_grid("fig5b");
    const TransmissionSpectrum s = scan_spectrum(cell, g);
    const TransmissionSpectrum bg = background_spectrum(cell, g);
    const std::size_t j = argmax_deviation(s.transmission, bg.transmission);
    contrast.push_back(s.transmission[j] - bg.transmission[j]);
  }
  CHECK(contrast.front() > 0.0);
  CHECK(contrast.back() < 0.0);
  int flips = 0;
  for (std::size_t j = 1; j < contrast.size(); ++j) flips += (contrast[j] > 0) != (contrast[j - 1] > 0);
  CHECK(flips == 1);
}
