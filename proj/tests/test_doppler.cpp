#include <catch_amalgamated.hpp>

#include <random>

#include "eitsim/doppler.hpp"
#include "eitsim/lambda_system.hpp"
#include "support.hpp"

using namespace eitsim;
using Catch::Approx;

namespace {

struct Case {
  const char* name;
  AtomParams atom;
  double omega_d;
};

std::vector<Case> preset_cases() {
  return {{"vacuum", testing_support::vacuum_atom(), 2.6717873e7},
          {"buffer", testing_support::buffer_atom(), 2.1289311e7}};
}

}  // namespace

TEST_CASE("grid weights are a normalized symmetric Maxwellian") {
  const AtomParams a = testing_support::buffer_atom();
  for (std::size_t n : {8u, 32u, 64u, 224u}) {
    const VelocityGrid g = build_grid(a, n, 5.0);
    const double u = a.most_probable_speed();
    CHECK(g.most_probable_speed == u);
    CHECK(g.size() >= n);
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      s0 += g.weights[j];
      s1 += g.weights[j] * g.nodes[j];
      s2 += g.weights[j] * g.nodes[j] * g.nodes[j];
      CHECK(g.nodes[j] == -g.nodes[g.size() - 1 - j]);
      CHECK(g.weights[j] == g.weights[g.size() - 1 - j]);
    }
    CHECK(std::abs(s0 - 1.0) < 1e-12);
    CHECK(std::abs(s1) / u < 1e-14);
    if (n >= 32) CHECK(std::abs(s2 / (0.5 * u * u) - 1.0) < 1e-10);
  }
}

TEST_CASE("most probable speed is sqrt(2 kT/m)") {
  const AtomParams a = testing_support::vacuum_atom();
  CHECK(a.most_probable_speed() ==
        Approx(std::sqrt(2.0 * 1.380649e-23 * (66.4 + 273.15) / rb87::mass)).epsilon(1e-15));
}

TEST_CASE("grid arguments are validated") {
  const AtomParams a = testing_support::buffer_atom();
  CHECK_THROWS_AS(build_grid(a, 4, 5.0), InvalidArgument);
  CHECK_THROWS_AS(build_grid(a, 64, 2.0), InvalidArgument);
}

TEST_CASE("averaging a constant returns it") {
  const VelocityGrid g = build_grid(testing_support::vacuum_atom(), 128, 5.0);
  CHECK(average(g, [](double) { return complex(3.0, -2.0); }) == complex(3.0, -2.0));
  const complex c = average(g, [](double) { return complex(0.25, 1.5); });
  CHECK(std::abs(c - complex(0.25, 1.5)) < 1e-14);
}

TEST_CASE("cold vapour reduces to the un-averaged susceptibility") {
  AtomParams a = testing_support::vacuum_atom();
  a.temperature = 1e-9;
  FieldPoint f;
  f.omega_d = 2e7;
  f.delta_one = angular(3e8);
  f.delta_two = angular(1e3);
  const VelocityGrid g = build_grid(a, 64, 5.0);
  const complex avg = averaged_chi(a, f, g).value;
  const complex bare = susceptibility(a, f, steady_state_populations(a, f.omega_d, f.delta_one)).value;
  CHECK(testing_support::relative(avg, bare) < 1e-6);
}

TEST_CASE("two-level Doppler profile is even in Delta") {
  const AtomParams a = testing_support::vacuum_atom();
  const VelocityGrid g = build_grid(a, resolved_node_count(a, 5.0), 5.0);
  for (double d : {1e8, 5e8, 2e9}) {
    FieldPoint plus;
    plus.delta_one = angular(d);
    FieldPoint minus;
    minus.delta_one = -angular(d);
    const double ip = averaged_chi(a, plus, g).value.imag();
    const double im = averaged_chi(a, minus, g).value.imag();
    CHECK(ip == Approx(im).epsilon(1e-12));
  }
}

TEST_CASE("vacuum line centre matches the dense trapezoid") {
  const AtomParams a = testing_support::vacuum_atom();
  const VelocityGrid g = build_grid(a, resolved_node_count(a, 5.0), 5.0);
  const FieldPoint f;
  const complex chi = averaged_chi(a, f, g).value;
  CHECK(testing_support::relative(chi, testing_support::trapezoid_chi(a, f)) < 1e-6);
  // Doppler-limited: close to the Gaussian peak sqrt(pi) eta/(k u) scaled by the
  // ground-state population.
  const double doppler = 0.5 * std::sqrt(constants::pi) * a.eta() / (a.wavenumber() * a.most_probable_speed());
  CHECK(-chi.imag() == Approx(doppler).epsilon(0.05));
}

TEST_CASE("preset grids match the dense trapezoid at random detunings") {
  std::mt19937_64 rng(5);
  for (const Case& c : preset_cases()) {
    const VelocityGrid g = build_grid(c.atom, resolved_node_count(c.atom, 5.0), 5.0);
    std::uniform_real_distribution<double> big(0.0, angular(2e9));
    std::uniform_real_distribution<double> small(-angular(100e3), angular(100e3));
    for (int trial = 0; trial < 20; ++trial) {
      FieldPoint f;
      f.omega_d = c.omega_d;
      f.delta_one = big(rng);
      f.delta_two = small(rng);
      INFO(c.name << " trial " << trial);
      CHECK(testing_support::relative(averaged_chi(c.atom, f, g).value,
                                      testing_support::trapezoid_chi(c.atom, f, 20000)) < 1e-6);
    }
  }
}

TEST_CASE("resolved grids are converged under node doubling") {
  for (const Case& c : preset_cases()) {
    const std::size_t n = resolved_node_count(c.atom, 5.0);
    const VelocityGrid g1 = build_grid(c.atom, n, 5.0);
    const VelocityGrid g2 = build_grid(c.atom, 2 * n, 5.0);
    for (double d_ghz : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      FieldPoint f;
      f.omega_d = c.omega_d;
      f.delta_one = angular(d_ghz * 1e9);
      for (double d_khz : {0.0, 3.0}) {
        f.delta_two = angular(d_khz * 1e3);
        const complex a1 = averaged_chi(c.atom, f, g1).value;
        const complex a2 = averaged_chi(c.atom, f, g2).value;
        INFO(c.name << " Delta " << d_ghz << " GHz");
        CHECK(std::abs(a1 - a2) / std::abs(a2) < 1e-6);
      }
    }
  }
}

TEST_CASE("averager caches agree with the one-shot average") {
  const AtomParams a = testing_support::buffer_atom();
  const VelocityGrid g = build_grid(a, 128, 5.0);
  const DopplerAverager avg(a, 2e7, angular(1e9), g);
  FieldPoint f;
  f.omega_d = 2e7;
  f.delta_one = angular(1e9);
  f.delta_two = angular(2e3);
  CHECK(avg.chi(f.delta_two).value == averaged_chi(a, f, g).value);
  CHECK(avg.states().size() == g.size());
}
