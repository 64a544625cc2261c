#include <doctest.h>

#include <cmath>
#include <random>

#include "drbsde/driver.hpp"
#include "drbsde/errors.hpp"
#include "drbsde/instances.hpp"
#include "drbsde/lattice.hpp"

using namespace drbsde;

TEST_CASE("linear hamiltonian pins the generator domain") {
  const double a0 = 0.04;
  std::vector<double> grid;
  for (double g = -10.0; g <= 10.0; g += 0.5) grid.push_back(g);
  const Driver d = build_driver_from_hamiltonian(
      [a0](double, double, double, double, double gamma) {
        return 0.5 * a0 * gamma;
      },
      grid);
  CHECK(d.evaluate(0.1, 0.0, 0.0, 0.0, a0) == doctest::Approx(0.0));
  // away from a0 the conjugate grows to the edge of the grid
  CHECK(d.evaluate(0.1, 0.0, 0.0, 0.0, 0.09) ==
        doctest::Approx(0.5 * (0.09 - a0) * 10.0));
  CHECK(d.evaluate(0.1, 0.0, 0.0, 0.0, 0.01) ==
        doctest::Approx(0.5 * (a0 - 0.01) * 10.0));
}

TEST_CASE("degenerate hamiltonian on the singleton grid") {
  const Driver d = build_driver_from_hamiltonian(
      [](double, double, double, double, double) { return 0.0; }, {0.0});
  CHECK(d.evaluate(0.0, 0.0, 1.0, 2.0, 0.25) == doctest::Approx(0.0));
}

TEST_CASE("quadratic hamiltonian against an independent grid search") {
  std::vector<double> grid;
  for (double g = -10.0; g <= 10.0 + 1e-12; g += 0.01) grid.push_back(g);
  grid.push_back(0.0);
  auto h = [](double, double, double, double, double gamma) {
    return 0.5 * gamma * gamma;
  };
  const Driver d = build_driver_from_hamiltonian(h, grid);

  for (double a : {0.5, 1.0, 2.0}) {
    double best = -1e300;
    for (double g : grid) best = std::max(best, 0.5 * a * g - 0.5 * g * g);
    const double built = d.evaluate(0.0, 0.0, 0.0, 0.0, a);
    CHECK(built == doctest::Approx(best).epsilon(1e-14));
    CHECK(built == doctest::Approx(a * a / 8.0).epsilon(1e-4));
  }
  CHECK(d.evaluate(0.0, 0.0, 0.0, 0.0, 2.0) ==
        doctest::Approx(0.5).epsilon(1e-4));

  // the conjugate dominates every supporting line, touching at the best
  for (double a : {0.5, 2.0})
    for (double g : {-3.0, 0.0, 1.0, 4.0})
      CHECK(d.evaluate(0.0, 0.0, 0.0, 0.0, a) >=
            0.5 * a * g - h(0, 0, 0, 0, g) - 1e-12);
}

TEST_CASE("hamiltonian grid must contain zero") {
  CHECK_THROWS_AS(build_driver_from_hamiltonian(
                      [](double, double, double, double, double) {
                        return 0.0;
                      },
                      {1.0, 2.0}),
                  InputError);
  CHECK_THROWS_AS(build_driver_from_hamiltonian(
                      [](double, double, double, double, double) {
                        return 0.0;
                      },
                      {}),
                  InputError);
}

TEST_CASE("declared lipschitz bounds hold on sampled quadruples") {
  std::mt19937_64 rng(5);
  InstanceProfile profile;
  for (int rep = 0; rep < 20; ++rep) {
    profile.driver =
        (rep % 2 == 0) ? DriverKind::LipschitzY : DriverKind::LipschitzYZ;
    const Instance inst = make_instance(rng, profile);
    const double worst = max_lipschitz_violation(
        inst.driver, rng, 500, 0.3, inst.lattice.x0(), inst.grid.a_upper(),
        10.0);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("obstacle validation rejects bad problems") {
  const VolatilityGrid grid({0.2});
  const Lattice lat = build_lattice(1.0, 2, 0.0, grid);

  ObstaclePair crossing{[](double, double) { return 1.0; },
                        [](double, double) { return -1.0; }, 0.5};
  CHECK_THROWS_AS(validate_separation(lat, crossing), InputError);

  ObstaclePair fine{[](double, double) { return -1.0; },
                    [](double, double) { return 1.0; }, 2.0};
  CHECK_NOTHROW(validate_separation(lat, fine));

  const std::vector<double> too_high(
      static_cast<std::size_t>(lat.slice_size(2)), 5.0);
  CHECK_THROWS_AS(validate_problem(lat, fine, too_high), InputError);
  const std::vector<double> inside(static_cast<std::size_t>(lat.slice_size(2)),
                                   0.5);
  CHECK_NOTHROW(validate_problem(lat, fine, inside));

  ObstaclePair no_gap = fine;
  no_gap.gap = 0.0;
  CHECK_THROWS_AS(validate_separation(lat, no_gap), InputError);
}
