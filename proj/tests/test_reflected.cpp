#include <doctest.h>

#include <cmath>
#include <random>

#include "drbsde/dynkin.hpp"
#include "drbsde/errors.hpp"
#include "drbsde/field.hpp"
#include "drbsde/instances.hpp"
#include "drbsde/reflected.hpp"

using namespace drbsde;

namespace {

ObstaclePair band(double lo, double hi) {
  return ObstaclePair{[lo](double, double) { return lo; },
                      [hi](double, double) { return hi; }, hi - lo};
}

}  // namespace

TEST_CASE("one step with slack obstacles is plain expectation") {
  const VolatilityGrid grid({0.2});
  const Lattice lat = build_lattice(1.0, 1, 0.0, grid);
  const Strategy s = constant_strategy(lat, 0);
  const DrbsdeSolution sol = solve_drbsde_reflected(
      lat, s, zero_driver(), [](double) { return 5.0; }, band(0.0, 10.0));
  CHECK(sol.y[0][0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(max_abs(sol.dk_plus) == 0.0);
  CHECK(max_abs(sol.dk_minus) == 0.0);
}

TEST_CASE("upper obstacle clamps and books the push") {
  const VolatilityGrid grid({0.2});
  const Lattice lat = build_lattice(1.0, 1, 0.0, grid);
  const Strategy s = constant_strategy(lat, 0);
  // terminal 12 admissible only because the cap relaxes at maturity
  ObstaclePair obs{[](double, double) { return 0.0; },
                   [](double t, double) { return t > 0.5 ? 20.0 : 10.0; },
                   10.0};
  const DrbsdeSolution sol = solve_drbsde_reflected(
      lat, s, zero_driver(), [](double) { return 12.0; }, obs);
  CHECK(sol.y[0][0] == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(sol.dk_plus[0][0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sol.dk_minus[0][0] == 0.0);
}

TEST_CASE("terminal incompatibility and crossing obstacles are rejected") {
  const VolatilityGrid grid({0.2});
  const Lattice lat = build_lattice(1.0, 1, 0.0, grid);
  const Strategy s = constant_strategy(lat, 0);
  CHECK_THROWS_AS(solve_drbsde_reflected(lat, s, zero_driver(),
                                         [](double) { return 12.0; },
                                         band(0.0, 10.0)),
                  InputError);
}

TEST_CASE("driver-free solves equal the game value iteration") {
  std::mt19937_64 rng(17);
  InstanceProfile profile;
  profile.min_steps = 2;
  profile.max_steps = 4;
  for (int rep = 0; rep < 30; ++rep) {
    const GameInstance game = make_game_instance(rng, profile);
    const NodeField vi =
        dynkin_value_iteration(game.lattice, game.strategy, game.payoff);
    const DrbsdeSolution sol = solve_drbsde_reflected(
        game.lattice, game.strategy, driver_of(game.payoff),
        game.payoff.terminal, obstacles_of(game.payoff));
    CHECK(max_abs_diff(vi, sol.y) <= 1e-14);
  }
}

TEST_CASE("four-step driver-free value matches the exhaustive game oracle") {
  std::mt19937_64 rng(23);
  InstanceProfile profile;
  profile.min_steps = 4;
  profile.max_steps = 4;
  for (int rep = 0; rep < 3; ++rep) {
    const GameInstance game = make_game_instance(rng, profile);
    const DrbsdeSolution sol = solve_drbsde_reflected(
        game.lattice, game.strategy, driver_of(game.payoff),
        game.payoff.terminal, obstacles_of(game.payoff));
    const DynkinBruteforceResult bf = dynkin_bruteforce(
        game.lattice, game.strategy, game.payoff, std::uint64_t{1} << 40);
    CHECK(std::abs(sol.y[0][0] - bf.infsup) <= 1e-10);
    CHECK(std::abs(sol.y[0][0] - bf.supinf) <= 1e-10);
  }
}

TEST_CASE("skorohod report is clean by construction and detects corruption") {
  std::mt19937_64 rng(29);
  InstanceProfile profile;
  profile.forced_upper_contact = true;
  const Instance inst = make_instance(rng, profile);
  DrbsdeSolution sol = solve_drbsde_reflected(
      inst.lattice, inst.strategy, inst.driver, inst.terminal, inst.obstacles);
  const SkorohodReport clean =
      check_skorohod(inst.lattice, sol, inst.obstacles);
  CHECK(clean.max_complementarity <= 1e-12);
  CHECK(clean.max_obstacle_violation <= 1e-12);
  CHECK(clean.max_simultaneous <= 1e-12);
  CHECK(clean.passes(1e-12));

  // inject a push away from the obstacle; the report must price it exactly
  const double t0 = inst.lattice.time(0);
  const double up = inst.obstacles.upper(t0, inst.lattice.state(0, 0));
  sol.dk_plus[0][0] += 0.25;
  const SkorohodReport dirty =
      check_skorohod(inst.lattice, sol, inst.obstacles);
  const double injected = 0.25 * (up - sol.y[0][0]);
  CHECK(dirty.max_complementarity ==
        doctest::Approx(std::abs(injected)).epsilon(1e-12));
  CHECK_FALSE(dirty.passes(1e-12));
}

TEST_CASE("explicit and picard schemes coincide for state-only drivers") {
  std::mt19937_64 rng(31);
  InstanceProfile profile;
  profile.driver = DriverKind::StateTime;
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = make_instance(rng, profile);
    const DrbsdeSolution explicit_scheme =
        solve_drbsde_reflected(inst.lattice, inst.strategy, inst.driver,
                               inst.terminal, inst.obstacles);
    SolveOptions opts;
    opts.picard = true;
    const DrbsdeSolution picard =
        solve_drbsde_reflected(inst.lattice, inst.strategy, inst.driver,
                               inst.terminal, inst.obstacles, opts);
    CHECK(max_abs_diff(explicit_scheme.y, picard.y) <= 1e-14);
  }
}

TEST_CASE("picard refinement converges for stiff y-dependence") {
  const VolatilityGrid grid({0.2});
  const Lattice lat = build_lattice(1.0, 3, 0.0, grid);
  const Strategy s = constant_strategy(lat, 0);
  const Driver stiff{[](double, double, double y, double, double) {
                       return 0.9 * std::tanh(y);
                     },
                     0.9, 0.0};
  SolveOptions opts;
  opts.picard = true;
  const DrbsdeSolution sol = solve_drbsde_reflected(
      lat, s, stiff, [](double x) { return x; }, band(-10.0, 10.0), opts);
  // the refined value solves y = E[y_next] + dt*F(y) at the root
  const double e = sol.y[0][0] - lat.dt() * 0.9 * std::tanh(sol.y[0][0]);
  const double e_direct = kernel_expectation(lat, 0, 0, 0, sol.y[1]);
  CHECK(std::abs(e - e_direct) <= 1e-10);
}

TEST_CASE("comparison: ordered data give ordered solutions and increments") {
  std::mt19937_64 rng(37);
  InstanceProfile profile;
  profile.driver = DriverKind::LipschitzY;
  for (int rep = 0; rep < 40; ++rep) {
    const OrderedPair pair = make_ordered_pair(rng, profile);
    const DrbsdeSolution big = solve_drbsde_reflected(
        pair.big.lattice, pair.big.strategy, pair.big.driver,
        pair.big.terminal, pair.big.obstacles);
    const DrbsdeSolution small = solve_drbsde_reflected(
        pair.small.lattice, pair.small.strategy, pair.small.driver,
        pair.small.terminal, pair.small.obstacles);
    for (std::size_t i = 0; i < big.y.size(); ++i)
      for (std::size_t k = 0; k < big.y[i].size(); ++k) {
        CHECK(big.y[i][k] >= small.y[i][k] - 1e-12);
        if (pair.shared_upper)
          CHECK(big.dk_plus[i][k] >= small.dk_plus[i][k] - 1e-12);
        if (pair.shared_lower)
          CHECK(big.dk_minus[i][k] <= small.dk_minus[i][k] + 1e-12);
      }
  }
}
