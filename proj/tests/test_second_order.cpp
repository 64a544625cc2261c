#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "drbsde/errors.hpp"
#include "drbsde/field.hpp"
#include "drbsde/instances.hpp"
#include "drbsde/second_order.hpp"
#include "drbsde/step.hpp"

using namespace drbsde;

namespace {

ObstaclePair band(double lo, double hi) {
  return ObstaclePair{[lo](double, double) { return lo; },
                      [hi](double, double) { return hi; }, hi - lo};
}

}  // namespace

TEST_CASE("singleton family reduces to the plain reflected solve") {
  std::mt19937_64 rng(101);
  InstanceProfile profile;
  profile.vol_count = 1;
  profile.min_steps = 1;
  profile.max_steps = 6;
  for (int rep = 0; rep < 25; ++rep) {
    profile.driver = static_cast<DriverKind>(rep % 5);
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution upper = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const SecondOrderSolution lower = solve_2drbsde_lower(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const DrbsdeSolution plain = solve_drbsde_reflected(
        inst.lattice, constant_strategy(inst.lattice, 0), inst.driver,
        inst.terminal, inst.obstacles);
    CHECK(max_abs_diff(upper.y, plain.y) <= 1e-14);
    CHECK(max_abs_diff(lower.y, plain.y) <= 1e-14);
    CHECK(max_abs_diff(upper.z, plain.z) <= 1e-14);
  }
}

TEST_CASE("constants between the obstacles are fixed points") {
  const VolatilityGrid grid({0.1, 0.3});
  const Lattice lat = build_lattice(1.0, 3, 0.0, grid);
  const SecondOrderSolution sol = solve_2drbsde(
      lat, grid, zero_driver(), [](double) { return 4.0; }, band(0.0, 10.0));
  for (const auto& row : sol.y)
    for (double v : row) CHECK(v == doctest::Approx(4.0).epsilon(1e-15));
  const Strategy star = extremal_strategy(lat, sol);
  const NodeField v = v_process(lat, star, sol, zero_driver());
  CHECK(max_abs(v) <= 1e-15);
  CHECK(max_abs(sol.z) <= 1e-15);
}

TEST_CASE("call payoff on two levels matches the strategy envelope") {
  const VolatilityGrid grid({0.1, 0.3});
  const Lattice lat = build_lattice(1.0, 3, 0.0, grid);
  const auto terminal = [](double x) { return std::max(x - 0.05, 0.0); };
  const ObstaclePair obstacles = band(-50.0, 50.0);
  const SecondOrderSolution sol =
      solve_2drbsde(lat, grid, zero_driver(), terminal, obstacles);
  double best = -std::numeric_limits<double>::infinity();
  for (const Strategy& strat : enumerate_strategies(lat, grid, 1 << 20)) {
    const DrbsdeSolution d =
        solve_drbsde_reflected(lat, strat, zero_driver(), terminal, obstacles);
    best = std::max(best, d.y[0][0]);
  }
  CHECK(std::abs(sol.y[0][0] - best) <= 1e-10);
  // the high level dominates a convex payoff
  CHECK(sol.argmax_vol[0][0] == 1);
}

TEST_CASE("enlarging the level family never lowers the upper value") {
  std::mt19937_64 rng(107);
  for (int rep = 0; rep < 10; ++rep) {
    const double lo = uniform(rng, 0.1, 0.2);
    const double hi = uniform(rng, 0.3, 0.5);
    const VolatilityGrid small({lo});
    const VolatilityGrid big({lo, hi});
    const Lattice lat = build_lattice(1.0, 3, 0.0, big);
    // the same space grid hosts both families: rebuild small on big's dx
    const Lattice lat_small =
        build_lattice(1.0, 3, 0.0, small, hi / lo * 1.0);
    const auto terminal = [](double x) { return std::abs(x); };
    const SecondOrderSolution y_small = solve_2drbsde(
        lat_small, small, zero_driver(), terminal, band(-50.0, 50.0));
    const SecondOrderSolution y_big =
        solve_2drbsde(lat, big, zero_driver(), terminal, band(-50.0, 50.0));
    CHECK(y_big.y[0][0] >= y_small.y[0][0] - 1e-12);
  }
}

TEST_CASE("ledger increments satisfy the reduction identities") {
  std::mt19937_64 rng(109);
  InstanceProfile profile;
  profile.vol_count = 1;
  for (int rep = 0; rep < 15; ++rep) {
    profile.driver = static_cast<DriverKind>(rep % 5);
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const Strategy only = constant_strategy(inst.lattice, 0);
    const DrbsdeSolution plain = solve_drbsde_reflected(
        inst.lattice, only, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v = v_process(inst.lattice, only, sol, inst.driver);
    // one measure: the ledger is exactly dk- - dk+, so it obeys Skorohod
    for (int i = 0; i < inst.lattice.steps(); ++i)
      for (int k = 0; k < inst.lattice.slice_size(i); ++k) {
        const auto si = static_cast<std::size_t>(i);
        const auto sk = static_cast<std::size_t>(k);
        CHECK(std::abs(v[si][sk] - (plain.dk_minus[si][sk] -
                                    plain.dk_plus[si][sk])) <= 1e-12);
      }
  }
}

TEST_CASE("ledger telescopes to the pathwise decomposition") {
  std::mt19937_64 rng(113);
  InstanceProfile profile;
  profile.max_steps = 3;
  for (int rep = 0; rep < 10; ++rep) {
    profile.driver = (rep % 2 == 0) ? DriverKind::VolAffine
                                    : DriverKind::LipschitzY;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v =
        v_process(inst.lattice, inst.strategy, sol, inst.driver);

    // walk every path: Y_0 - Y_T - sum dt*F + martingale increments = sum v
    const int steps = inst.lattice.steps();
    std::vector<int> branch(static_cast<std::size_t>(steps), 0);
    while (true) {
      double node_value = sol.y[0][0];
      double running = 0.0;
      double martingale = 0.0;
      int node = 0;
      for (int i = 0; i < steps; ++i) {
        const auto si = static_cast<std::size_t>(i);
        const int vol = inst.strategy.at(i, node);
        const StepEval st = eval_step(inst.lattice, i, node, vol,
                                      sol.y[si + 1], inst.driver, {});
        running += st.candidate - st.expectation;  // dt * F at the node
        const int b = branch[si];
        const int child = node + b;
        martingale +=
            sol.y[si + 1][static_cast<std::size_t>(child)] - st.expectation;
        node = child;
      }
      const double terminal_value =
          sol.y[static_cast<std::size_t>(steps)][static_cast<std::size_t>(node)];
      double v_sum = 0.0;
      int n2 = 0;
      for (int i = 0; i < steps; ++i) {
        v_sum += v[static_cast<std::size_t>(i)][static_cast<std::size_t>(n2)];
        n2 += branch[static_cast<std::size_t>(i)];
      }
      const double lhs = node_value - terminal_value - running + martingale;
      CHECK(std::abs(lhs - v_sum) <= 1e-10);

      // next path
      int pos = steps - 1;
      while (pos >= 0 && branch[static_cast<std::size_t>(pos)] == 2) {
        branch[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++branch[static_cast<std::size_t>(pos)];
    }
    ++profile.min_steps;
    profile.min_steps = std::min(profile.min_steps, profile.max_steps);
  }
}

TEST_CASE("extremal-strategy ledger is non-negative off the upper obstacle") {
  std::mt19937_64 rng(127);
  InstanceProfile profile;
  profile.forced_upper_contact = true;
  for (int rep = 0; rep < 10; ++rep) {
    profile.driver = (rep % 2 == 0) ? DriverKind::VolAffine
                                    : DriverKind::StateTime;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const Strategy star = extremal_strategy(inst.lattice, sol);
    const DrbsdeSolution companion = solve_drbsde_reflected(
        inst.lattice, star, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v = v_process(inst.lattice, star, sol, inst.driver);
    for (int i = 0; i < inst.lattice.steps(); ++i) {
      const double t = inst.lattice.time(i);
      for (int k = 0; k < inst.lattice.slice_size(i); ++k) {
        const double up = inst.obstacles.upper(t, inst.lattice.state(i, k));
        const auto si = static_cast<std::size_t>(i);
        const auto sk = static_cast<std::size_t>(k);
        if (companion.y[si][sk] < up - 1e-9) CHECK(v[si][sk] >= -1e-12);
      }
    }
  }
}

TEST_CASE("wide obstacles keep every strategy ledger non-negative") {
  std::mt19937_64 rng(131);
  InstanceProfile profile;
  profile.wide_obstacles = true;
  profile.min_steps = 2;
  profile.max_steps = 2;
  for (int rep = 0; rep < 10; ++rep) {
    profile.driver = (rep % 2 == 0) ? DriverKind::VolAffine
                                    : DriverKind::LipschitzY;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    for (const Strategy& strat :
         enumerate_strategies(inst.lattice, inst.grid, 1 << 20)) {
      const NodeField v = v_process(inst.lattice, strat, sol, inst.driver);
      for (const auto& row : v)
        for (double vv : row) CHECK(vv >= -1e-12);
    }
  }
}

TEST_CASE("jordan split of the ledger") {
  std::mt19937_64 rng(137);
  InstanceProfile profile;
  profile.forced_upper_contact = true;
  profile.driver = DriverKind::Zero;
  for (int rep = 0; rep < 15; ++rep) {
    profile.vol_count = (rep % 2) + 1;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const Strategy star = extremal_strategy(inst.lattice, sol);
    const DrbsdeSolution companion = solve_drbsde_reflected(
        inst.lattice, star, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v = v_process(inst.lattice, star, sol, inst.driver);
    const VLedger ledger =
        decompose_v(inst.lattice, v, companion, inst.obstacles);

    bool any_contact = false;
    for (int i = 0; i < inst.lattice.steps(); ++i) {
      const double t = inst.lattice.time(i);
      for (int k = 0; k < inst.lattice.slice_size(i); ++k) {
        const auto si = static_cast<std::size_t>(i);
        const auto sk = static_cast<std::size_t>(k);
        CHECK(std::abs(v[si][sk] -
                       (ledger.v_plus[si][sk] - ledger.k_plus[si][sk])) <=
              1e-12);
        CHECK(std::abs(ledger.v_plus[si][sk] * ledger.k_plus[si][sk]) <=
              1e-12);
        CHECK(ledger.v_plus[si][sk] >= -1e-12);
        CHECK(ledger.k_plus[si][sk] >= -1e-12);
        const double up = inst.obstacles.upper(t, inst.lattice.state(i, k));
        if (std::abs(companion.y[si][sk] - up) <= 1e-9) {
          any_contact = true;
          CHECK(std::abs(ledger.k_plus[si][sk] - companion.dk_plus[si][sk]) <=
                1e-10);
        } else {
          CHECK(ledger.k_plus[si][sk] == 0.0);
        }
      }
    }
    CHECK(any_contact);
  }
}

TEST_CASE("no upper contact leaves the split entirely non-decreasing") {
  std::mt19937_64 rng(139);
  InstanceProfile profile;
  profile.wide_obstacles = true;
  const Instance inst = make_instance(rng, profile);
  const SecondOrderSolution sol = solve_2drbsde(
      inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
  const Strategy star = extremal_strategy(inst.lattice, sol);
  const DrbsdeSolution companion = solve_drbsde_reflected(
      inst.lattice, star, inst.driver, inst.terminal, inst.obstacles);
  const NodeField v = v_process(inst.lattice, star, sol, inst.driver);
  const VLedger ledger = decompose_v(inst.lattice, v, companion,
                                     inst.obstacles);
  CHECK(max_abs(ledger.k_plus) == 0.0);
  CHECK(max_abs_diff(ledger.v_plus, v) == 0.0);
}

TEST_CASE("minimum condition: singleton and terminal slices are exact") {
  std::mt19937_64 rng(149);
  InstanceProfile profile;
  profile.vol_count = 1;
  profile.driver = DriverKind::StateTime;
  const Instance inst = make_instance(rng, profile);
  const SecondOrderSolution sol = solve_2drbsde(
      inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
  for (int t = 0; t <= inst.lattice.steps(); ++t) {
    const MinimumConditionReport report = check_minimum_condition(
        inst.lattice, inst.grid, sol, inst.driver, inst.obstacles, t,
        1 << 20);
    CHECK(report.max_abs_gap <= 1e-11);
  }
}

TEST_CASE("minimum condition: exhaustive gap on two levels") {
  std::mt19937_64 rng(151);
  InstanceProfile profile;
  profile.min_steps = 3;
  profile.max_steps = 3;
  for (int rep = 0; rep < 5; ++rep) {
    profile.driver = (rep % 2 == 0) ? DriverKind::VolAffine
                                    : DriverKind::StateTime;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    for (int t = 0; t < inst.lattice.steps(); ++t) {
      const MinimumConditionReport report = check_minimum_condition(
          inst.lattice, inst.grid, sol, inst.driver, inst.obstacles, t,
          1 << 20);
      CHECK(report.max_abs_gap <= 1e-9);
    }
  }
}

TEST_CASE("minimum condition: enumeration cap is enforced") {
  const VolatilityGrid grid({0.1, 0.3});
  const Lattice lat = build_lattice(1.0, 3, 0.0, grid);
  const SecondOrderSolution sol = solve_2drbsde(
      lat, grid, zero_driver(), [](double x) { return std::abs(x); },
      band(-50.0, 50.0));
  CHECK_THROWS_AS(check_minimum_condition(lat, grid, sol, zero_driver(),
                                          band(-50.0, 50.0), 0, 100),
                  CapError);
}

TEST_CASE("lower envelope mirrors the upper under data reflection") {
  std::mt19937_64 rng(157);
  InstanceProfile profile;
  profile.driver = DriverKind::LipschitzY;
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution lower = solve_2drbsde_lower(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);

    auto f = inst.driver.evaluate;
    Driver mirrored{[f](double t, double x, double y, double z, double a) {
                      return -f(t, x, -y, -z, a);
                    },
                    inst.driver.lipschitz_y, inst.driver.lipschitz_z};
    auto lo = inst.obstacles.lower;
    auto hi = inst.obstacles.upper;
    ObstaclePair flipped{[hi](double t, double x) { return -hi(t, x); },
                         [lo](double t, double x) { return -lo(t, x); },
                         inst.obstacles.gap};
    auto xi = inst.terminal;
    const SecondOrderSolution upper = solve_2drbsde(
        inst.lattice, inst.grid, mirrored, [xi](double x) { return -xi(x); },
        flipped);
    NodeField negated = upper.y;
    for (auto& row : negated)
      for (double& vv : row) vv = -vv;
    CHECK(max_abs_diff(lower.y, negated) <= 1e-14);
  }
}

TEST_CASE("lower envelope sits below the upper one") {
  std::mt19937_64 rng(163);
  InstanceProfile profile;
  for (int rep = 0; rep < 10; ++rep) {
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution upper = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const SecondOrderSolution lower = solve_2drbsde_lower(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    for (std::size_t i = 0; i < upper.y.size(); ++i)
      for (std::size_t k = 0; k < upper.y[i].size(); ++k)
        CHECK(lower.y[i][k] <= upper.y[i][k] + 1e-12);
  }
}

TEST_CASE("the ledger itself need not satisfy a Skorohod condition") {
  // with two levels the compensating process can grow strictly inside the
  // band; only its Jordan split is constrained
  std::mt19937_64 rng(167);
  InstanceProfile profile;
  profile.wide_obstacles = true;
  profile.min_steps = 2;
  profile.max_steps = 3;
  bool found_interior_growth = false;
  for (int rep = 0; rep < 20 && !found_interior_growth; ++rep) {
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v =
        v_process(inst.lattice, inst.strategy, sol, inst.driver);
    const DrbsdeSolution companion =
        solve_drbsde_reflected(inst.lattice, inst.strategy, inst.driver,
                               inst.terminal, inst.obstacles);
    for (int i = 0; i < inst.lattice.steps(); ++i) {
      const double t = inst.lattice.time(i);
      for (int k = 0; k < inst.lattice.slice_size(i); ++k) {
        const auto si = static_cast<std::size_t>(i);
        const auto sk = static_cast<std::size_t>(k);
        const double x = inst.lattice.state(i, k);
        const double lo = inst.obstacles.lower(t, x);
        const double up = inst.obstacles.upper(t, x);
        const bool interior = companion.y[si][sk] > lo + 1e-6 &&
                              companion.y[si][sk] < up - 1e-6;
        if (interior && v[si][sk] > 1e-9) {
          // both complementarity products are non-zero here, which a
          // Skorohod check would reject; the decomposition must not
          found_interior_growth = true;
          CHECK_NOTHROW(decompose_v(inst.lattice, v, companion,
                                    inst.obstacles));
        }
      }
    }
  }
  CHECK(found_interior_growth);
}
