#include "drbsde/instances.hpp"

#include <algorithm>
#include <cmath>

#include "drbsde/errors.hpp"

namespace drbsde {

double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

namespace {

VolatilityGrid draw_grid(std::mt19937_64& rng, int vol_count) {
  if (vol_count <= 1) return VolatilityGrid({uniform(rng, 0.15, 0.45)});
  // ratio capped so the smallest branch probability stays workable
  const double lo = uniform(rng, 0.12, 0.2);
  const double ratio = uniform(rng, 1.5, 2.5);
  return VolatilityGrid({lo, ratio * lo});
}

Driver draw_driver(std::mt19937_64& rng, DriverKind kind) {
  const double b0 = uniform(rng, -0.5, 0.5);
  const double b1 = uniform(rng, -0.5, 0.5);
  const double b2 = uniform(rng, -0.5, 0.5);
  switch (kind) {
    case DriverKind::Zero:
      return zero_driver();
    case DriverKind::StateTime:
      return Driver{[b0, b1, b2](double t, double x, double, double, double) {
                      return b0 + b1 * std::sin(x) + b2 * t;
                    },
                    0.0, 0.0};
    case DriverKind::VolAffine: {
      const double c = uniform(rng, -2.0, 2.0);
      return Driver{[b0, b1, c](double, double x, double, double, double a) {
                      return b0 + b1 * std::sin(x) + c * a;
                    },
                    0.0, 0.0};
    }
    case DriverKind::LipschitzY: {
      const double ky = uniform(rng, -0.3, 0.3);
      return Driver{[b0, b1, ky](double, double x, double y, double, double) {
                      return b0 + b1 * std::sin(x) + ky * y;
                    },
                    std::abs(ky), 0.0};
    }
    case DriverKind::LipschitzYZ: {
      const double ky = uniform(rng, -0.25, 0.25);
      const double kz = uniform(rng, -0.015, 0.015);
      return Driver{[b0, ky, kz](double, double x, double y, double z, double a) {
                      return b0 + 0.2 * std::sin(x) + ky * y +
                             kz * std::sqrt(a) * z;
                    },
                    std::abs(ky), std::abs(kz)};
    }
  }
  return zero_driver();
}

TerminalFn draw_terminal(std::mt19937_64& rng, double x0, double lo, double hi) {
  const double c0 = uniform(rng, lo, hi);
  const double c1 = uniform(rng, -1.5, 1.5);
  const double c2 = uniform(rng, -1.5, 1.5);
  return [c0, c1, c2, x0, lo, hi](double x) {
    const double raw = c0 + c1 * (x - x0) + c2 * std::abs(x - x0);
    return std::min(hi, std::max(lo, raw));
  };
}

}  // namespace

Instance make_instance(std::mt19937_64& rng, const InstanceProfile& profile) {
  const int steps = uniform_int(rng, profile.min_steps, profile.max_steps);
  const double horizon =
      uniform(rng, profile.min_horizon, profile.max_horizon);
  const double x0 = uniform(rng, -1.0, 1.0);
  VolatilityGrid grid = draw_grid(rng, profile.vol_count);
  Lattice lattice = build_lattice(horizon, steps, x0, grid);

  double lo = profile.wide_obstacles ? -50.0 : uniform(rng, -3.0, -1.0);
  double hi = profile.wide_obstacles ? 50.0 : uniform(rng, 1.0, 3.0);

  ObstaclePair obstacles;
  TerminalFn terminal;
  if (profile.forced_upper_contact) {
    // interior cap at hi, relaxed at maturity so overshooting payoffs are
    // admissible and force upper contact on the last slices
    const double overshoot = uniform(rng, 0.3, profile.max_overshoot);
    const double relax_after = horizon - 0.5 * lattice.dt();
    const double cap = hi;
    obstacles.lower = [lo](double, double) { return lo; };
    obstacles.upper = [cap, overshoot, relax_after](double t, double) {
      return t >= relax_after ? cap + overshoot + 10.0 : cap;
    };
    obstacles.gap = cap - lo - 1e-9;
    // plateau payoff above the interior cap: the middle node one slice
    // before maturity sees only plateau children, so contact is certain
    const double peak = hi + overshoot;
    const double plateau = 1.5 * lattice.dx();
    const double slope = uniform(rng, 0.2, 1.5);
    terminal = [peak, plateau, slope, lo, x0](double x) {
      const double drop = std::max(0.0, std::abs(x - x0) - plateau);
      return std::max(lo, peak - slope * drop);
    };
  } else {
    obstacles.lower = [lo](double, double) { return lo; };
    obstacles.upper = [hi](double, double) { return hi; };
    obstacles.gap = hi - lo - 1e-9;
    terminal = draw_terminal(rng, x0, lo, hi);
  }

  Driver driver = draw_driver(rng, profile.driver);
  const std::uint64_t count =
      strategy_count(lattice, grid.size(), std::uint64_t{1} << 62);
  Strategy strategy = strategy_from_index(lattice, grid.size(), rng() % count);
  const double scale = std::max(std::abs(lo), std::abs(hi)) + 3.0;

  return Instance{std::move(lattice), std::move(grid), std::move(driver),
                  std::move(terminal), std::move(obstacles),
                  std::move(strategy), scale};
}

GameInstance make_game_instance(std::mt19937_64& rng,
                                const InstanceProfile& profile) {
  const int steps = uniform_int(rng, profile.min_steps, profile.max_steps);
  const double horizon = uniform(rng, 0.5, 1.5);
  const double x0 = uniform(rng, -1.0, 1.0);
  VolatilityGrid grid = draw_grid(rng, profile.vol_count);
  Lattice lattice = build_lattice(horizon, steps, x0, grid);

  const double lo = profile.wide_obstacles ? -50.0 : uniform(rng, -3.0, -1.0);
  const double hi = profile.wide_obstacles ? 50.0 : uniform(rng, 1.0, 3.0);
  const double g0 = uniform(rng, -0.5, 0.5);
  const double g1 = uniform(rng, -0.5, 0.5);

  GamePayoff payoff;
  payoff.running = [g0, g1](double t, double x) {
    return g0 + g1 * std::sin(x + t);
  };
  payoff.lower = [lo](double, double) { return lo; };
  payoff.upper = [hi](double, double) { return hi; };
  payoff.terminal = draw_terminal(rng, x0, lo, hi);
  payoff.gap = hi - lo - 1e-9;

  const std::uint64_t count =
      strategy_count(lattice, grid.size(), std::uint64_t{1} << 62);
  Strategy strategy = strategy_from_index(lattice, grid.size(), rng() % count);

  return GameInstance{std::move(lattice), std::move(grid), std::move(payoff),
                      std::move(strategy)};
}

OrderedPair make_ordered_pair(std::mt19937_64& rng,
                              const InstanceProfile& profile) {
  Instance small = make_instance(rng, profile);
  const bool share_upper = u01(rng) < 0.5;

  const double d_lower = share_upper ? uniform(rng, 0.0, 0.4) : 0.0;
  const double d_upper = share_upper ? 0.0 : uniform(rng, 0.0, 0.4);
  const double d_xi = uniform(rng, 0.0, 0.4);
  const double d_f = uniform(rng, 0.0, 0.4);

  Instance big = small;
  auto lo_small = small.obstacles.lower;
  auto hi_small = small.obstacles.upper;
  big.obstacles.lower = [lo_small, d_lower](double t, double x) {
    return lo_small(t, x) + d_lower;
  };
  big.obstacles.upper = [hi_small, d_upper](double t, double x) {
    return hi_small(t, x) + d_upper;
  };
  big.obstacles.gap = small.obstacles.gap - d_lower + d_upper - 1e-9;

  auto xi_small = small.terminal;
  big.terminal = [xi_small, hi_small, lo_small, d_xi, d_lower,
                  d_upper](double x) {
    const double lo = lo_small(0.0, x) + d_lower;
    const double hi = hi_small(0.0, x) + d_upper;
    return std::min(hi, std::max(lo, xi_small(x) + d_xi));
  };

  auto f_small = small.driver.evaluate;
  big.driver.evaluate = [f_small, d_f](double t, double x, double y, double z,
                                       double a) {
    return f_small(t, x, y, z, a) + d_f;
  };

  OrderedPair pair{std::move(big), std::move(small), share_upper,
                   !share_upper};
  return pair;
}

GameInstance strict_gap_game_instance() {
  VolatilityGrid grid({0.1, 0.3});
  Lattice lattice = build_lattice(1.0, 3, 0.0, grid);
  GamePayoff payoff;
  payoff.running = [](double, double) { return 0.0; };
  payoff.lower = [](double, double) { return -10.0; };
  payoff.upper = [](double, double) { return 10.0; };
  payoff.terminal = [](double x) {
    return std::min(10.0, 2.0 * std::abs(x));
  };
  payoff.gap = 20.0;
  Strategy strategy = constant_strategy(lattice, 0);
  return GameInstance{std::move(lattice), std::move(grid), std::move(payoff),
                      std::move(strategy)};
}

GameOptionSpec make_game_put(double strike, double penalty) {
  GameOptionSpec spec;
  spec.exercise_payoff = [strike](double, double x) {
    return std::max(strike - x, 0.0);
  };
  spec.penalty = [penalty](double, double) { return penalty; };
  spec.terminal_payoff = [strike](double x) {
    return std::max(strike - x, 0.0);
  };
  spec.funding_driver = zero_driver();
  spec.penalty_floor = penalty;
  return spec;
}

}  // namespace drbsde
