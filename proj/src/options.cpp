#include "drbsde/options.hpp"

#include <cmath>

#include "drbsde/errors.hpp"

namespace drbsde {

SurfaceFn cancel_payoff(const GameOptionSpec& spec) {
  auto exercise = spec.exercise_payoff;
  auto penalty = spec.penalty;
  return [exercise, penalty](double t, double x) {
    return exercise(t, x) + penalty(t, x);
  };
}

ObstaclePair obstacles_of(const GameOptionSpec& spec) {
  if (!(spec.penalty_floor > 0.0))
    throw InputError("game option: penalty floor must be positive");
  return ObstaclePair{spec.exercise_payoff, cancel_payoff(spec),
                      spec.penalty_floor};
}

PriceInterval price_game_option(const Lattice& lattice,
                                const VolatilityGrid& grid,
                                const GameOptionSpec& spec,
                                const SolveOptions& opts) {
  const ObstaclePair obstacles = obstacles_of(spec);
  PriceInterval interval;
  interval.upper_solution =
      solve_2drbsde(lattice, grid, spec.funding_driver, spec.terminal_payoff,
                    obstacles, opts);
  interval.lower_solution =
      solve_2drbsde_lower(lattice, grid, spec.funding_driver,
                          spec.terminal_payoff, obstacles, opts);
  interval.super = interval.upper_solution.y[0][0];
  interval.sub = interval.lower_solution.y[0][0];
  return interval;
}

NodeField hedge_strategy(const SecondOrderSolution& solution,
                         const Lattice& lattice) {
  (void)lattice;
  return solution.z;
}

NodeField american_reference(const Lattice& lattice,
                             const VolatilityGrid& grid,
                             const GameOptionSpec& spec,
                             const SolveOptions& opts) {
  return american_value(lattice, grid, spec.funding_driver,
                        spec.terminal_payoff, spec.exercise_payoff, opts);
}

std::vector<BoundaryRow> exercise_boundary(
    const Lattice& lattice, const SecondOrderSolution& upper_solution,
    const std::vector<NodeField>& strategy_values, const GameOptionSpec& spec,
    double epsilon) {
  if (!(epsilon > 0.0))
    throw InputError("exercise_boundary: epsilon must be positive");
  const SurfaceFn cancel = cancel_payoff(spec);

  std::vector<BoundaryRow> rows;
  for (int i = 0; i < lattice.steps(); ++i) {
    const double t = lattice.time(i);
    BoundaryRow buyer{i, t, -1, {}};
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      if (upper_solution.y[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(k)] <=
          spec.exercise_payoff(t, x) + epsilon)
        buyer.states.push_back(x);
    }
    rows.push_back(std::move(buyer));

    for (std::size_t s = 0; s < strategy_values.size(); ++s) {
      BoundaryRow seller{i, t, static_cast<int>(s), {}};
      for (int k = 0; k < lattice.slice_size(i); ++k) {
        const double x = lattice.state(i, k);
        if (strategy_values[s][static_cast<std::size_t>(i)]
                           [static_cast<std::size_t>(k)] >=
            cancel(t, x) - epsilon)
          seller.states.push_back(x);
      }
      rows.push_back(std::move(seller));
    }
  }
  return rows;
}

}  // namespace drbsde
