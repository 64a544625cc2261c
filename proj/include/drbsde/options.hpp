#pragma once

#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/second_order.hpp"

namespace drbsde {

/// Game (Israeli) option contract: the buyer exercises for
/// exercise_payoff, the seller cancels for exercise_payoff + penalty, the
/// claim pays terminal_payoff at maturity. The funding driver enters the
/// wealth dynamics as the generator b(t, x, y, pi).
struct GameOptionSpec {
  SurfaceFn exercise_payoff;
  SurfaceFn penalty;
  TerminalFn terminal_payoff;
  Driver funding_driver;
  double penalty_floor = 0.0;  ///< declared positive lower bound on penalty
};

SurfaceFn cancel_payoff(const GameOptionSpec& spec);
ObstaclePair obstacles_of(const GameOptionSpec& spec);

/// Robust price interval of the option. `super` is a superhedging upper
/// bound (not asserted minimal), `sub` the subhedging lower bound; the two
/// full per-node solutions carry the hedges and extremal levels.
struct PriceInterval {
  double sub = 0.0;
  double super = 0.0;
  SecondOrderSolution upper_solution;
  SecondOrderSolution lower_solution;
};

PriceInterval price_game_option(const Lattice& lattice,
                                const VolatilityGrid& grid,
                                const GameOptionSpec& spec,
                                const SolveOptions& opts = {});

/// Hedge ratio per node: the representation coefficient of the priced
/// solution under its extremal kernel.
NodeField hedge_strategy(const SecondOrderSolution& solution,
                         const Lattice& lattice);

/// No-cancellation benchmark: the claim priced with the lower reflection
/// only.
NodeField american_reference(const Lattice& lattice,
                             const VolatilityGrid& grid,
                             const GameOptionSpec& spec,
                             const SolveOptions& opts = {});

/// One row of the near-optimal exercise/cancellation table. strategy == -1
/// marks the buyer's (strategy-free) boundary; other rows carry the
/// seller's boundary for the given enumerated strategy.
struct BoundaryRow {
  int slice = 0;
  double time = 0.0;
  int strategy = -1;
  std::vector<double> states;
};

std::vector<BoundaryRow> exercise_boundary(
    const Lattice& lattice, const SecondOrderSolution& upper_solution,
    const std::vector<NodeField>& strategy_values, const GameOptionSpec& spec,
    double epsilon);

}  // namespace drbsde
