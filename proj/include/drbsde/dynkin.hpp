#pragma once

#include <cstdint>
#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/second_order.hpp"

namespace drbsde {

/// Payoff data of a two-player stopping game: running reward g, the
/// stopper payoffs L (maximizer) and S (minimizer), terminal payoff xi.
/// The minimizer stopping first pays S; the maximizer stopping first (or a
/// simultaneous stop before maturity) collects L; at maturity both get xi.
struct GamePayoff {
  SurfaceFn running;
  SurfaceFn lower;
  SurfaceFn upper;
  TerminalFn terminal;
  double gap = 0.0;
};

ObstaclePair obstacles_of(const GamePayoff& payoff);
Driver driver_of(const GamePayoff& payoff);

/// Adapted stopping rule as a node marking on the non-terminal slices; a
/// path stops at its first marked node, and always at maturity.
struct StoppingRule {
  std::vector<std::vector<char>> stop;
  bool stops(int slice, int node) const {
    return stop[static_cast<std::size_t>(slice)]
               [static_cast<std::size_t>(node)] != 0;
  }
};

StoppingRule rule_from_index(const Lattice& lattice, std::uint64_t index);
StoppingRule never_stop_rule(const Lattice& lattice);

/// Bellman iteration V = min(S, max(L, E[V_next] + g*dt)) under one
/// strategy. Coincides with the doubly reflected solve for the driver
/// F = g.
NodeField dynkin_value_iteration(const Lattice& lattice,
                                 const Strategy& strategy,
                                 const GamePayoff& payoff);

/// Expected game payoff per node when both players commit to fixed rules.
NodeField evaluate_stopping_pair(const Lattice& lattice,
                                 const Strategy& strategy,
                                 const GamePayoff& payoff,
                                 const StoppingRule& tau,
                                 const StoppingRule& sigma);

/// Exhaustive inf-sup and sup-inf over adapted stopping rules. The outer
/// rule is enumerated explicitly; for each fixed outer rule the inner
/// player's best reply over node markings is computed by backward
/// induction, which realizes the exact inner extremum. Throws CapError
/// when (number of rules)^2 exceeds `cap`.
struct DynkinBruteforceResult {
  double infsup = 0.0;
  double supinf = 0.0;
  StoppingRule tau;    ///< outer minimizer attaining infsup
  StoppingRule sigma;  ///< outer maximizer attaining supinf
  bool saddle(double tol) const { return std::abs(infsup - supinf) <= tol; }
};

DynkinBruteforceResult dynkin_bruteforce(const Lattice& lattice,
                                         const Strategy& strategy,
                                         const GamePayoff& payoff,
                                         std::uint64_t cap);

/// Robust upper and lower game values over the strategy family:
/// upper = nodewise max over strategies of the game value, lower = min.
struct UncertainGameValues {
  NodeField upper;
  NodeField lower;
};

UncertainGameValues uncertain_game_values(const Lattice& lattice,
                                          const VolatilityGrid& grid,
                                          const GamePayoff& payoff,
                                          std::uint64_t cap);

/// Near-optimal stopping rules: the minimizer stops once the per-strategy
/// value reaches S - epsilon (one rule per strategy), the maximizer stops
/// once the robust upper value reaches L + epsilon (strategy-free).
struct EpsilonOptimalRules {
  std::vector<StoppingRule> tau_per_strategy;
  StoppingRule sigma;
};

EpsilonOptimalRules epsilon_optimal_times(
    const NodeField& upper_values, const std::vector<NodeField>& strategy_values,
    const GamePayoff& payoff, const Lattice& lattice, double epsilon);

/// Max deviation from the solved upper value when the game is replayed
/// with the generator term plus the gamma-interpolated ledger increments
/// as running reward. The value is gamma-invariant; deviations are
/// numerical noise.
double gamma_interpolation_gap(const Lattice& lattice,
                               const VolatilityGrid& grid,
                               const Driver& driver, const TerminalFn& terminal,
                               const ObstaclePair& obstacles,
                               const Strategy& strategy, double gamma,
                               double contact_tol = 1e-9);

}  // namespace drbsde
