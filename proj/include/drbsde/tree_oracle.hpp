#pragma once

#include <cstdint>

#include "drbsde/driver.hpp"
#include "drbsde/dynkin.hpp"
#include "drbsde/lattice.hpp"

namespace drbsde {

/// Exhaustive checks on the non-recombined tree, where volatility choices
/// and stopping decisions may depend on the whole path. Confirms that
/// node-feedback (Markov) strategies and rules lose nothing on the
/// recombining lattice. Costs grow like vols^(3^steps); guarded by `cap`.

/// sup over path-dependent strategies of the doubly reflected value at the
/// root.
double tree_sup_reflected_value(const Lattice& lattice,
                                const VolatilityGrid& grid,
                                const Driver& driver,
                                const TerminalFn& terminal,
                                const ObstaclePair& obstacles,
                                std::uint64_t cap);

/// inf-sup and sup-inf of the game over path-dependent stopping rules under
/// one path-independent strategy.
struct TreeDynkinResult {
  double infsup = 0.0;
  double supinf = 0.0;
};

TreeDynkinResult tree_dynkin_values(const Lattice& lattice,
                                    const Strategy& strategy,
                                    const GamePayoff& payoff,
                                    std::uint64_t cap);

}  // namespace drbsde
