#pragma once

#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/reflected.hpp"

namespace drbsde {

/// Penalized approximation of the doubly reflected solve: the lower
/// obstacle is enforced by reflection, the upper one by the generator term
/// -n * (y - S)^+. penalty_accrual holds the per-node amount
/// n * dt * (y - S)^+ removed by the penalty.
struct PenalizedSolution {
  NodeField y;
  NodeField z;
  NodeField dk_minus;
  NodeField penalty_accrual;
};

PenalizedSolution solve_drbsde_penalized(const Lattice& lattice,
                                         const Strategy& strategy,
                                         const Driver& driver,
                                         const TerminalFn& terminal,
                                         const ObstaclePair& obstacles,
                                         double penalty_n,
                                         const SolveOptions& opts = {});

PenalizedSolution solve_drbsde_penalized_values(
    const Lattice& lattice, const Strategy& strategy, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    double penalty_n, const SolveOptions& opts = {});

}  // namespace drbsde
