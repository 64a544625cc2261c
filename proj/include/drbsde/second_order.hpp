#pragma once

#include <cstdint>
#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/reflected.hpp"

namespace drbsde {

/// Value and hedge of the sup-over-measures (or inf-over-measures) doubly
/// reflected problem. The hedge is the representation coefficient under the
/// extremal kernel; ties resolve to the lowest volatility index.
///
/// z_spread records, per node, the spread of the representation coefficient
/// across the volatility kernels. In the continuous theory the hedge does
/// not depend on the measure; on a lattice the kernels differ per level, so
/// the spread is reported as a diagnostic rather than asserted to vanish.
struct SecondOrderSolution {
  NodeField y;
  NodeField z;
  std::vector<std::vector<int>> argmax_vol;
  NodeField z_spread;
};

SecondOrderSolution solve_2drbsde(const Lattice& lattice,
                                  const VolatilityGrid& grid,
                                  const Driver& driver,
                                  const TerminalFn& terminal,
                                  const ObstaclePair& obstacles,
                                  const SolveOptions& opts = {});

SecondOrderSolution solve_2drbsde_values(const Lattice& lattice,
                                         const VolatilityGrid& grid,
                                         const Driver& driver,
                                         const std::vector<double>& terminal_values,
                                         const ObstaclePair& obstacles,
                                         const SolveOptions& opts = {});

/// Same recursion with the infimum over volatility levels.
SecondOrderSolution solve_2drbsde_lower(const Lattice& lattice,
                                        const VolatilityGrid& grid,
                                        const Driver& driver,
                                        const TerminalFn& terminal,
                                        const ObstaclePair& obstacles,
                                        const SolveOptions& opts = {});

SecondOrderSolution solve_2drbsde_lower_values(
    const Lattice& lattice, const VolatilityGrid& grid, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    const SolveOptions& opts = {});

/// Sup-over-measures value with only the lower reflection (no upper
/// obstacle). Benchmark for the large-penalty limit of game prices.
NodeField american_value(const Lattice& lattice, const VolatilityGrid& grid,
                         const Driver& driver, const TerminalFn& terminal,
                         const SurfaceFn& lower, const SolveOptions& opts = {});

/// The nodewise extremal strategy recorded in a solution.
Strategy extremal_strategy(const Lattice& lattice,
                           const SecondOrderSolution& solution);

/// Per-node increments of the bounded-variation part accumulated under one
/// strategy: v = Y - E[Y_next] - dt * F evaluated with the strategy's
/// kernel. Along every path, Y_0 - Y_T - sum(dt*F) plus the martingale
/// increments telescopes to the running sum of v.
NodeField v_process(const Lattice& lattice, const Strategy& strategy,
                    const SecondOrderSolution& solution, const Driver& driver);

/// Jordan split of the v increments: on nodes where the companion solution
/// sits on the upper obstacle the increment belongs to the non-increasing
/// part (k_plus); elsewhere it must be non-negative (v_plus). Supports are
/// disjoint and v = v_plus - k_plus exactly.
struct VLedger {
  NodeField v;
  NodeField v_plus;
  NodeField k_plus;
};

/// Throws NumericsError when the off-obstacle part dips below
/// -negativity_tol * scale; by the structure of the recursion it never
/// should.
VLedger decompose_v(const Lattice& lattice, const NodeField& v,
                    const DrbsdeSolution& companion,
                    const ObstaclePair& obstacles, double contact_tol = 1e-9,
                    double negativity_tol = 1e-9);

/// Exhaustive check of the minimum condition at one time slice: for each
/// node, the minimum over all strategy continuations of the expected
/// remaining increments of V + k^+ - k^- must vanish. The past increments
/// are common to every continuation that agrees up to the slice, so the
/// reported gap per node covers all conditioning strategies at once.
struct MinimumConditionReport {
  int t_slice = 0;
  std::vector<double> gap;  ///< signed minimal expected remaining increment
  double max_abs_gap = 0.0;
};

MinimumConditionReport check_minimum_condition(
    const Lattice& lattice, const VolatilityGrid& grid,
    const SecondOrderSolution& solution, const Driver& driver,
    const ObstaclePair& obstacles, int t_slice, std::uint64_t cap,
    const SolveOptions& opts = {});

}  // namespace drbsde
