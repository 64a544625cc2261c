#pragma once

#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/step.hpp"

namespace drbsde {

/// Doob-Meyer style decomposition of a doubly reflected g-supermartingale:
/// the last penalized iterate's hedge, pushing increments, and the
/// non-negative increments v of the compensating process, together with the
/// reconstruction residual max |Y - y_n| per penalty level.
struct SupermartingaleDecomposition {
  NodeField z;
  NodeField dk_plus;
  NodeField dk_minus;
  NodeField v;
  double residual = 0.0;
  std::vector<double> residual_trail;
};

/// Runs the penalized family with generator g + n*(y - Y)^- along the given
/// schedule. The candidate is reflected at the lower obstacle first, then
/// lifted toward the target path, then reflected at the upper obstacle, so
/// an exact g-solution decomposes with v identically zero.
///
/// Throws NumericsError when the residual fails to decrease along the
/// schedule, which signals that `path_process` is not a doubly reflected
/// g-supermartingale.
SupermartingaleDecomposition decompose_supermartingale(
    const Lattice& lattice, const Strategy& strategy, const Driver& driver,
    const NodeField& path_process, const std::vector<double>& penalty_schedule,
    const ObstaclePair& obstacles, const SolveOptions& opts = {});

}  // namespace drbsde
