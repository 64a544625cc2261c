#pragma once

#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/field.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/step.hpp"

namespace drbsde {

/// Solution of a doubly reflected backward equation under one strategy:
/// value y, hedge z (the representation coefficient under the node's
/// kernel), and the per-node increments of the two pushing processes.
/// dk_minus pushes up off the lower obstacle, dk_plus pushes down off the
/// upper one; strict separation keeps at most one positive per node.
struct DrbsdeSolution {
  NodeField y;
  NodeField z;
  NodeField dk_plus;
  NodeField dk_minus;
};

DrbsdeSolution solve_drbsde_reflected(const Lattice& lattice,
                                      const Strategy& strategy,
                                      const Driver& driver,
                                      const TerminalFn& terminal,
                                      const ObstaclePair& obstacles,
                                      const SolveOptions& opts = {});

DrbsdeSolution solve_drbsde_reflected_values(
    const Lattice& lattice, const Strategy& strategy, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    const SolveOptions& opts = {});

struct SkorohodReport {
  double max_complementarity = 0.0;      ///< max of dk+*(S-y) and dk-*(y-L)
  double max_obstacle_violation = 0.0;   ///< max of (L-y)+ and (y-S)+
  double max_simultaneous = 0.0;         ///< max of dk+ * dk-
  bool passes(double tol) const {
    return max_complementarity <= tol && max_obstacle_violation <= tol &&
           max_simultaneous <= tol;
  }
};

SkorohodReport check_skorohod(const Lattice& lattice,
                              const DrbsdeSolution& solution,
                              const ObstaclePair& obstacles);

}  // namespace drbsde
