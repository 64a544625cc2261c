#include "drbsde/penalized.hpp"

#include <algorithm>
#include <cmath>

#include "drbsde/errors.hpp"
#include "drbsde/step.hpp"

namespace drbsde {

PenalizedSolution solve_drbsde_penalized_values(
    const Lattice& lattice, const Strategy& strategy, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    double penalty_n, const SolveOptions& opts) {
  if (!(penalty_n > 0.0))
    throw InputError("penalized solve: penalty level must be positive");
  validate_problem(lattice, obstacles, terminal_values);

  PenalizedSolution s{make_node_field(lattice), make_node_field(lattice),
                      make_node_field(lattice), make_node_field(lattice)};
  s.y.back() = terminal_values;
  const double ndt = penalty_n * lattice.dt();

  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = s.y[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const StepEval st =
          eval_step(lattice, i, k, strategy.at(i, k), next, driver, opts);
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      // penalty handled implicitly: solve m = candidate - n*dt*(m - up)^+
      double mid = st.candidate;
      if (mid > up) mid = (st.candidate + ndt * up) / (1.0 + ndt);
      const auto si = static_cast<std::size_t>(i);
      const auto sk = static_cast<std::size_t>(k);
      s.penalty_accrual[si][sk] = ndt * std::max(mid - up, 0.0);
      s.dk_minus[si][sk] = std::max(lo - mid, 0.0);
      s.y[si][sk] = std::max(lo, mid);
      s.z[si][sk] = st.z;
    }
  }
  return s;
}

PenalizedSolution solve_drbsde_penalized(const Lattice& lattice,
                                         const Strategy& strategy,
                                         const Driver& driver,
                                         const TerminalFn& terminal,
                                         const ObstaclePair& obstacles,
                                         double penalty_n,
                                         const SolveOptions& opts) {
  return solve_drbsde_penalized_values(
      lattice, strategy, driver, terminal_values_of(lattice, terminal),
      obstacles, penalty_n, opts);
}

}  // namespace drbsde
