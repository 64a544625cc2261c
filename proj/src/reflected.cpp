#include "drbsde/reflected.hpp"

#include <algorithm>
#include <cmath>

#include "drbsde/errors.hpp"

namespace drbsde {

DrbsdeSolution solve_drbsde_reflected_values(
    const Lattice& lattice, const Strategy& strategy, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    const SolveOptions& opts) {
  validate_problem(lattice, obstacles, terminal_values);

  DrbsdeSolution s{make_node_field(lattice), make_node_field(lattice),
                   make_node_field(lattice), make_node_field(lattice)};
  s.y.back() = terminal_values;

  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = s.y[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const StepEval st =
          eval_step(lattice, i, k, strategy.at(i, k), next, driver, opts);
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      const double clamped = std::min(up, std::max(lo, st.candidate));
      // with lo < up both clamp orders produce the same value
      if (clamped != std::max(lo, std::min(up, st.candidate)))
        throw NumericsError("reflected solve: clamp orders disagree");
      s.y[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = clamped;
      s.z[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = st.z;
      s.dk_minus[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          std::max(lo - st.candidate, 0.0);
      s.dk_plus[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          std::max(st.candidate - up, 0.0);
    }
  }
  return s;
}

DrbsdeSolution solve_drbsde_reflected(const Lattice& lattice,
                                      const Strategy& strategy,
                                      const Driver& driver,
                                      const TerminalFn& terminal,
                                      const ObstaclePair& obstacles,
                                      const SolveOptions& opts) {
  return solve_drbsde_reflected_values(lattice, strategy, driver,
                                       terminal_values_of(lattice, terminal),
                                       obstacles, opts);
}

SkorohodReport check_skorohod(const Lattice& lattice,
                              const DrbsdeSolution& solution,
                              const ObstaclePair& obstacles) {
  SkorohodReport r;
  for (int i = 0; i < lattice.slice_count(); ++i) {
    const double t = lattice.time(i);
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      const auto si = static_cast<std::size_t>(i);
      const auto sk = static_cast<std::size_t>(k);
      const double y = solution.y[si][sk];
      const double dkp = solution.dk_plus[si][sk];
      const double dkm = solution.dk_minus[si][sk];
      r.max_obstacle_violation = std::max(
          {r.max_obstacle_violation, lo - y, y - up});
      r.max_complementarity = std::max(
          {r.max_complementarity, std::abs(dkp * (up - y)),
           std::abs(dkm * (y - lo))});
      r.max_simultaneous = std::max(r.max_simultaneous, std::abs(dkp * dkm));
    }
  }
  r.max_obstacle_violation = std::max(r.max_obstacle_violation, 0.0);
  return r;
}

}  // namespace drbsde
