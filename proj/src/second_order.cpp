#include "drbsde/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "drbsde/errors.hpp"
#include "drbsde/parallel.hpp"
#include "drbsde/step.hpp"

namespace drbsde {

namespace {

SecondOrderSolution solve_extremal(const Lattice& lattice,
                                   const VolatilityGrid& grid,
                                   const Driver& driver,
                                   const std::vector<double>& terminal_values,
                                   const ObstaclePair& obstacles,
                                   const SolveOptions& opts, bool maximize) {
  validate_problem(lattice, obstacles, terminal_values);

  SecondOrderSolution s;
  s.y = make_node_field(lattice);
  s.z = make_node_field(lattice);
  s.z_spread = make_node_field(lattice);
  s.argmax_vol.resize(static_cast<std::size_t>(lattice.slice_count()));
  for (int i = 0; i < lattice.slice_count(); ++i)
    s.argmax_vol[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(lattice.slice_size(i)), 0);
  s.y.back() = terminal_values;

  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = s.y[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      double best = maximize ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
      double best_z = 0.0;
      int best_j = 0;
      double z_min = std::numeric_limits<double>::infinity();
      double z_max = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < grid.size(); ++j) {
        const StepEval st = eval_step(lattice, i, k, j, next, driver, opts);
        z_min = std::min(z_min, st.z);
        z_max = std::max(z_max, st.z);
        const bool better =
            maximize ? st.candidate > best : st.candidate < best;
        if (better) {
          best = st.candidate;
          best_z = st.z;
          best_j = j;
        }
      }
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      const auto si = static_cast<std::size_t>(i);
      const auto sk = static_cast<std::size_t>(k);
      s.y[si][sk] = std::min(up, std::max(lo, best));
      s.z[si][sk] = best_z;
      s.argmax_vol[si][sk] = best_j;
      s.z_spread[si][sk] = z_max - z_min;
    }
  }
  return s;
}

}  // namespace

SecondOrderSolution solve_2drbsde_values(const Lattice& lattice,
                                         const VolatilityGrid& grid,
                                         const Driver& driver,
                                         const std::vector<double>& terminal_values,
                                         const ObstaclePair& obstacles,
                                         const SolveOptions& opts) {
  return solve_extremal(lattice, grid, driver, terminal_values, obstacles,
                        opts, /*maximize=*/true);
}

SecondOrderSolution solve_2drbsde(const Lattice& lattice,
                                  const VolatilityGrid& grid,
                                  const Driver& driver,
                                  const TerminalFn& terminal,
                                  const ObstaclePair& obstacles,
                                  const SolveOptions& opts) {
  return solve_2drbsde_values(lattice, grid, driver,
                              terminal_values_of(lattice, terminal), obstacles,
                              opts);
}

SecondOrderSolution solve_2drbsde_lower_values(
    const Lattice& lattice, const VolatilityGrid& grid, const Driver& driver,
    const std::vector<double>& terminal_values, const ObstaclePair& obstacles,
    const SolveOptions& opts) {
  return solve_extremal(lattice, grid, driver, terminal_values, obstacles,
                        opts, /*maximize=*/false);
}

SecondOrderSolution solve_2drbsde_lower(const Lattice& lattice,
                                        const VolatilityGrid& grid,
                                        const Driver& driver,
                                        const TerminalFn& terminal,
                                        const ObstaclePair& obstacles,
                                        const SolveOptions& opts) {
  return solve_2drbsde_lower_values(lattice, grid, driver,
                                    terminal_values_of(lattice, terminal),
                                    obstacles, opts);
}

NodeField american_value(const Lattice& lattice, const VolatilityGrid& grid,
                         const Driver& driver, const TerminalFn& terminal,
                         const SurfaceFn& lower, const SolveOptions& opts) {
  NodeField y = make_node_field(lattice);
  y.back() = terminal_values_of(lattice, terminal);
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = y[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < grid.size(); ++j)
        best = std::max(best,
                        eval_step(lattice, i, k, j, next, driver, opts).candidate);
      y[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          std::max(lower(t, lattice.state(i, k)), best);
    }
  }
  return y;
}

Strategy extremal_strategy(const Lattice& lattice,
                           const SecondOrderSolution& solution) {
  Strategy s;
  s.choice.assign(solution.argmax_vol.begin(),
                  solution.argmax_vol.end() - 1);
  (void)lattice;
  return s;
}

NodeField v_process(const Lattice& lattice, const Strategy& strategy,
                    const SecondOrderSolution& solution,
                    const Driver& driver) {
  NodeField v = make_node_field(lattice);
  for (int i = 0; i < lattice.steps(); ++i) {
    const auto& next = solution.y[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const StepEval st =
          eval_step(lattice, i, k, strategy.at(i, k), next, driver, {});
      v[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          solution.y[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -
          st.candidate;
    }
  }
  return v;
}

VLedger decompose_v(const Lattice& lattice, const NodeField& v,
                    const DrbsdeSolution& companion,
                    const ObstaclePair& obstacles, double contact_tol,
                    double negativity_tol) {
  VLedger ledger{v, make_node_field(lattice), make_node_field(lattice)};
  double scale = 1.0 + max_abs(v);
  for (int i = 0; i < lattice.steps(); ++i) {
    const double t = lattice.time(i);
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const auto si = static_cast<std::size_t>(i);
      const auto sk = static_cast<std::size_t>(k);
      const double up = obstacles.upper(t, lattice.state(i, k));
      const bool contact = std::abs(companion.y[si][sk] - up) <= contact_tol;
      if (contact) {
        ledger.v_plus[si][sk] = std::max(v[si][sk], 0.0);
        ledger.k_plus[si][sk] = std::max(-v[si][sk], 0.0);
      } else {
        if (v[si][sk] < -negativity_tol * scale) {
          std::ostringstream msg;
          msg << "decompose_v: off-obstacle increment " << v[si][sk]
              << " at slice " << i << ", node " << k
              << " is negative beyond tolerance";
          throw NumericsError(msg.str());
        }
        ledger.v_plus[si][sk] = v[si][sk];
      }
    }
  }
  return ledger;
}

MinimumConditionReport check_minimum_condition(
    const Lattice& lattice, const VolatilityGrid& grid,
    const SecondOrderSolution& solution, const Driver& driver,
    const ObstaclePair& obstacles, int t_slice, std::uint64_t cap,
    const SolveOptions& opts) {
  if (t_slice < 0 || t_slice > lattice.steps())
    throw InputError("check_minimum_condition: slice out of range");

  MinimumConditionReport report;
  report.t_slice = t_slice;
  report.gap.assign(static_cast<std::size_t>(lattice.slice_size(t_slice)),
                    std::numeric_limits<double>::infinity());
  if (t_slice == lattice.steps()) {
    // both sides of the condition coincide at the terminal slice
    std::fill(report.gap.begin(), report.gap.end(), 0.0);
    report.max_abs_gap = 0.0;
    return report;
  }

  const std::vector<double>& terminal_values = solution.y.back();
  const auto strategies = enumerate_strategies(lattice, grid, cap);

  // expected remaining increments of V + k^+ - k^- per strategy; one slot
  // each, reduced serially afterwards
  std::vector<std::vector<double>> remaining(strategies.size());
  parallel_for(strategies.size(), [&](std::size_t s) {
    const Strategy& strat = strategies[s];
    const DrbsdeSolution d = solve_drbsde_reflected_values(
        lattice, strat, driver, terminal_values, obstacles, opts);
    const NodeField v = v_process(lattice, strat, solution, driver);

    std::vector<double> acc(
        static_cast<std::size_t>(lattice.slice_size(lattice.steps())), 0.0);
    for (int i = lattice.steps() - 1; i >= t_slice; --i) {
      std::vector<double> cur(static_cast<std::size_t>(lattice.slice_size(i)));
      for (int k = 0; k < lattice.slice_size(i); ++k) {
        const auto si = static_cast<std::size_t>(i);
        const auto sk = static_cast<std::size_t>(k);
        const double inc =
            v[si][sk] + d.dk_plus[si][sk] - d.dk_minus[si][sk];
        cur[sk] = inc + kernel_expectation(lattice, i, k, strat.at(i, k), acc);
      }
      acc = std::move(cur);
    }
    remaining[s] = std::move(acc);
  });
  for (const auto& acc : remaining)
    for (std::size_t k = 0; k < report.gap.size(); ++k)
      report.gap[k] = std::min(report.gap[k], acc[k]);

  report.max_abs_gap = 0.0;
  for (double g : report.gap)
    report.max_abs_gap = std::max(report.max_abs_gap, std::abs(g));
  return report;
}

}  // namespace drbsde
