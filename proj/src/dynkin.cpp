#include "drbsde/dynkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drbsde/errors.hpp"
#include "drbsde/parallel.hpp"
#include "drbsde/step.hpp"

namespace drbsde {

ObstaclePair obstacles_of(const GamePayoff& payoff) {
  return ObstaclePair{payoff.lower, payoff.upper, payoff.gap};
}

Driver driver_of(const GamePayoff& payoff) {
  auto g = payoff.running;
  return Driver{[g](double t, double x, double, double, double) {
                  return g(t, x);
                },
                0.0, 0.0};
}

StoppingRule rule_from_index(const Lattice& lattice, std::uint64_t index) {
  StoppingRule r;
  r.stop.resize(static_cast<std::size_t>(lattice.steps()));
  for (int i = 0; i < lattice.steps(); ++i) {
    auto& row = r.stop[static_cast<std::size_t>(i)];
    row.resize(static_cast<std::size_t>(lattice.slice_size(i)));
    for (auto& c : row) {
      c = static_cast<char>(index & 1u);
      index >>= 1;
    }
  }
  return r;
}

StoppingRule never_stop_rule(const Lattice& lattice) {
  StoppingRule r;
  r.stop.resize(static_cast<std::size_t>(lattice.steps()));
  for (int i = 0; i < lattice.steps(); ++i)
    r.stop[static_cast<std::size_t>(i)]
        .assign(static_cast<std::size_t>(lattice.slice_size(i)), 0);
  return r;
}

NodeField dynkin_value_iteration(const Lattice& lattice,
                                 const Strategy& strategy,
                                 const GamePayoff& payoff) {
  const std::vector<double> xi = terminal_values_of(lattice, payoff.terminal);
  validate_separation(lattice, obstacles_of(payoff));

  NodeField v = make_node_field(lattice);
  v.back() = xi;
  const double dt = lattice.dt();
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = v[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      const double e = kernel_expectation(lattice, i, k, strategy.at(i, k), next);
      const double cont = e + dt * payoff.running(t, x);
      v[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = std::min(
          payoff.upper(t, x), std::max(payoff.lower(t, x), cont));
    }
  }
  return v;
}

NodeField evaluate_stopping_pair(const Lattice& lattice,
                                 const Strategy& strategy,
                                 const GamePayoff& payoff,
                                 const StoppingRule& tau,
                                 const StoppingRule& sigma) {
  NodeField w = make_node_field(lattice);
  w.back() = terminal_values_of(lattice, payoff.terminal);
  const double dt = lattice.dt();
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = w[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      double val;
      if (sigma.stops(i, k)) {
        val = payoff.lower(t, x);  // simultaneous stops pay the lower side
      } else if (tau.stops(i, k)) {
        val = payoff.upper(t, x);
      } else {
        val = kernel_expectation(lattice, i, k, strategy.at(i, k), next) +
              dt * payoff.running(t, x);
      }
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = val;
    }
  }
  return w;
}

namespace {

std::uint64_t rule_count_or_throw(const Lattice& lattice, std::uint64_t cap) {
  const int marks = lattice.non_terminal_node_count();
  if (marks >= 62)
    throw CapError("stopping-rule enumeration: rule count overflows");
  const std::uint64_t rules = std::uint64_t{1} << marks;
  if (rules > cap / rules || rules * rules > cap)
    throw CapError("stopping-rule enumeration: pair count exceeds cap");
  return rules;
}

/// Best reply of the maximizer against a fixed minimizer rule.
double best_reply_value_sup(const Lattice& lattice, const Strategy& strategy,
                            const GamePayoff& payoff, const StoppingRule& tau) {
  NodeField w = make_node_field(lattice);
  w.back() = terminal_values_of(lattice, payoff.terminal);
  const double dt = lattice.dt();
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = w[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      double val;
      if (tau.stops(i, k)) {
        // stopping too would only fetch the lower payoff
        val = payoff.upper(t, x);
      } else {
        const double cont =
            kernel_expectation(lattice, i, k, strategy.at(i, k), next) +
            dt * payoff.running(t, x);
        val = std::max(payoff.lower(t, x), cont);
      }
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = val;
    }
  }
  return w[0][0];
}

/// Best reply of the minimizer against a fixed maximizer rule.
double best_reply_value_inf(const Lattice& lattice, const Strategy& strategy,
                            const GamePayoff& payoff,
                            const StoppingRule& sigma) {
  NodeField w = make_node_field(lattice);
  w.back() = terminal_values_of(lattice, payoff.terminal);
  const double dt = lattice.dt();
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = w[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      double val;
      if (sigma.stops(i, k)) {
        val = payoff.lower(t, x);  // paid whether or not the minimizer stops
      } else {
        const double cont =
            kernel_expectation(lattice, i, k, strategy.at(i, k), next) +
            dt * payoff.running(t, x);
        val = std::min(payoff.upper(t, x), cont);
      }
      w[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = val;
    }
  }
  return w[0][0];
}

}  // namespace

DynkinBruteforceResult dynkin_bruteforce(const Lattice& lattice,
                                         const Strategy& strategy,
                                         const GamePayoff& payoff,
                                         std::uint64_t cap) {
  const std::uint64_t rules = rule_count_or_throw(lattice, cap);
  DynkinBruteforceResult res;
  res.infsup = std::numeric_limits<double>::infinity();
  res.supinf = -std::numeric_limits<double>::infinity();
  for (std::uint64_t idx = 0; idx < rules; ++idx) {
    const StoppingRule rule = rule_from_index(lattice, idx);
    const double vs = best_reply_value_sup(lattice, strategy, payoff, rule);
    if (vs < res.infsup) {
      res.infsup = vs;
      res.tau = rule;
    }
    const double vi = best_reply_value_inf(lattice, strategy, payoff, rule);
    if (vi > res.supinf) {
      res.supinf = vi;
      res.sigma = rule;
    }
  }
  return res;
}

UncertainGameValues uncertain_game_values(const Lattice& lattice,
                                          const VolatilityGrid& grid,
                                          const GamePayoff& payoff,
                                          std::uint64_t cap) {
  const auto strategies = enumerate_strategies(lattice, grid, cap);
  // per-strategy solves land in their own slots; the min/max reduction is
  // exact arithmetic, so the result does not depend on the schedule
  std::vector<NodeField> values(strategies.size());
  parallel_for(strategies.size(), [&](std::size_t s) {
    values[s] = dynkin_value_iteration(lattice, strategies[s], payoff);
  });
  UncertainGameValues out;
  out.upper = make_node_field(lattice,
                              -std::numeric_limits<double>::infinity());
  out.lower = make_node_field(lattice,
                              std::numeric_limits<double>::infinity());
  for (const NodeField& v : values)
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t k = 0; k < v[i].size(); ++k) {
        out.upper[i][k] = std::max(out.upper[i][k], v[i][k]);
        out.lower[i][k] = std::min(out.lower[i][k], v[i][k]);
      }
  return out;
}

EpsilonOptimalRules epsilon_optimal_times(
    const NodeField& upper_values,
    const std::vector<NodeField>& strategy_values, const GamePayoff& payoff,
    const Lattice& lattice, double epsilon) {
  if (!(epsilon > 0.0))
    throw InputError("epsilon_optimal_times: epsilon must be positive");

  EpsilonOptimalRules rules;
  rules.sigma = never_stop_rule(lattice);
  for (int i = 0; i < lattice.steps(); ++i) {
    const double t = lattice.time(i);
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const double x = lattice.state(i, k);
      if (upper_values[static_cast<std::size_t>(i)]
                      [static_cast<std::size_t>(k)] <=
          payoff.lower(t, x) + epsilon)
        rules.sigma.stop[static_cast<std::size_t>(i)]
                        [static_cast<std::size_t>(k)] = 1;
    }
  }
  for (const NodeField& y : strategy_values) {
    StoppingRule tau = never_stop_rule(lattice);
    for (int i = 0; i < lattice.steps(); ++i) {
      const double t = lattice.time(i);
      for (int k = 0; k < lattice.slice_size(i); ++k) {
        const double x = lattice.state(i, k);
        if (y[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] >=
            payoff.upper(t, x) - epsilon)
          tau.stop[static_cast<std::size_t>(i)]
                  [static_cast<std::size_t>(k)] = 1;
      }
    }
    rules.tau_per_strategy.push_back(std::move(tau));
  }
  return rules;
}

double gamma_interpolation_gap(const Lattice& lattice,
                               const VolatilityGrid& grid,
                               const Driver& driver, const TerminalFn& terminal,
                               const ObstaclePair& obstacles,
                               const Strategy& strategy, double gamma,
                               double contact_tol) {
  const SecondOrderSolution sol =
      solve_2drbsde(lattice, grid, driver, terminal, obstacles);
  const DrbsdeSolution per_strategy = solve_drbsde_reflected(
      lattice, strategy, driver, terminal, obstacles);
  const NodeField v = v_process(lattice, strategy, sol, driver);

  // replay the game: continuing collects dt*F plus the interpolated ledger
  // increment; the solved value is a fixed point for every gamma
  NodeField w = make_node_field(lattice);
  w.back() = sol.y.back();
  double gap = 0.0;
  for (int i = lattice.steps() - 1; i >= 0; --i) {
    const double t = lattice.time(i);
    const auto& next = w[static_cast<std::size_t>(i + 1)];
    for (int k = 0; k < lattice.slice_size(i); ++k) {
      const auto si = static_cast<std::size_t>(i);
      const auto sk = static_cast<std::size_t>(k);
      const double x = lattice.state(i, k);
      const double lo = obstacles.lower(t, x);
      const double up = obstacles.upper(t, x);
      const StepEval st =
          eval_step(lattice, i, k, strategy.at(i, k), next, driver, {});
      const double generator_term = st.candidate - st.expectation;
      const bool below_upper =
          per_strategy.y[si][sk] < up - contact_tol;
      const bool above_lower = sol.y[si][sk] > lo + contact_tol;
      const double kappa = gamma * (below_upper ? v[si][sk] : 0.0) +
                           (1.0 - gamma) * (above_lower ? v[si][sk] : 0.0);
      const double cont = st.expectation + generator_term + kappa;
      w[si][sk] = std::min(up, std::max(lo, cont));
      gap = std::max(gap, std::abs(w[si][sk] - sol.y[si][sk]));
    }
  }
  return gap;
}

}  // namespace drbsde
