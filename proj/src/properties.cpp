#include "drbsde/properties.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "drbsde/doob_meyer.hpp"
#include "drbsde/errors.hpp"
#include "drbsde/penalized.hpp"
#include "drbsde/reflected.hpp"
#include "drbsde/second_order.hpp"
#include "drbsde/step.hpp"
#include "drbsde/tree_oracle.hpp"

namespace drbsde {

void PropertyResult::record(double deviation) {
  max_deviation = std::max(max_deviation, deviation);
  if (deviation > tolerance) pass = false;
}

void PropertyResult::fail(const std::string& note) {
  pass = false;
  notes.push_back(note);
}

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

DriverKind rotate_kind(int i) {
  switch (i % 5) {
    case 0: return DriverKind::VolAffine;
    case 1: return DriverKind::StateTime;
    case 2: return DriverKind::LipschitzY;
    case 3: return DriverKind::LipschitzYZ;
    default: return DriverKind::Zero;
  }
}

InstanceProfile base_profile(const SuiteConfig& cfg) {
  InstanceProfile p;
  p.min_steps = cfg.min_steps;
  p.max_steps = cfg.max_steps;
  p.vol_count = cfg.vol_count;
  return p;
}

std::string instance_note(const char* what, int index) {
  std::ostringstream os;
  os << what << " (instance " << index << ")";
  return os.str();
}

}  // namespace

PropertyResult prop_reduction(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "reduction";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.vol_count = 1;
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = rotate_kind(i);
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution upper = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    const Strategy only = constant_strategy(inst.lattice, 0);
    const DrbsdeSolution d = solve_drbsde_reflected(
        inst.lattice, only, inst.driver, inst.terminal, inst.obstacles);
    res.record(max_abs_diff(upper.y, d.y));
    // the lower envelope collapses onto the same solution
    const SecondOrderSolution lower = solve_2drbsde_lower(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    res.record(max_abs_diff(lower.y, d.y));
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_representation(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "representation";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = rotate_kind(i);
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);

    // through maturity: nodewise envelope of the per-strategy solves
    NodeField envelope = make_node_field(
        inst.lattice, -std::numeric_limits<double>::infinity());
    envelope.back() = sol.y.back();
    const std::vector<Strategy> strategies =
        enumerate_strategies(inst.lattice, inst.grid, cfg.cap);
    for (const Strategy& strat : strategies) {
      const DrbsdeSolution d = solve_drbsde_reflected(
          inst.lattice, strat, inst.driver, inst.terminal, inst.obstacles);
      for (std::size_t s = 0; s + 1 < envelope.size(); ++s)
        for (std::size_t k = 0; k < envelope[s].size(); ++k)
          envelope[s][k] = std::max(envelope[s][k], d.y[s][k]);
    }
    res.record(max_abs_diff(envelope, sol.y));

    // one-step checkpoint: the recursion against its own next slice
    for (int s = 0; s < inst.lattice.steps(); ++s) {
      const double t = inst.lattice.time(s);
      for (int k = 0; k < inst.lattice.slice_size(s); ++k) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < inst.grid.size(); ++j)
          best = std::max(
              best, eval_step(inst.lattice, s, k, j,
                              sol.y[static_cast<std::size_t>(s + 1)],
                              inst.driver, {})
                        .candidate);
        const double x = inst.lattice.state(s, k);
        const double clamped =
            std::min(inst.obstacles.upper(t, x),
                     std::max(inst.obstacles.lower(t, x), best));
        res.record(std::abs(clamped -
                            sol.y[static_cast<std::size_t>(s)]
                                 [static_cast<std::size_t>(k)]));
      }
    }
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_minimum_condition(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "minimum_condition";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  for (int i = 0; i < cfg.instances; ++i) {
    // the exhaustive conditional minimum is exact for generators that do
    // not read (y, z)
    profile.driver = (i % 2 == 0) ? DriverKind::VolAffine
                                  : DriverKind::StateTime;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    for (int t = 0; t < inst.lattice.steps(); ++t) {
      const MinimumConditionReport report = check_minimum_condition(
          inst.lattice, inst.grid, sol, inst.driver, inst.obstacles, t,
          cfg.cap);
      res.record(report.max_abs_gap);
    }
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_skorohod(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "skorohod";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = rotate_kind(i);
    profile.forced_upper_contact = (i % 2 == 0);
    const Instance inst = make_instance(rng, profile);
    const DrbsdeSolution d = solve_drbsde_reflected(
        inst.lattice, inst.strategy, inst.driver, inst.terminal,
        inst.obstacles);
    const SkorohodReport report = check_skorohod(inst.lattice, d,
                                                 inst.obstacles);
    res.record(report.max_complementarity);
    res.record(report.max_obstacle_violation);
    res.record(report.max_simultaneous);
    for (std::size_t s = 0; s < d.dk_plus.size(); ++s)
      for (std::size_t k = 0; k < d.dk_plus[s].size(); ++k) {
        res.record(std::max(-d.dk_plus[s][k], 0.0));
        res.record(std::max(-d.dk_minus[s][k], 0.0));
      }

    if (profile.forced_upper_contact) {
      // the penalized runs overshoot the upper obstacle less as n grows
      auto violation = [&](double n) {
        const PenalizedSolution p = solve_drbsde_penalized(
            inst.lattice, inst.strategy, inst.driver, inst.terminal,
            inst.obstacles, n);
        double worst = 0.0;
        for (int s = 0; s < inst.lattice.steps(); ++s) {
          const double t = inst.lattice.time(s);
          for (int k = 0; k < inst.lattice.slice_size(s); ++k)
            worst = std::max(
                worst,
                p.y[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] -
                    inst.obstacles.upper(t, inst.lattice.state(s, k)));
        }
        return worst;
      };
      const double v10 = violation(10.0);
      const double v1000 = violation(1000.0);
      if (v1000 > v10 + 1e-12)
        res.fail(instance_note("penalized violation did not shrink", i));
    }
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_decomposition(const SuiteConfig& cfg, double recon_tol,
                                  double contact_tol) {
  Timer timer;
  PropertyResult res;
  res.name = "decomposition";
  res.tolerance = recon_tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.forced_upper_contact = true;
  for (int i = 0; i < cfg.instances; ++i) {
    profile.vol_count = (i % 2 == 0) ? 1 : cfg.vol_count;
    profile.driver = (i % 2 == 0) ? rotate_kind(i) : DriverKind::Zero;
    const Instance inst = make_instance(rng, profile);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);

    // the recorded extremal strategy attains the envelope, so its ledger
    // matches the companion solve exactly on contact nodes
    const Strategy star = extremal_strategy(inst.lattice, sol);
    const DrbsdeSolution companion = solve_drbsde_reflected(
        inst.lattice, star, inst.driver, inst.terminal, inst.obstacles);
    const NodeField v = v_process(inst.lattice, star, sol, inst.driver);
    VLedger ledger;
    try {
      ledger = decompose_v(inst.lattice, v, companion, inst.obstacles,
                           1e-9, 1e-9);
    } catch (const NumericsError& e) {
      res.fail(instance_note(e.what(), i));
      continue;
    }

    double contact_mismatch = 0.0;
    double worst_recon = 0.0;
    double worst_overlap = 0.0;
    double worst_negative = 0.0;
    double worst_jordan = 0.0;
    for (int s = 0; s < inst.lattice.steps(); ++s) {
      const double t = inst.lattice.time(s);
      for (int k = 0; k < inst.lattice.slice_size(s); ++k) {
        const auto si = static_cast<std::size_t>(s);
        const auto sk = static_cast<std::size_t>(k);
        worst_recon = std::max(
            worst_recon, std::abs(v[si][sk] - (ledger.v_plus[si][sk] -
                                               ledger.k_plus[si][sk])));
        worst_overlap = std::max(
            worst_overlap,
            std::abs(ledger.v_plus[si][sk] * ledger.k_plus[si][sk]));
        worst_negative =
            std::max({worst_negative, -ledger.v_plus[si][sk],
                      -ledger.k_plus[si][sk]});
        worst_jordan = std::max(
            worst_jordan,
            std::abs(std::abs(v[si][sk]) - (ledger.v_plus[si][sk] +
                                            ledger.k_plus[si][sk])));
        const double up = inst.obstacles.upper(t, inst.lattice.state(s, k));
        if (std::abs(companion.y[si][sk] - up) <= 1e-9)
          contact_mismatch = std::max(
              contact_mismatch,
              std::abs(ledger.k_plus[si][sk] - companion.dk_plus[si][sk]));
      }
    }
    res.record(worst_recon);
    res.record(worst_overlap);
    res.record(worst_negative);
    res.record(worst_jordan);
    if (contact_mismatch > contact_tol)
      res.fail(instance_note("contact nodes disagree with companion", i));

    // every strategy's ledger reconstructs and splits disjointly
    if (inst.lattice.steps() <= 2 && profile.driver == DriverKind::Zero) {
      for (const Strategy& strat :
           enumerate_strategies(inst.lattice, inst.grid, cfg.cap)) {
        const DrbsdeSolution comp = solve_drbsde_reflected(
            inst.lattice, strat, inst.driver, inst.terminal, inst.obstacles);
        const NodeField vs = v_process(inst.lattice, strat, sol, inst.driver);
        try {
          const VLedger led =
              decompose_v(inst.lattice, vs, comp, inst.obstacles, 1e-9, 1e-9);
          res.record(max_abs_diff(
              vs, [&] {
                NodeField recon = led.v_plus;
                for (std::size_t s = 0; s < recon.size(); ++s)
                  for (std::size_t k = 0; k < recon[s].size(); ++k)
                    recon[s][k] -= led.k_plus[s][k];
                return recon;
              }()));
        } catch (const NumericsError& e) {
          res.fail(instance_note(e.what(), i));
          break;
        }
      }
    }
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_comparison(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "comparison";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = (i % 2 == 0) ? DriverKind::LipschitzY
                                  : DriverKind::StateTime;
    const OrderedPair pair = make_ordered_pair(rng, profile);
    const DrbsdeSolution big = solve_drbsde_reflected(
        pair.big.lattice, pair.big.strategy, pair.big.driver,
        pair.big.terminal, pair.big.obstacles);
    const DrbsdeSolution small = solve_drbsde_reflected(
        pair.small.lattice, pair.small.strategy, pair.small.driver,
        pair.small.terminal, pair.small.obstacles);
    for (std::size_t s = 0; s < big.y.size(); ++s)
      for (std::size_t k = 0; k < big.y[s].size(); ++k) {
        res.record(small.y[s][k] - big.y[s][k]);
        if (pair.shared_upper)
          res.record(small.dk_plus[s][k] - big.dk_plus[s][k]);
        if (pair.shared_lower)
          res.record(big.dk_minus[s][k] - small.dk_minus[s][k]);
      }

    const SecondOrderSolution big2 =
        solve_2drbsde(pair.big.lattice, pair.big.grid, pair.big.driver,
                      pair.big.terminal, pair.big.obstacles);
    const SecondOrderSolution small2 =
        solve_2drbsde(pair.small.lattice, pair.small.grid, pair.small.driver,
                      pair.small.terminal, pair.small.obstacles);
    for (std::size_t s = 0; s < big2.y.size(); ++s)
      for (std::size_t k = 0; k < big2.y[s].size(); ++k)
        res.record(small2.y[s][k] - big2.y[s][k]);
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_dynkin_equivalence(const SuiteConfig& cfg, double tol,
                                       const std::vector<double>& epsilons) {
  Timer timer;
  PropertyResult res;
  res.name = "saddle";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.min_steps = std::max(1, std::min(cfg.min_steps, 4));
  profile.max_steps = std::min(cfg.max_steps, 4);
  for (int i = 0; i < cfg.instances; ++i) {
    const GameInstance game = make_game_instance(rng, profile);
    const NodeField vi =
        dynkin_value_iteration(game.lattice, game.strategy, game.payoff);
    const DynkinBruteforceResult bf =
        dynkin_bruteforce(game.lattice, game.strategy, game.payoff, cfg.cap);
    res.record(std::abs(vi[0][0] - bf.infsup));
    res.record(std::abs(bf.infsup - bf.supinf));

    for (double eps : epsilons) {
      const EpsilonOptimalRules rules =
          epsilon_optimal_times(vi, {vi}, game.payoff, game.lattice, eps);
      const NodeField played =
          evaluate_stopping_pair(game.lattice, game.strategy, game.payoff,
                                 rules.tau_per_strategy[0], rules.sigma);
      if (std::abs(played[0][0] - vi[0][0]) > eps + 1e-12)
        res.fail(instance_note("epsilon-optimal pair misses the value", i));
    }

    // replaying with the gamma-interpolated ledger correction returns the
    // robust value for every interpolation weight
    const ObstaclePair obstacles = obstacles_of(game.payoff);
    const Driver driver = driver_of(game.payoff);
    for (double gamma : {0.0, 0.5, 1.0})
      res.record(gamma_interpolation_gap(game.lattice, game.grid, driver,
                                         game.payoff.terminal, obstacles,
                                         game.strategy, gamma));
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_min_max_exchange(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "min_max_exchange";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.max_steps = std::min(cfg.max_steps, 3);
  for (int i = 0; i < cfg.instances; ++i) {
    const GameInstance game = make_game_instance(rng, profile);
    const ObstaclePair obstacles = obstacles_of(game.payoff);
    const Driver driver = driver_of(game.payoff);
    const UncertainGameValues values = uncertain_game_values(
        game.lattice, game.grid, game.payoff, cfg.cap);
    const SecondOrderSolution upper = solve_2drbsde(
        game.lattice, game.grid, driver, game.payoff.terminal, obstacles);
    const SecondOrderSolution lower = solve_2drbsde_lower(
        game.lattice, game.grid, driver, game.payoff.terminal, obstacles);

    const double dev_up = std::abs(values.upper[0][0] - upper.y[0][0]);
    const double dev_low = std::abs(values.lower[0][0] - lower.y[0][0]);

    // the other extremization order: outer stopping rule against the
    // adversarial (resp. friendly) measure and inner stopper
    const int marks = game.lattice.non_terminal_node_count();
    const std::uint64_t rules = std::uint64_t{1} << marks;
    if (rules * rules > cfg.cap)
      throw CapError("exchange check: rule pair count exceeds cap");
    const double dt = game.lattice.dt();
    double infsup = std::numeric_limits<double>::infinity();
    double supinf = -std::numeric_limits<double>::infinity();
    const std::vector<double> xi =
        terminal_values_of(game.lattice, game.payoff.terminal);
    for (std::uint64_t mask = 0; mask < rules; ++mask) {
      const StoppingRule rule = rule_from_index(game.lattice, mask);
      std::vector<double> wmax = xi;
      std::vector<double> wmin = xi;
      for (int s = game.lattice.steps() - 1; s >= 0; --s) {
        const double t = game.lattice.time(s);
        std::vector<double> cmax(
            static_cast<std::size_t>(game.lattice.slice_size(s)));
        std::vector<double> cmin(cmax.size());
        for (int k = 0; k < game.lattice.slice_size(s); ++k) {
          const double x = game.lattice.state(s, k);
          if (rule.stops(s, k)) {
            cmax[static_cast<std::size_t>(k)] = game.payoff.upper(t, x);
            cmin[static_cast<std::size_t>(k)] = game.payoff.lower(t, x);
          } else {
            double emax = -std::numeric_limits<double>::infinity();
            double emin = std::numeric_limits<double>::infinity();
            for (int j = 0; j < game.grid.size(); ++j) {
              emax = std::max(emax,
                              kernel_expectation(game.lattice, s, k, j, wmax));
              emin = std::min(emin,
                              kernel_expectation(game.lattice, s, k, j, wmin));
            }
            cmax[static_cast<std::size_t>(k)] = std::max(
                game.payoff.lower(t, x), emax + dt * game.payoff.running(t, x));
            cmin[static_cast<std::size_t>(k)] = std::min(
                game.payoff.upper(t, x), emin + dt * game.payoff.running(t, x));
          }
        }
        wmax = std::move(cmax);
        wmin = std::move(cmin);
      }
      infsup = std::min(infsup, wmax[0]);
      supinf = std::max(supinf, wmin[0]);
    }
    const double dev_exchange = std::max(std::abs(infsup - upper.y[0][0]),
                                         std::abs(supinf - lower.y[0][0]));

    const double dev =
        std::max({dev_up, dev_low, dev_exchange});
    res.max_deviation = std::max(res.max_deviation, dev);
    res.instances += 1;
    if (dev > tol) {
      std::ostringstream os;
      os << "finding: exchange gap " << dev << " on instance " << i
         << " (the identity is assumed, not proved; recorded, not failed)";
      res.notes.push_back(os.str());
    }
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_penalization(const SuiteConfig& cfg,
                                 const std::vector<double>& levels,
                                 double final_error_bound) {
  Timer timer;
  PropertyResult res;
  res.name = "penalization";
  res.tolerance = final_error_bound;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.forced_upper_contact = true;
  profile.min_steps = 2;
  profile.max_steps = std::min(cfg.max_steps, 3);
  profile.min_horizon = 1.0;  // keeps n*dt large at the top level
  profile.driver = DriverKind::Zero;
  for (int i = 0; i < cfg.instances; ++i) {
    const Instance inst = make_instance(rng, profile);
    const DrbsdeSolution ref = solve_drbsde_reflected(
        inst.lattice, inst.strategy, inst.driver, inst.terminal,
        inst.obstacles);
    std::vector<double> roots;
    for (double n : levels)
      roots.push_back(solve_drbsde_penalized(inst.lattice, inst.strategy,
                                             inst.driver, inst.terminal,
                                             inst.obstacles, n)
                          .y[0][0]);
    for (std::size_t j = 0; j + 1 < roots.size(); ++j)
      if (roots[j + 1] > roots[j] + 1e-12)
        res.fail(instance_note("roots not monotone in the penalty level", i));
    for (double r : roots)
      if (r < ref.y[0][0] - 1e-12)
        res.fail(instance_note("penalized root below the reflected value", i));
    const double err_early = std::abs(roots[1] - ref.y[0][0]);
    const double err_last = std::abs(roots.back() - ref.y[0][0]);
    if (!(err_last < err_early))
      res.fail(instance_note("error trend not improving", i));
    res.record(err_last);
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_doob_meyer(const SuiteConfig& cfg,
                               const std::vector<double>& schedule,
                               double residual_tol, double exact_tol) {
  Timer timer;
  PropertyResult res;
  res.name = "doob_meyer";
  res.tolerance = residual_tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = (i % 2 == 0) ? DriverKind::StateTime
                                  : DriverKind::VolAffine;
    const Instance inst = make_instance(rng, profile);
    const DrbsdeSolution base = solve_drbsde_reflected(
        inst.lattice, inst.strategy, inst.driver, inst.terminal,
        inst.obstacles);

    try {
      // an exact solution decomposes with no compensating mass
      const SupermartingaleDecomposition exact = decompose_supermartingale(
          inst.lattice, inst.strategy, inst.driver, base.y, schedule,
          inst.obstacles);
      if (max_abs(exact.v) > exact_tol)
        res.fail(instance_note("exact solution produced compensating mass", i));
      if (exact.residual > exact_tol)
        res.fail(instance_note("exact solution left a residual", i));

      // shifted-and-capped supermartingale
      const double c = uniform(rng, 0.1, 0.5);
      NodeField target = base.y;
      for (int s = 0; s < inst.lattice.slice_count(); ++s) {
        const double t = inst.lattice.time(s);
        for (int k = 0; k < inst.lattice.slice_size(s); ++k)
          target[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] =
              std::min(inst.obstacles.upper(t, inst.lattice.state(s, k)),
                       base.y[static_cast<std::size_t>(s)]
                             [static_cast<std::size_t>(k)] +
                           c);
      }
      const SupermartingaleDecomposition dec = decompose_supermartingale(
          inst.lattice, inst.strategy, inst.driver, target, schedule,
          inst.obstacles);
      res.record(dec.residual);
      for (std::size_t s = 0; s < dec.v.size(); ++s)
        for (double vv : dec.v[s])
          if (vv < 0.0)
            res.fail(instance_note("negative compensating increment", i));
      for (std::size_t j = 0; j + 1 < dec.residual_trail.size(); ++j)
        if (dec.residual_trail[j + 1] >
            dec.residual_trail[j] * (1.0 + 1e-9) + 1e-12)
          res.fail(instance_note("residual trail not decreasing", i));
    } catch (const NumericsError& e) {
      res.fail(instance_note(e.what(), i));
    }
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_uncertain_game(const SuiteConfig& cfg, double tol,
                                   double strict_gap) {
  Timer timer;
  PropertyResult res;
  res.name = "uncertain_game";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.max_steps = std::min(cfg.max_steps, 3);
  for (int i = 0; i < cfg.instances; ++i) {
    const GameInstance game = make_game_instance(rng, profile);
    const ObstaclePair obstacles = obstacles_of(game.payoff);
    const Driver driver = driver_of(game.payoff);
    const UncertainGameValues values = uncertain_game_values(
        game.lattice, game.grid, game.payoff, cfg.cap);
    const SecondOrderSolution upper = solve_2drbsde(
        game.lattice, game.grid, driver, game.payoff.terminal, obstacles);
    const SecondOrderSolution lower = solve_2drbsde_lower(
        game.lattice, game.grid, driver, game.payoff.terminal, obstacles);
    res.record(std::abs(values.upper[0][0] - upper.y[0][0]));
    res.record(std::abs(values.lower[0][0] - lower.y[0][0]));
    for (std::size_t s = 0; s < values.upper.size(); ++s)
      for (std::size_t k = 0; k < values.upper[s].size(); ++k)
        res.record(values.lower[s][k] - values.upper[s][k]);
    ++res.instances;
  }

  const GameInstance gap_game = strict_gap_game_instance();
  const UncertainGameValues gap_values = uncertain_game_values(
      gap_game.lattice, gap_game.grid, gap_game.payoff, cfg.cap);
  if (gap_values.upper[0][0] - gap_values.lower[0][0] < strict_gap)
    res.fail("constructed instance lacks a strict value gap");
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_game_option(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "game_option";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);

  // no-cancellation limit of the single-measure game put
  {
    VolatilityGrid grid({0.3});
    Lattice lattice = build_lattice(1.0, 4, 1.0, grid);
    const NodeField american = american_reference(
        lattice, grid, make_game_put(1.0, 0.02));
    double previous = -std::numeric_limits<double>::infinity();
    double first_gap = 0.0, last_gap = 0.0;
    double penalty = 0.02;
    for (int round = 0; round < 4; ++round) {
      const PriceInterval interval =
          price_game_option(lattice, grid, make_game_put(1.0, penalty));
      if (interval.super < previous - 1e-12)
        res.fail("game put price decreased along the penalty schedule");
      if (interval.super > american[0][0] + 1e-12)
        res.fail("game put price exceeded the no-cancellation value");
      const double gap = american[0][0] - interval.super;
      if (round == 0) first_gap = gap;
      last_gap = gap;
      previous = interval.super;
      penalty *= 10.0;
    }
    if (!(last_gap < first_gap))
      res.fail("penalty schedule did not approach the no-cancellation value");
  }

  // hedge sanity: linear claim carries unit exposure, constant claims none
  {
    VolatilityGrid grid({0.25});
    Lattice lattice = build_lattice(1.0, 4, 0.5, grid);
    GameOptionSpec linear;
    linear.exercise_payoff = [](double, double x) { return x - 5.0; };
    linear.penalty = [](double, double) { return 10.0; };
    linear.terminal_payoff = [](double x) { return x; };
    linear.funding_driver = zero_driver();
    linear.penalty_floor = 10.0;
    const PriceInterval priced = price_game_option(lattice, grid, linear);
    const NodeField hedge = hedge_strategy(priced.upper_solution, lattice);
    for (int s = 0; s < lattice.steps(); ++s)
      for (int k = 0; k < lattice.slice_size(s); ++k)
        res.record(std::abs(hedge[static_cast<std::size_t>(s)]
                                 [static_cast<std::size_t>(k)] -
                            1.0));

    GameOptionSpec constant = linear;
    constant.exercise_payoff = [](double, double) { return -3.0; };
    constant.terminal_payoff = [](double) { return 0.0; };
    const PriceInterval flat = price_game_option(lattice, grid, constant);
    res.record(max_abs(hedge_strategy(flat.upper_solution, lattice)));
    res.record(std::abs(flat.super));
    res.record(std::abs(flat.sub));
  }

  // interval ordering on seeded two-level instances
  for (int i = 0; i < cfg.instances; ++i) {
    const double sigma_lo = uniform(rng, 0.12, 0.2);
    VolatilityGrid grid({sigma_lo, uniform(rng, 1.5, 2.5) * sigma_lo});
    const int steps = uniform_int(rng, 2, std::min(cfg.max_steps, 4));
    const double x0 = uniform(rng, 0.8, 1.2);
    Lattice lattice = build_lattice(uniform(rng, 0.5, 1.5), steps, x0, grid);
    const GameOptionSpec spec = make_game_put(
        uniform(rng, x0 - 0.3, x0 + 0.3), uniform(rng, 0.05, 0.5));
    const PriceInterval interval = price_game_option(lattice, grid, spec);
    for (std::size_t s = 0; s < interval.upper_solution.y.size(); ++s)
      for (std::size_t k = 0; k < interval.upper_solution.y[s].size(); ++k)
        res.record(interval.lower_solution.y[s][k] -
                   interval.upper_solution.y[s][k]);
    if (interval.super - interval.sub < 1e-12) {
      std::ostringstream os;
      os << "zero price gap with two levels on instance " << i
         << " (allowed boundary case)";
      res.notes.push_back(os.str());
    }

    // a pointwise larger penalty never cheapens the superhedge
    GameOptionSpec wider = spec;
    auto pen = spec.penalty;
    wider.penalty = [pen](double t, double x) { return 2.0 * pen(t, x); };
    wider.penalty_floor = 2.0 * spec.penalty_floor;
    const PriceInterval wide_interval =
        price_game_option(lattice, grid, wider);
    res.record(interval.super - wide_interval.super);
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

PropertyResult prop_markov_sufficiency(const SuiteConfig& cfg, double tol) {
  Timer timer;
  PropertyResult res;
  res.name = "markov_sufficiency";
  res.tolerance = tol;
  std::mt19937_64 rng(cfg.seed);
  InstanceProfile profile = base_profile(cfg);
  profile.min_steps = std::min(cfg.min_steps, 3);
  profile.max_steps = std::min(cfg.max_steps, 3);
  for (int i = 0; i < cfg.instances; ++i) {
    profile.driver = (i % 2 == 0) ? DriverKind::VolAffine
                                  : DriverKind::StateTime;
    const Instance inst = make_instance(rng, profile);
    const double tree_value = tree_sup_reflected_value(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles,
        cfg.cap);
    const SecondOrderSolution sol = solve_2drbsde(
        inst.lattice, inst.grid, inst.driver, inst.terminal, inst.obstacles);
    res.record(std::abs(tree_value - sol.y[0][0]));

    const GameInstance game = make_game_instance(rng, profile);
    const TreeDynkinResult tree = tree_dynkin_values(
        game.lattice, game.strategy, game.payoff, cfg.cap);
    const NodeField vi =
        dynkin_value_iteration(game.lattice, game.strategy, game.payoff);
    res.record(std::abs(tree.infsup - vi[0][0]));
    res.record(std::abs(tree.supinf - vi[0][0]));
    ++res.instances;
  }
  res.elapsed_seconds = timer.seconds();
  return res;
}

}  // namespace drbsde
