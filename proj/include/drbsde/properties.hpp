#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drbsde/instances.hpp"

namespace drbsde {

struct PropertyResult {
  std::string name;
  bool pass = true;
  int instances = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  double elapsed_seconds = 0.0;
  std::vector<std::string> notes;

  void record(double deviation);
  void fail(const std::string& note);
};

/// Common sizing for the seeded suites; per-suite code overrides the
/// driver family or obstacle style where an identity requires it.
struct SuiteConfig {
  std::uint64_t seed = 1;
  int instances = 200;
  int min_steps = 2;
  int max_steps = 4;
  int vol_count = 2;
  std::uint64_t cap = 10'000'000'000ULL;
};

/// Singleton-measure reduction: the second-order solve equals the plain
/// doubly reflected solve nodewise.
PropertyResult prop_reduction(const SuiteConfig& cfg, double tol);

/// Root and nodewise representation: the second-order value is the max of
/// the per-strategy values, both one-step and through maturity.
PropertyResult prop_representation(const SuiteConfig& cfg, double tol);

/// Exhaustive minimum condition at every non-terminal slice.
PropertyResult prop_minimum_condition(const SuiteConfig& cfg, double tol);

/// Complementarity, obstacle bounds and disjoint pushing on reflected
/// solutions; penalized runs report a shrinking upper-obstacle violation.
PropertyResult prop_skorohod(const SuiteConfig& cfg, double tol);

/// Jordan split of the ledger increments on upper-contact instances,
/// including agreement with the companion reflected solve on contact nodes.
PropertyResult prop_decomposition(const SuiteConfig& cfg, double recon_tol,
                                  double contact_tol);

/// Nodewise value and increment orderings on ordered instance pairs, for
/// both the per-strategy and the second-order solves.
PropertyResult prop_comparison(const SuiteConfig& cfg, double tol);

/// Game value identities under one strategy: value iteration vs exhaustive
/// inf-sup/sup-inf, near-optimal stopping pairs, and invariance of the
/// ledger-corrected replay in the interpolation weight.
PropertyResult prop_dynkin_equivalence(const SuiteConfig& cfg, double tol,
                                       const std::vector<double>& epsilons);

/// Robust game values against the second-order solves, interval ordering,
/// and the exhaustive exchange of extremization orders. An exchange
/// violation is reported as a finding in the notes.
PropertyResult prop_min_max_exchange(const SuiteConfig& cfg, double tol);

/// Monotone approach of the penalized solves to the reflected one.
PropertyResult prop_penalization(const SuiteConfig& cfg,
                                 const std::vector<double>& levels,
                                 double final_error_bound);

/// Decomposition of perturbed supermartingales along a penalty schedule;
/// exact solutions decompose with no compensating mass.
PropertyResult prop_doob_meyer(const SuiteConfig& cfg,
                               const std::vector<double>& schedule,
                               double residual_tol, double exact_tol);

/// Uncertain game values vs the second-order solves, interval ordering,
/// and a constructed strict-gap instance.
PropertyResult prop_uncertain_game(const SuiteConfig& cfg, double tol,
                                   double strict_gap);

/// Price interval ordering, the no-cancellation limit of the game put, and
/// hedge sanity on constant and linear claims.
PropertyResult prop_game_option(const SuiteConfig& cfg, double tol);

/// Path-dependent tree enumeration vs the recombining-lattice values.
PropertyResult prop_markov_sufficiency(const SuiteConfig& cfg, double tol);

}  // namespace drbsde
