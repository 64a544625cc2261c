#pragma once

#include <random>

#include "drbsde/driver.hpp"
#include "drbsde/dynkin.hpp"
#include "drbsde/lattice.hpp"
#include "drbsde/options.hpp"

namespace drbsde {

/// Platform-independent uniform draw on [0, 1).
double u01(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);
int uniform_int(std::mt19937_64& rng, int lo, int hi);  // inclusive bounds

/// Generator families for the seeded suites. Families with y or z
/// dependence keep dt*lipschitz_y and the z sensitivity small enough that
/// one backward step stays monotone in the next-slice values; the dynamic
/// programming identities tested here need that. StateTime and VolAffine
/// generators make the identities exact up to rounding.
enum class DriverKind { Zero, StateTime, VolAffine, LipschitzY, LipschitzYZ };

struct InstanceProfile {
  int min_steps = 2;
  int max_steps = 4;
  double min_horizon = 0.5;
  double max_horizon = 1.5;
  int vol_count = 2;  // 1 or 2
  DriverKind driver = DriverKind::VolAffine;
  bool wide_obstacles = false;
  /// Relaxes the terminal cap and lets the payoff overshoot the interior
  /// upper obstacle, forcing upper-contact nodes near maturity.
  bool forced_upper_contact = false;
  double max_overshoot = 0.8;
};

struct Instance {
  Lattice lattice;
  VolatilityGrid grid;
  Driver driver;
  TerminalFn terminal;
  ObstaclePair obstacles;
  Strategy strategy;  ///< one drawn strategy for per-measure operations
  double scale;       ///< payoff scale for tolerance normalization
};

Instance make_instance(std::mt19937_64& rng, const InstanceProfile& profile);

struct GameInstance {
  Lattice lattice;
  VolatilityGrid grid;
  GamePayoff payoff;
  Strategy strategy;
};

GameInstance make_game_instance(std::mt19937_64& rng,
                                const InstanceProfile& profile);

/// Pair ordered for the comparison theorems: the `big` instance dominates
/// nodewise (larger terminal, generator and both obstacles). Exactly one of
/// the obstacles is shared so the increment orderings can be checked.
struct OrderedPair {
  Instance big;
  Instance small;
  bool shared_upper = false;
  bool shared_lower = false;
};

OrderedPair make_ordered_pair(std::mt19937_64& rng,
                              const InstanceProfile& profile);

/// Deterministic two-level game with a convex payoff and wide obstacles;
/// its robust upper and lower values differ by well over 1e-3 at the root.
GameInstance strict_gap_game_instance();

/// Game put for the option suites: exercise (K - x)^+, flat penalty,
/// terminal equal to the exercise payoff.
GameOptionSpec make_game_put(double strike, double penalty);

}  // namespace drbsde
