#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drbsde/driver.hpp"
#include "drbsde/options.hpp"

namespace drbsde {

struct ModelConfig {
  double horizon = 1.0;
  int steps = 3;
  double x0 = 0.0;
  std::vector<double> vol_levels{0.2};
  double stretch = 1.0;
};

struct Tolerances {
  double reduction = 1e-12;
  double representation = 1e-10;
  double minimum_condition = 1e-9;
  double skorohod = 1e-12;
  double decomposition = 1e-12;
  double comparison = 1e-12;
  double saddle = 1e-10;
  double min_max = 1e-10;
  double boundary_epsilon = 1e-2;
};

/// Problem payload built from the named built-ins in the configuration.
struct ProblemConfig {
  Driver driver;
  TerminalFn terminal;
  ObstaclePair obstacles;
  std::optional<GameOptionSpec> option;  // price mode requires it
  std::vector<double> penalty_schedule{1.0, 10.0, 100.0, 1000.0};
};

struct RunConfig {
  std::string mode;  // solve | price | verify | oracle
  ModelConfig model;
  ProblemConfig problem;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::uint64_t cap = 10'000'000'000ULL;
  int verify_instances = 200;
  int oracle_instances = 20;
  std::string out_dir = ".";
};

/// Parses and validates a configuration file. Throws InputError with a
/// message anchored to the offending key (or byte position for syntax
/// errors).
RunConfig parse_config(const std::string& path);

/// Runs one configured pipeline, writing outputs under cfg.out_dir.
/// Returns the process exit status: 0 success, 3 enumeration cap exceeded,
/// 4 property failure in verify mode.
int run(const RunConfig& cfg);

}  // namespace drbsde
