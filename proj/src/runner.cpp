#include <cstdio>
#include <filesystem>
#include <sstream>

#include "drbsde/config.hpp"
#include "drbsde/doob_meyer.hpp"
#include "drbsde/dynkin.hpp"
#include "drbsde/errors.hpp"
#include "drbsde/io.hpp"
#include "drbsde/properties.hpp"
#include "drbsde/second_order.hpp"

namespace drbsde {

namespace {

struct BuiltModel {
  Lattice lattice;
  VolatilityGrid grid;
};

BuiltModel build_model(const ModelConfig& m) {
  VolatilityGrid grid(m.vol_levels);
  Lattice lattice = build_lattice(m.horizon, m.steps, m.x0, grid, m.stretch);
  return BuiltModel{std::move(lattice), std::move(grid)};
}

JsonValue model_json(const ModelConfig& m) {
  JsonValue j = JsonValue::object();
  j.set("horizon", JsonValue::number(m.horizon));
  j.set("steps", JsonValue::integer(m.steps));
  j.set("x0", JsonValue::number(m.x0));
  JsonValue levels = JsonValue::array();
  for (double v : m.vol_levels) levels.push(JsonValue::number(v));
  j.set("vol_levels", std::move(levels));
  j.set("stretch", JsonValue::number(m.stretch));
  return j;
}

std::string out_path(const RunConfig& cfg, const char* file) {
  return (std::filesystem::path(cfg.out_dir) / file).string();
}

int run_solve(const RunConfig& cfg) {
  if (!cfg.problem.terminal)
    throw InputError("solve mode requires problem.terminal");
  if (!cfg.problem.obstacles.lower || !cfg.problem.obstacles.upper)
    throw InputError("solve mode requires problem.obstacles");
  const BuiltModel model = build_model(cfg.model);

  const SecondOrderSolution sol =
      solve_2drbsde(model.lattice, model.grid, cfg.problem.driver,
                    cfg.problem.terminal, cfg.problem.obstacles);
  const Strategy star = extremal_strategy(model.lattice, sol);
  const DrbsdeSolution companion = solve_drbsde_reflected(
      model.lattice, star, cfg.problem.driver, cfg.problem.terminal,
      cfg.problem.obstacles);
  const NodeField v = v_process(model.lattice, star, sol, cfg.problem.driver);
  const VLedger ledger =
      decompose_v(model.lattice, v, companion, cfg.problem.obstacles);
  const SkorohodReport skorohod =
      check_skorohod(model.lattice, companion, cfg.problem.obstacles);

  CsvTable nodes({"slice", "state_index", "state", "Y", "Z", "argmax_vol",
                  "v", "v_plus", "k_plus", "dk_minus"});
  for (int s = 0; s < model.lattice.slice_count(); ++s)
    for (int k = 0; k < model.lattice.slice_size(s); ++k) {
      const auto si = static_cast<std::size_t>(s);
      const auto sk = static_cast<std::size_t>(k);
      nodes.row({std::to_string(s), std::to_string(k),
                 fmt17(model.lattice.state(s, k)), fmt17(sol.y[si][sk]),
                 fmt17(sol.z[si][sk]), std::to_string(sol.argmax_vol[si][sk]),
                 fmt17(v[si][sk]), fmt17(ledger.v_plus[si][sk]),
                 fmt17(ledger.k_plus[si][sk]),
                 fmt17(companion.dk_minus[si][sk])});
    }

  double z_spread_max = 0.0;
  for (const auto& row : sol.z_spread)
    for (double zsp : row) z_spread_max = std::max(z_spread_max, zsp);

  JsonValue summary = JsonValue::object();
  summary.set("mode", JsonValue::string("solve"));
  summary.set("seed", JsonValue::integer(static_cast<long long>(cfg.seed)));
  summary.set("model", model_json(cfg.model));
  JsonValue root = JsonValue::object();
  root.set("y", JsonValue::number(sol.y[0][0]));
  root.set("z", JsonValue::number(sol.z[0][0]));
  root.set("argmax_vol", JsonValue::integer(sol.argmax_vol[0][0]));
  summary.set("root", std::move(root));
  JsonValue sk = JsonValue::object();
  sk.set("max_complementarity", JsonValue::number(skorohod.max_complementarity));
  sk.set("max_obstacle_violation",
         JsonValue::number(skorohod.max_obstacle_violation));
  sk.set("max_simultaneous", JsonValue::number(skorohod.max_simultaneous));
  sk.set("passes",
         JsonValue::boolean(skorohod.passes(cfg.tolerances.skorohod)));
  summary.set("skorohod", std::move(sk));
  summary.set("hedge_spread_across_levels_max", JsonValue::number(z_spread_max));

  write_file(out_path(cfg, "nodes.csv"), nodes.dump());
  write_file(out_path(cfg, "summary.json"), summary.dump());
  std::printf("solve: root value %s (hedge %s)\n", fmt17(sol.y[0][0]).c_str(),
              fmt17(sol.z[0][0]).c_str());
  return 0;
}

int run_price(const RunConfig& cfg) {
  if (!cfg.problem.option)
    throw InputError("price mode requires problem.option");
  const BuiltModel model = build_model(cfg.model);
  const GameOptionSpec& spec = *cfg.problem.option;

  const PriceInterval interval =
      price_game_option(model.lattice, model.grid, spec);
  const Strategy star = extremal_strategy(model.lattice,
                                          interval.upper_solution);
  const DrbsdeSolution companion = solve_drbsde_reflected(
      model.lattice, star, spec.funding_driver, spec.terminal_payoff,
      obstacles_of(spec));
  const std::vector<BoundaryRow> boundary = exercise_boundary(
      model.lattice, interval.upper_solution, {companion.y}, spec,
      cfg.tolerances.boundary_epsilon);

  CsvTable prices({"slice", "state_index", "state", "super", "sub",
                   "super_hedge", "sub_hedge", "argmax_vol"});
  for (int s = 0; s < model.lattice.slice_count(); ++s)
    for (int k = 0; k < model.lattice.slice_size(s); ++k) {
      const auto si = static_cast<std::size_t>(s);
      const auto sk = static_cast<std::size_t>(k);
      prices.row({std::to_string(s), std::to_string(k),
                  fmt17(model.lattice.state(s, k)),
                  fmt17(interval.upper_solution.y[si][sk]),
                  fmt17(interval.lower_solution.y[si][sk]),
                  fmt17(interval.upper_solution.z[si][sk]),
                  fmt17(interval.lower_solution.z[si][sk]),
                  std::to_string(interval.upper_solution.argmax_vol[si][sk])});
    }

  CsvTable bounds({"slice", "time", "kind", "strategy", "state"});
  for (const BoundaryRow& row : boundary)
    for (double x : row.states)
      bounds.row({std::to_string(row.slice), fmt17(row.time),
                  row.strategy < 0 ? "buyer_exercise" : "seller_cancel",
                  std::to_string(row.strategy), fmt17(x)});

  JsonValue summary = JsonValue::object();
  summary.set("mode", JsonValue::string("price"));
  summary.set("seed", JsonValue::integer(static_cast<long long>(cfg.seed)));
  summary.set("model", model_json(cfg.model));
  summary.set("subhedging_price", JsonValue::number(interval.sub));
  summary.set("superhedging_upper_bound", JsonValue::number(interval.super));
  summary.set("interval_width",
              JsonValue::number(interval.super - interval.sub));
  summary.set("boundary_epsilon",
              JsonValue::number(cfg.tolerances.boundary_epsilon));

  write_file(out_path(cfg, "prices.csv"), prices.dump());
  write_file(out_path(cfg, "boundaries.csv"), bounds.dump());
  write_file(out_path(cfg, "summary.json"), summary.dump());
  std::printf("price: interval [%s, %s]\n", fmt17(interval.sub).c_str(),
              fmt17(interval.super).c_str());
  return 0;
}

SuiteConfig suite_config(const RunConfig& cfg, int instances) {
  SuiteConfig sc;
  sc.seed = cfg.seed;
  sc.instances = instances;
  sc.min_steps = std::max(1, cfg.model.steps - 1);
  sc.max_steps = cfg.model.steps;
  sc.vol_count = std::min<int>(2, static_cast<int>(cfg.model.vol_levels.size()));
  sc.cap = cfg.cap;
  return sc;
}

JsonValue property_json(const PropertyResult& r) {
  JsonValue j = JsonValue::object();
  j.set("name", JsonValue::string(r.name));
  j.set("pass", JsonValue::boolean(r.pass));
  j.set("instances", JsonValue::integer(r.instances));
  j.set("max_deviation", JsonValue::number(r.max_deviation));
  j.set("tolerance", JsonValue::number(r.tolerance));
  JsonValue notes = JsonValue::array();
  for (const auto& n : r.notes) notes.push(JsonValue::string(n));
  j.set("notes", std::move(notes));
  return j;
}

void print_property(const PropertyResult& r) {
  std::printf("%-4s %-20s instances=%d max_dev=%s tol=%s [%.2f s]\n",
              r.pass ? "PASS" : "FAIL", r.name.c_str(), r.instances,
              fmt17(r.max_deviation).c_str(), fmt17(r.tolerance).c_str(),
              r.elapsed_seconds);
  for (const auto& n : r.notes) std::printf("     note: %s\n", n.c_str());
}

int run_verify(const RunConfig& cfg) {
  const SuiteConfig sc = suite_config(cfg, cfg.verify_instances);
  const Tolerances& tol = cfg.tolerances;

  std::vector<PropertyResult> results;
  results.push_back(prop_representation(sc, tol.representation));
  results.push_back(prop_minimum_condition(sc, tol.minimum_condition));
  results.push_back(prop_skorohod(sc, tol.skorohod));
  results.push_back(prop_decomposition(sc, tol.decomposition, 1e-10));
  results.push_back(prop_comparison(sc, tol.comparison));
  results.push_back(prop_dynkin_equivalence(sc, tol.saddle, {1e-2, 1e-1}));
  results.push_back(prop_min_max_exchange(sc, tol.min_max));

  bool all_pass = true;
  for (const PropertyResult& r : results) {
    print_property(r);
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) {
    std::fprintf(stderr, "verify: property failure, no files written\n");
    return 4;
  }

  JsonValue report = JsonValue::object();
  report.set("mode", JsonValue::string("verify"));
  report.set("seed", JsonValue::integer(static_cast<long long>(cfg.seed)));
  report.set("instances_per_property",
             JsonValue::integer(cfg.verify_instances));
  report.set("model", model_json(cfg.model));
  JsonValue props = JsonValue::array();
  for (const PropertyResult& r : results) props.push(property_json(r));
  report.set("properties", std::move(props));
  report.set("all_pass", JsonValue::boolean(true));

  CsvTable table({"property", "pass", "instances", "max_deviation",
                  "tolerance"});
  for (const PropertyResult& r : results)
    table.row({r.name, r.pass ? "true" : "false", std::to_string(r.instances),
               fmt17(r.max_deviation), fmt17(r.tolerance)});

  write_file(out_path(cfg, "report.json"), report.dump());
  write_file(out_path(cfg, "properties.csv"), table.dump());
  return 0;
}

void check_oracle_caps(const RunConfig& cfg) {
  const BuiltModel model = build_model(cfg.model);
  strategy_count(model.lattice, model.grid.size(), cfg.cap);
  const int marks = model.lattice.non_terminal_node_count();
  if (marks >= 31)
    throw CapError("oracle: stopping-rule pair count exceeds cap");
  const std::uint64_t rules = std::uint64_t{1} << marks;
  if (rules * rules > cfg.cap)
    throw CapError("oracle: stopping-rule pair count exceeds cap");
}

int run_oracle(const RunConfig& cfg) {
  check_oracle_caps(cfg);
  const SuiteConfig sc = suite_config(cfg, cfg.oracle_instances);
  const Tolerances& tol = cfg.tolerances;

  std::vector<PropertyResult> results;
  results.push_back(prop_representation(sc, tol.representation));
  results.push_back(prop_dynkin_equivalence(sc, tol.saddle, {1e-2, 1e-1}));
  results.push_back(prop_uncertain_game(sc, tol.min_max, 1e-3));
  results.push_back(prop_markov_sufficiency(sc, tol.representation));

  JsonValue report = JsonValue::object();
  report.set("mode", JsonValue::string("oracle"));
  report.set("seed", JsonValue::integer(static_cast<long long>(cfg.seed)));
  report.set("instances", JsonValue::integer(cfg.oracle_instances));
  report.set("model", model_json(cfg.model));
  JsonValue checks = JsonValue::array();
  for (const PropertyResult& r : results) {
    print_property(r);
    checks.push(property_json(r));
  }
  report.set("checks", std::move(checks));

  write_file(out_path(cfg, "oracle.json"), report.dump());
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  if (cfg.mode == "solve") return run_solve(cfg);
  if (cfg.mode == "price") return run_price(cfg);
  if (cfg.mode == "verify") return run_verify(cfg);
  if (cfg.mode == "oracle") return run_oracle(cfg);
  throw InputError("unknown mode '" + cfg.mode + "'");
}

}  // namespace drbsde
