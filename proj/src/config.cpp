#include "drbsde/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "drbsde/errors.hpp"

namespace drbsde {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw InputError("config: " + where + ": " + what);
}

double require_number(const json& j, const std::string& where,
                      const char* key) {
  if (!j.contains(key)) bad(where, std::string("missing key '") + key + "'");
  if (!j[key].is_number()) bad(where, std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return j[key].get<double>();
}

std::string require_string(const json& j, const std::string& where,
                           const char* key) {
  if (!j.contains(key)) bad(where, std::string("missing key '") + key + "'");
  if (!j[key].is_string()) bad(where, std::string("'") + key + "' must be a string");
  return j[key].get<std::string>();
}

SurfaceFn parse_surface(const json& j, const std::string& where) {
  const std::string type = require_string(j, where, "type");
  if (type == "constant") {
    const double value = require_number(j, where, "value");
    return [value](double, double) { return value; };
  }
  if (type == "affine") {
    const double base = require_number(j, where, "base");
    const double slope_x = number_or(j, "slope_x", 0.0);
    const double slope_t = number_or(j, "slope_t", 0.0);
    return [base, slope_x, slope_t](double t, double x) {
      return base + slope_x * x + slope_t * t;
    };
  }
  if (type == "call") {
    const double strike = require_number(j, where, "strike");
    return [strike](double, double x) { return std::max(x - strike, 0.0); };
  }
  if (type == "put") {
    const double strike = require_number(j, where, "strike");
    return [strike](double, double x) { return std::max(strike - x, 0.0); };
  }
  bad(where, "unknown surface type '" + type + "'");
}

TerminalFn parse_terminal(const json& j, const std::string& where) {
  const std::string type = require_string(j, where, "type");
  if (type == "constant") {
    const double value = require_number(j, where, "value");
    return [value](double) { return value; };
  }
  if (type == "identity") {
    return [](double x) { return x; };
  }
  if (type == "call") {
    const double strike = require_number(j, where, "strike");
    return [strike](double x) { return std::max(x - strike, 0.0); };
  }
  if (type == "put") {
    const double strike = require_number(j, where, "strike");
    return [strike](double x) { return std::max(strike - x, 0.0); };
  }
  if (type == "tent") {
    const double peak = require_number(j, where, "peak");
    const double center = require_number(j, where, "center");
    const double slope = require_number(j, where, "slope");
    return [peak, center, slope](double x) {
      return peak - slope * std::abs(x - center);
    };
  }
  bad(where, "unknown terminal type '" + type + "'");
}

Driver parse_driver(const json& j, const std::string& where) {
  const std::string type = require_string(j, where, "type");
  if (type == "zero") return zero_driver();
  if (type == "constant") {
    const double value = require_number(j, where, "value");
    return Driver{[value](double, double, double, double, double) {
                    return value;
                  },
                  0.0, 0.0};
  }
  if (type == "running_reward") {
    const double base = require_number(j, where, "base");
    const double slope_x = number_or(j, "slope_x", 0.0);
    const double slope_t = number_or(j, "slope_t", 0.0);
    return Driver{[base, slope_x, slope_t](double t, double x, double, double,
                                           double) {
                    return base + slope_x * x + slope_t * t;
                  },
                  0.0, 0.0};
  }
  if (type == "vol_affine") {
    const double base = number_or(j, "base", 0.0);
    const double slope_a = require_number(j, where, "slope_a");
    return Driver{[base, slope_a](double, double, double, double, double a) {
                    return base + slope_a * a;
                  },
                  0.0, 0.0};
  }
  if (type == "linear") {
    const double coef_y = number_or(j, "coef_y", 0.0);
    const double coef_z = number_or(j, "coef_z", 0.0);
    return Driver{[coef_y, coef_z](double, double, double y, double z, double a) {
                    return coef_y * y + coef_z * std::sqrt(a) * z;
                  },
                  std::abs(coef_y), std::abs(coef_z)};
  }
  if (type == "hamiltonian_quadratic") {
    const double weight = require_number(j, where, "weight");
    const double gamma_min = require_number(j, where, "gamma_min");
    const double gamma_max = require_number(j, where, "gamma_max");
    const double gamma_step = require_number(j, where, "gamma_step");
    if (!(weight > 0.0)) bad(where, "'weight' must be positive");
    if (!(gamma_step > 0.0)) bad(where, "'gamma_step' must be positive");
    if (!(gamma_min <= 0.0 && gamma_max >= 0.0))
      bad(where, "gamma grid must straddle 0");
    std::vector<double> grid;
    for (double g = gamma_min; g <= gamma_max + 0.5 * gamma_step;
         g += gamma_step)
      grid.push_back(g);
    grid.push_back(0.0);
    return build_driver_from_hamiltonian(
        [weight](double, double, double, double, double gamma) {
          return 0.5 * weight * gamma * gamma;
        },
        std::move(grid));
  }
  bad(where, "unknown driver type '" + type + "'");
}


RunConfig parse_config_tree(const json& root) {
  RunConfig cfg;
  if (root.contains("mode")) cfg.mode = root["mode"].get<std::string>();

  if (root.contains("model")) {
    const json& m = root["model"];
    cfg.model.horizon = require_number(m, "model", "horizon");
    const double steps = require_number(m, "model", "steps");
    if (!(steps >= 1.0) || steps != std::floor(steps))
      bad("model", "'steps' must be a positive integer");
    cfg.model.steps = static_cast<int>(steps);
    cfg.model.x0 = number_or(m, "x0", 0.0);
    cfg.model.stretch = number_or(m, "stretch", 1.0);
    if (m.contains("vol_levels")) {
      if (!m["vol_levels"].is_array() || m["vol_levels"].empty())
        bad("model", "'vol_levels' must be a non-empty array");
      cfg.model.vol_levels.clear();
      for (const auto& v : m["vol_levels"])
        cfg.model.vol_levels.push_back(v.get<double>());
    }
    if (!(cfg.model.horizon > 0.0)) bad("model", "'horizon' must be positive");
    if (!(cfg.model.stretch >= 1.0)) bad("model", "'stretch' must be >= 1");
  }

  if (root.contains("problem")) {
    const json& p = root["problem"];
    if (p.contains("driver"))
      cfg.problem.driver = parse_driver(p["driver"], "problem.driver");
    else
      cfg.problem.driver = zero_driver();
    if (p.contains("terminal"))
      cfg.problem.terminal = parse_terminal(p["terminal"], "problem.terminal");
    if (p.contains("obstacles")) {
      const json& o = p["obstacles"];
      if (!o.contains("lower") || !o.contains("upper"))
        bad("problem.obstacles", "need both 'lower' and 'upper'");
      cfg.problem.obstacles.lower =
          parse_surface(o["lower"], "problem.obstacles.lower");
      cfg.problem.obstacles.upper =
          parse_surface(o["upper"], "problem.obstacles.upper");
      cfg.problem.obstacles.gap = require_number(o, "problem.obstacles", "gap");
      if (!(cfg.problem.obstacles.gap > 0.0))
        bad("problem.obstacles", "'gap' must be positive");
    }
    if (p.contains("option")) {
      const json& o = p["option"];
      GameOptionSpec spec;
      spec.exercise_payoff =
          parse_surface(o["exercise"], "problem.option.exercise");
      spec.penalty = parse_surface(o["penalty"], "problem.option.penalty");
      spec.terminal_payoff =
          parse_terminal(o["terminal"], "problem.option.terminal");
      spec.funding_driver = o.contains("funding")
                                ? parse_driver(o["funding"],
                                               "problem.option.funding")
                                : zero_driver();
      spec.penalty_floor =
          require_number(o, "problem.option", "penalty_floor");
      if (!(spec.penalty_floor > 0.0))
        bad("problem.option", "'penalty_floor' must be positive");
      cfg.problem.option = std::move(spec);
    }
    if (p.contains("penalty_schedule")) {
      cfg.problem.penalty_schedule.clear();
      for (const auto& v : p["penalty_schedule"]) {
        const double n = v.get<double>();
        if (!(n > 0.0))
          bad("problem.penalty_schedule", "levels must be positive");
        cfg.problem.penalty_schedule.push_back(n);
      }
      if (cfg.problem.penalty_schedule.empty())
        bad("problem.penalty_schedule", "must not be empty");
    }
  }

  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    auto load = [&](const char* key, double& slot) {
      if (t.contains(key)) {
        slot = t[key].get<double>();
        if (!(slot > 0.0)) bad("tolerances", std::string(key) + " must be positive");
      }
    };
    load("reduction", cfg.tolerances.reduction);
    load("representation", cfg.tolerances.representation);
    load("minimum_condition", cfg.tolerances.minimum_condition);
    load("skorohod", cfg.tolerances.skorohod);
    load("decomposition", cfg.tolerances.decomposition);
    load("comparison", cfg.tolerances.comparison);
    load("saddle", cfg.tolerances.saddle);
    load("min_max", cfg.tolerances.min_max);
    load("boundary_epsilon", cfg.tolerances.boundary_epsilon);
  }

  if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
  if (root.contains("cap")) {
    cfg.cap = root["cap"].get<std::uint64_t>();
    if (cfg.cap == 0) bad("cap", "must be positive");
  }
  if (root.contains("verify"))
    cfg.verify_instances =
        root["verify"].value("instances_per_property", cfg.verify_instances);
  if (root.contains("oracle"))
    cfg.oracle_instances =
        root["oracle"].value("instances", cfg.oracle_instances);
  if (cfg.verify_instances < 1) bad("verify", "instance count must be >= 1");
  if (cfg.oracle_instances < 1) bad("oracle", "instance count must be >= 1");

  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("config: cannot open file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config: " + path + ": " + e.what());
  }
  try {
    return parse_config_tree(root);
  } catch (const json::exception& e) {
    throw InputError("config: " + path + ": " + e.what());
  }
}

}  // namespace drbsde
