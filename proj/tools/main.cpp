#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "drbsde/config.hpp"
#include "drbsde/errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  bool has_out = false;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::uint64_t cap = 0;
  bool has_cap = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory")
      ->each([&args](const std::string&) { args.has_out = true; });
  cmd->add_option("--seed", args.seed, "random seed override")
      ->each([&args](const std::string&) { args.has_seed = true; });
  cmd->add_option("--cap", args.cap, "enumeration cap override")
      ->each([&args](const std::string&) { args.has_cap = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lattice solvers for doubly reflected backward equations, robust "
      "Dynkin games and game-option price intervals under volatility "
      "uncertainty"};
  app.require_subcommand(1);

  CommonArgs args;
  const char* names[] = {"solve", "price", "verify", "oracle"};
  const char* descriptions[] = {
      "solve the second-order doubly reflected system and emit node tables",
      "price a game option and emit the interval, hedges and boundaries",
      "run the seeded property suites and emit a report",
      "run exhaustive brute-force cross-checks and emit deviations"};
  for (int i = 0; i < 4; ++i)
    add_common(app.add_subcommand(names[i], descriptions[i]), args);

  CLI11_PARSE(app, argc, argv);

  try {
    drbsde::RunConfig cfg = drbsde::parse_config(args.config_path);
    cfg.mode = app.get_subcommands().front()->get_name();
    if (args.has_out) cfg.out_dir = args.out_dir;
    if (args.has_seed) cfg.seed = args.seed;
    if (args.has_cap) cfg.cap = args.cap;
    return drbsde::run(cfg);
  } catch (const drbsde::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const drbsde::CapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
