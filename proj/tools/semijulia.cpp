// semijulia: render and verify Julia sets of finitely generated rational
// semigroups by backward iteration.
//
//   semijulia run    --config <path> | --example <name> [--method ...] [--seed ...] [--out ...]
//   semijulia verify [--config <path>] [--example <name>]
//
// Exit status: 0 success, 1 verification or run failure, 2 config error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "semijulia/semijulia.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string example;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> n;
  std::optional<int> depth;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> chains;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--example", o.example, "built-in example (circle, chebyshev, annulus, basilica)");
  cmd->add_option("--seed", o.seed, "base seed for the chain seeds");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

semijulia::RunConfig resolve(const Overrides& o, semijulia::Method default_method) {
  using namespace semijulia;
  RunConfig cfg;
  if (!o.example.empty()) cfg = builtin_example(o.example);
  if (!o.config.empty()) {
    cfg = load_config_file(o.config, cfg);
  } else if (o.example.empty()) {
    if (default_method != Method::Verify) throw ConfigError("config", "either --config or --example is required");
    cfg.generators = builtin_example("circle").generators;
  }
  cfg.method = default_method == Method::Verify ? Method::Verify : cfg.method;
  if (o.method) cfg.method = parse_method(*o.method);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.seeds.reset();
  }
  if (o.n) cfg.n = *o.n;
  if (o.depth) cfg.depth = *o.depth;
  if (o.burn_in) cfg.burn_in = *o.burn_in;
  if (o.chains) {
    cfg.chains = *o.chains;
    cfg.seeds.reset();
  }
  if (o.threads) cfg.threads = *o.threads;
  if (o.out) cfg.output = {*o.out + ".ppm", *o.out + ".grid", *o.out + ".report.txt"};
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Julia sets of rational semigroups by full and random backward iteration"};
  app.require_subcommand(1);

  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "generate an approximation and write image, grid and report");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--method", run_opts.method, "random | full | compare | verify")
      ->check(CLI::IsMember({"random", "full", "compare", "verify"}));
  run_cmd->add_option("--out", run_opts.out, "output prefix: <out>.ppm, <out>.grid, <out>.report.txt");
  run_cmd->add_option("--n", run_opts.n, "steps per chain");
  run_cmd->add_option("--depth", run_opts.depth, "full-tree depth");
  run_cmd->add_option("--burn-in", run_opts.burn_in, "points dropped from the start of each chain");
  run_cmd->add_option("--chains", run_opts.chains, "number of independent chains");

  Overrides verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks on built-in examples");
  add_common(verify_cmd, verify_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : semijulia::kExitConfig;
  }

  const bool verifying = verify_cmd->parsed();
  try {
    const auto cfg = resolve(verifying ? verify_opts : run_opts,
                             verifying ? semijulia::Method::Verify : semijulia::Method::Random);
    const auto result = semijulia::run(cfg, &std::cerr);
    std::cout << result.report;
    return result.exit_code;
  } catch (const semijulia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return semijulia::kExitConfig;
  } catch (const semijulia::ExceptionalStartPoint& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return semijulia::kExitConfig;
  } catch (const semijulia::BudgetExceeded& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return semijulia::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return semijulia::kExitFailure;
  }
}
