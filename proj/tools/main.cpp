#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "commands.hpp"
#include "tvpvar/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"time-varying parameter VAR estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, draws_dir, out_dir, spec_path;
  std::int64_t seed_override = -1;
  int threads = 1;
  bool allow_partial = false;
  int n_rep = 5000;
  bool fault = false;
  std::uint64_t check_seed = 1;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file")
        ->required();
    cmd->add_option("--seed", seed_override,
                    "override sampler.seed from the config");
  };

  auto* est = app.add_subcommand("estimate", "run the Gibbs sampler");
  add_config(est);

  auto* ana = app.add_subcommand("analyze",
                                 "impulse responses, variance shares, "
                                 "volatility, predictability, episodes");
  add_config(ana);
  ana->add_option("--draws", draws_dir, "draw store directory")->required();
  ana->add_option("--threads", threads, "worker threads");
  ana->add_flag("--allow-partial", allow_partial,
                "accept an incomplete draw store");

  auto* ide = app.add_subcommand("identify",
                                 "per-date shock share and impact summaries");
  add_config(ide);
  ide->add_option("--draws", draws_dir, "draw store directory")->required();
  ide->add_option("--threads", threads, "worker threads");

  auto* sim = app.add_subcommand("simulate", "generate a synthetic panel");
  sim->add_option("--spec", spec_path, "DGP specification file")->required();
  sim->add_option("--out", out_dir, "output directory")->required();

  auto* chk = app.add_subcommand("check", "sampler self-tests");
  chk->add_option("--reps", n_rep, "joint-distribution test replications");
  chk->add_option("--out", out_dir, "output directory")->required();
  chk->add_option("--seed", check_seed, "RNG seed");
  chk->add_flag("--fault", fault, "inject a deliberate sampler fault");

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&] {
      tvpvar::RunConfig config = tvpvar::RunConfig::from_file(config_path);
      if (seed_override >= 0)
        config.sampler.seed = static_cast<std::uint64_t>(seed_override);
      return config;
    };
    if (est->parsed()) return tvpvar::cli::cmd_estimate(load(), std::cout);
    if (ana->parsed())
      return tvpvar::cli::cmd_analyze(load(), draws_dir, threads,
                                      allow_partial, std::cout);
    if (ide->parsed())
      return tvpvar::cli::cmd_identify(load(), draws_dir, threads, std::cout);
    if (sim->parsed())
      return tvpvar::cli::cmd_simulate(spec_path, out_dir, std::cout);
    if (chk->parsed())
      return tvpvar::cli::cmd_check(n_rep, fault, out_dir, check_seed,
                                    std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
