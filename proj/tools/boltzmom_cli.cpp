#include <iostream>

#include "CLI11.hpp"

#include <boltzmom/cli/commands.hpp>

int main(int argc, char** argv) {
  namespace bc = boltzmom::cli;
  CLI::App app{"Moment bounds and particle simulations for the homogeneous Boltzmann equation"};
  app.set_version_flag("--version", boltzmom::version);
  std::string config, out = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", config, "YAML experiment config")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (overrides the config's seed)");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.require_subcommand(1);
  for (const auto& name : bc::subcommands()) app.add_subcommand(name);
  CLI11_PARSE(app, argc, argv);

  bc::Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.out = out;
  ctx.threads = threads;
  boltzmom::default_threads() = threads;
  try {
    ctx.cfg = bc::load_config(config);
    ctx.seed = app.count("--seed") ? seed : ctx.cfg.seed;
    return bc::run_subcommand(ctx);
  } catch (const bc::ConfigError& e) {
    std::cerr << config << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
