#include "fptmc/config.hpp"
#include "fptmc/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"First-passage-time Monte Carlo for multivariate jump-diffusions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string engine;
  std::size_t runs = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out;

  auto* run = app.add_subcommand("run", "simulate and write densities plus report.txt");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--engine", engine, "unif, cmc or both")->check(CLI::IsMember({"unif", "cmc", "both"}));
  run->add_option("--runs", runs, "Monte Carlo runs per engine");
  run->add_option("--dt", dt, "cmc discretization step");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--workers", workers, "worker threads");
  run->add_option("--out", out, "output directory");

  auto* validate = app.add_subcommand("validate", "check a config file and print it normalized");
  validate->add_option("--config", config_path, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  fptmc::ExperimentConfig cfg;
  try {
    cfg = fptmc::parse_config(config_path);
    if (run->parsed()) {
      if (!engine.empty())
        cfg.engine = fptmc::parse_engine(engine);
      if (run->count("--runs"))
        cfg.n_runs = runs;
      if (run->count("--dt"))
        cfg.dt = dt;
      if (run->count("--seed"))
        cfg.seed = seed;
      if (run->count("--workers"))
        cfg.workers = workers;
      if (run->count("--out"))
        cfg.out_dir = out;
      cfg.validate();
    }
  } catch (const fptmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  if (validate->parsed()) {
    std::cout << fptmc::serialize_config(cfg);
    return 0;
  }

  try {
    const auto report = fptmc::run_experiment(cfg);
    std::cout << fptmc::format_report(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
