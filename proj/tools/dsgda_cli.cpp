#include <iostream>

#include <CLI11.hpp>

#include "dsgda/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distributed SGDA stability and generalization experiments"};
  app.require_subcommand(1);

  dsgda::CliOptions opt;
  std::string out_dir;
  std::uint64_t seed_base = 0;

  std::string config;
  auto* run = app.add_subcommand("run", "single coupled run from a config file");
  run->add_option("--config,config", config, "experiment config")->required();
  auto* sweep = app.add_subcommand("sweep", "factor sweep from a config file");
  sweep->add_option("--config,config", config, "experiment config")->required();
  sweep->add_option("--workers", opt.workers, "concurrent sweep cells")->check(CLI::PositiveNumber);
  for (auto* sub : {run, sweep}) {
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed-base", seed_base, "base seed for the repeats");
  }

  std::string constants;
  auto* bounds = app.add_subcommand("bounds", "evaluate the theoretical bounds from constants");
  bounds->add_option("constants", constants, "constants file")->required();
  bounds->add_option("--out", out_dir, "output directory");

  std::string target, weighting = "metropolis";
  int m = 0;
  auto* topo = app.add_subcommand("validate-topology", "check a mixing matrix");
  topo->add_option("target", target, "matrix file or topology name")->required();
  topo->add_option("--m", m, "node count for named topologies");
  topo->add_option("--weighting", weighting, "metropolis or uniform_neighbor");

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {run, sweep, bounds}) {
    if (auto* o = sub->get_option_no_throw("--out"); o && o->count()) opt.out_dir = out_dir;
    if (auto* o = sub->get_option_no_throw("--seed-base"); o && o->count()) opt.seed_base = seed_base;
  }

  if (*run) return dsgda::cmd_run(config, opt, std::cout, std::cerr);
  if (*sweep) return dsgda::cmd_sweep(config, opt, std::cout, std::cerr);
  if (*bounds) return dsgda::cmd_bounds(constants, opt, std::cout, std::cerr);
  return dsgda::cmd_validate_topology(target, m, weighting, std::cout, std::cerr);
}
