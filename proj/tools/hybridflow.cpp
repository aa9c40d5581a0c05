// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

// hybridflow <command> --config <path> [--out <dir>] [--seed <u64>]

#include "hybridflow/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace hybridflow::cli;
  CLI::App app{"Hybrid quantum-classical dynamics: simulations, benchmarks and property checks"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  const std::vector<std::string> commands = {"simulate",   "ensemble",    "bracket-check", "benchmark-peres-terno",
                                             "tangibility", "closure-check"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", config, "run configuration (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory, overrides output.directory");
    sub->add_option("--seed", seed, "random seed, overrides numerics.seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kValidationError;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  RunOptions options;
  if (chosen->count("--out")) options.out_dir = out_dir;
  if (chosen->count("--seed")) options.seed = seed;
  return run_file(*parse_command(chosen->get_name()), config, options);
}
