// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file commands.hpp
/// @brief Command dispatch and the checks behind each command.

#pragma once

#include "hybridflow/cli/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hybridflow::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNumericalFailure = 2, kPropertyFailure = 3 };

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::ostream* out = nullptr;  // summary lines; stdout when null
  std::ostream* err = nullptr;  // diagnostics and warnings; stderr when null
};

/// Loads, validates and runs. Returns an ExitCode.
int run_file(Command command, const std::string& config_path, const RunOptions& options = {});
/// Validates and runs an in-memory config.
int run(RunConfig config, const RunOptions& options = {});

struct PeresTernoReport {
  std::size_t steps = 0;
  /// Coordinates ordered x_1..x_n, <X>, p_1..p_n, <P>.
  std::vector<double> max_deviation_per_coordinate;
  double max_deviation = 0.0;
  double max_truncation_occupation = 0.0;
  std::vector<double> expected_frequencies;
  std::vector<double> measured_frequencies;
  double max_frequency_error = 0.0;
};

/// Hybrid flow of the bilinear model against the exact solution of the
/// linear system for (x, p, <X>, <P>).
PeresTernoReport peres_terno_benchmark(const BilinearParams& params, const HybridPoint& h0, double T, double dt,
                                       const IntegratorOptions& options = {}, double lag = 1.0);

/// cos(omega K dt) = sum (u_{i+K} + u_{i-K}) u_i / (2 sum u_i^2) for a sampled sinusoid.
double lag_frequency(const std::vector<double>& u, double dt, std::size_t lag_steps);

struct BracketCheckReport {
  double max_commutator_residual = 0.0;
};

BracketCheckReport bracket_check(std::size_t N, std::size_t pairs, double scale, std::uint64_t seed);

struct ClosureCheckReport {
  double max_closure_error = 0.0;
  double max_constraint_bracket = 0.0;
};

ClosureCheckReport closure_check(const ClosureCheckConfig& config, std::uint64_t seed);

}  // namespace hybridflow::cli
