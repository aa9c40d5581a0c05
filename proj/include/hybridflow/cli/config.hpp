// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file config.hpp
/// @brief Run configuration: TOML file -> RunConfig -> diagnostics.

#pragma once

#include "hybridflow/models.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hybridflow::cli {

enum class Command { Simulate, Ensemble, BracketCheck, PeresTerno, Tangibility, ClosureCheck };

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command c);

struct Diagnostic {
  std::string key;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d);

struct ModelConfig {
  bool present = false;
  std::string kind = "bilinear";  // bilinear | localized | generic
  std::size_t N = 0;
  RealVector m, omega, lambda;
  double M = 1.0;
  double Omega = 1.0;
  std::size_t quadrature_nodes = 0;
  double range_multiplier = 1.0;
  // generic
  std::size_t n = 0;
  std::string basis = "oscillator";  // oscillator | abstract
  std::vector<double> classical_potential;
  std::vector<double> quantum_potential;
  std::optional<ComplexMatrix> h_qm;
  std::vector<InteractionTerm> interaction;
};

struct InitialConfig {
  bool present = false;
  RealVector x, p;
  std::optional<ComplexVector> amplitudes;
  std::optional<RealVector> X, P;
  std::optional<std::array<double, 2>> coherent;  // (<X>, <P>)
};

struct NumericsConfig {
  double dt = 0.0;
  double T = 0.0;
  std::optional<std::uint64_t> seed;
  double residual_tolerance = 1e-13;
  int max_iterations = 50;
  bool renormalize = false;
  std::size_t record_stride = 1;
  std::optional<double> energy_tolerance;
  std::optional<double> constraint_tolerance;
};

struct OutputConfig {
  std::string directory = ".";
  std::string prefix = "hybridflow";
  bool write_trajectory = true;
};

struct BracketCheckConfig {
  std::size_t N = 8;
  std::size_t pairs = 200;
  double scale = 1.0;
  double tolerance = 1e-10;
};

struct PeresTernoConfig {
  double tolerance = 1e-8;
  double frequency_tolerance = 1e-6;
  double truncation_tolerance = 1e-10;
  double lag = 1.0;
};

struct TangibilityConfig {
  double t0 = 0.0;
  std::size_t coordinate = 1;  // 1-based
  std::string kind = "position";
  std::string shape = "bump";  // bump | step
  double amplitude = 0.0;
  double width = 1.0;
};

struct ClosureCheckConfig {
  std::size_t n = 1;
  std::size_t N = 3;
  std::size_t pairs = 20;
  std::size_t points = 100;
  std::size_t terms = 3;
  std::size_t max_pairs = 2;
  int max_degree = 2;
  double tolerance = 1e-6;
  double constraint_tolerance = 1e-10;
};

struct ComponentConfig {
  ComplexVector state;
  double probability = 1.0;
  RealVector mean;   // 2n entries [x, p]
  RealVector sigma;  // 2n entries
};

struct EnsembleConfig {
  std::size_t samples = 0;
  unsigned threads = 0;
  RealVector proposal_mean, proposal_sigma;
  double liouville_tolerance = 1e-8;
  double normalization_tolerance = 1e-6;
  std::size_t quadrature_nodes = 64;
  std::vector<std::string> observables;
  std::vector<ComponentConfig> components;
  bool write_samples = false;
};

struct RunConfig {
  Command command = Command::Simulate;
  std::optional<Command> declared_command;
  ModelConfig model;
  InitialConfig initial;
  NumericsConfig numerics;
  OutputConfig output;
  BracketCheckConfig bracket_check;
  PeresTernoConfig peres_terno;
  TangibilityConfig tangibility;
  ClosureCheckConfig closure_check;
  EnsembleConfig ensemble;
};

struct LoadResult {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;  // syntax, type and unknown-key errors
};

LoadResult parse_config(const std::string& text, Command command);
LoadResult load_config(const std::string& path, Command command);

/// Every semantic violation; empty means runnable.
std::vector<Diagnostic> validate(const RunConfig& config);

/// Runtime objects; call only on a config that validates.
ModelSpec build_model(const ModelConfig& m);
HybridPoint build_initial(const RunConfig& config, const ModelSpec& model);

}  // namespace hybridflow::cli
