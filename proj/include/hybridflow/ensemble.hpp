// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file ensemble.hpp
/// @brief Hybrid densities rho = sum_j w_j(x, p) |<j|Psi>|^2 and their
/// transport along trajectories (method of characteristics).
///
/// Normalization convention: sum_j integral w_j dx dp = 1.

#pragma once

#include "hybridflow/dynamics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridflow {

using WeightFn = std::function<double(const ClassicalPoint&)>;

struct DensityComponent {
  WeightFn weight;
  ComplexVector state;  // unit norm
};

class DensitySpec {
 public:
  using MatrixDensityFn = std::function<ComplexMatrix(const ClassicalPoint&)>;

  DensitySpec() = default;
  /// Throws DimensionError or NormalizationError for malformed components.
  DensitySpec(std::size_t n, std::size_t N, std::vector<DensityComponent> components);
  /// General rho(x, p) as a matrix-valued function. Evaluable, not samplable.
  static DensitySpec from_matrix_function(std::size_t n, std::size_t N, MatrixDensityFn rho);

  std::size_t classical_dim() const noexcept { return n_; }
  std::size_t quantum_dim() const noexcept { return N_; }
  const std::vector<DensityComponent>& components() const noexcept { return components_; }
  bool is_matrix_function() const noexcept { return static_cast<bool>(matrix_fn_); }
  const MatrixDensityFn& matrix_function() const noexcept { return matrix_fn_; }

 private:
  std::size_t n_ = 0;
  std::size_t N_ = 1;
  std::vector<DensityComponent> components_;
  MatrixDensityFn matrix_fn_;
};

/// Throws IntegrityError on a negative sampled weight.
double density_value(const DensitySpec& dens, const HybridPoint& h);
/// Weights evaluated at `weights_at`, projectors replaced by `states`.
double density_value(const DensitySpec& dens, const ClassicalPoint& weights_at, const QuantumPhasePoint& q,
                     const std::vector<ComplexVector>& states);

/// sum_l w_l(x, p) rho_A^(l) (x) rho_B^(l), each factor a mixture of orthonormal states.
struct SeparableTerm {
  WeightFn weight;
  std::vector<std::pair<double, ComplexVector>> factor_a;
  std::vector<std::pair<double, ComplexVector>> factor_b;
};

struct SeparableRecipe {
  std::size_t n = 0;
  std::size_t N_A = 1;
  std::size_t N_B = 1;
  std::vector<SeparableTerm> terms;
};

DensitySpec separable_density(const SeparableRecipe& recipe);

/// Independent normal distribution over (x, p) in the point layout [x, p].
struct GaussianProposal {
  RealVector mean;
  RealVector sigma;

  double pdf(const ClassicalPoint& pt) const;
  void validate(std::size_t n) const;
};

/// sum_j integral w_j dx dp by tensor Gauss-Hermite quadrature shaped by the proposal.
double normalization_integral(const DensitySpec& dens, const GaussianProposal& proposal,
                              std::size_t nodes_per_dim = 64);
/// Throws NormalizationError when |integral - 1| > tolerance.
void validate_normalization(const DensitySpec& dens, const GaussianProposal& proposal, double tolerance = 1e-6,
                            std::size_t nodes_per_dim = 64);

struct SamplerSettings {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  GaussianProposal proposal;
};

struct NamedObservable {
  std::string name;
  HybridObservable observable;
};

struct EnsembleOptions {
  IntegratorOptions integrator;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
  bool keep_trajectories = true;
  double liouville_tolerance = 1e-8;
};

struct EnsembleSample {
  HybridPoint initial;
  double weight = 0.0;          // normalized importance weight
  std::size_t component = 0;    // index of the drawn projector state
  RealVector classical_start;   // (x, p) where the density weights are read
};

struct ObservableSeries {
  std::string name;
  std::vector<double> mean;
  std::vector<double> standard_error;
};

struct EnsembleRun {
  std::size_t n = 0;
  std::size_t N = 1;
  std::vector<double> times;
  std::vector<EnsembleSample> samples;
  std::vector<Trajectory> trajectories;                 // empty unless kept
  std::vector<std::vector<double>> density_series;      // per sample, per recorded time
  std::vector<double> max_density_drift;                // per sample
  std::vector<double> max_constraint_drift;             // per sample, max |C - 1|
  std::vector<ObservableSeries> observables;
  double liouville_tolerance = 1e-8;
};

/// Samples the density and integrates every characteristic with the model's flow.
/// Throws SamplerError when no proposal draw carries weight.
EnsembleRun liouville_propagate(const ModelSpec& model, const DensitySpec& dens, const SamplerSettings& sampler,
                                double T, double dt, const std::vector<NamedObservable>& observables = {},
                                const EnsembleOptions& options = {});

struct EnsembleReport {
  bool passed = true;
  double min_density = 0.0;
  double weight_sum_residual = 0.0;
  double max_normalization_residual = 0.0;  // max |C - 1| over all characteristics
  double max_density_drift = 0.0;
  std::optional<std::size_t> offending_sample;
  std::string message;
};

EnsembleReport positivity_normalization_report(const EnsembleRun& run);

}  // namespace hybridflow
