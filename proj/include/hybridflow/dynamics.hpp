// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file dynamics.hpp
/// @brief Hamiltonian flow of hybrid systems with the implicit midpoint rule.
///
/// The equations of motion are
///   dx_k/dt = dH/dp_k,  dp_k/dt = -dH/dx_k,
///   dX_i/dt = dH/dP_i,  dP_i/dt = -dH/dX_i,
/// with H = H_cl(x, p) + <Psi|H_qm|Psi> + <Psi|M(x, p)|Psi>. The midpoint rule
/// is symplectic and conserves every quadratic invariant, in particular the
/// constraint C, up to the nonlinear solver tolerance.

#pragma once

#include "hybridflow/observables.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybridflow {

/// Hybrid Hamiltonian. The interaction may be absent (HybridObservable::zero()).
struct ModelSpec {
  std::string name = "generic";
  std::size_t n = 0;  // classical degrees of freedom
  std::size_t N = 1;  // quantum dimension
  ClassicalObservable H_cl = ClassicalObservable::zero();
  HermitianMatrix H_qm = HermitianMatrix::zero(1);
  HybridObservable interaction = HybridObservable::zero();
  BasisSet basis = BasisSet::abstract(1);

  /// H_cl + H_qm + I as a single hybrid observable.
  HybridObservable as_observable() const;
  /// Throws DimensionError on inconsistent parts.
  void validate() const;
};

double total_hamiltonian(const ModelSpec& model, const HybridPoint& h);

/// Gradient of the scalar generating a flow, on the flat layout of HybridPoint::flatten().
using FlatGradientFn = std::function<void(const RealVector& y, RealVector& grad)>;

FlatGradientFn model_gradient(const ModelSpec& model);
FlatGradientFn observable_gradient(const HybridObservable& generator, std::size_t n, std::size_t N);

struct IntegratorOptions {
  double residual_tolerance = 1e-13;
  int max_iterations = 50;
  /// Fixed-point sweeps before switching to Newton.
  int fixed_point_iterations = 20;
  /// flow_step precondition on |C - 1|.
  double constraint_tolerance = 1e-8;
  /// Rescale (X, P) by 1/sqrt(C) after every step. Off by default.
  bool renormalize = false;
  /// Keep every k-th state in a Trajectory (monitors still see every step).
  std::size_t record_stride = 1;
  std::function<void(const std::string&)> log;
  /// Called after every accepted step with the state before and after.
  std::function<void(std::size_t step, double t, const RealVector& y0, const RealVector& y1)> on_step;
};

struct StepInfo {
  int iterations = 0;
  bool used_newton = false;
  double residual = 0.0;
};

/// One implicit midpoint step of y' = J grad(y). Throws StepFailure.
RealVector midpoint_step(const FlatGradientFn& grad, std::size_t n, std::size_t N, const RealVector& y0,
                         double dt, const IntegratorOptions& options = {}, StepInfo* info = nullptr);

HybridPoint flow_step(const ModelSpec& model, const HybridPoint& h, double dt, const IntegratorOptions& options = {});

struct TrajectoryMetadata {
  std::string integrator = "implicit-midpoint";
  double dt = 0.0;
  double newton_tolerance = 0.0;
  std::size_t steps = 0;
  std::size_t newton_fallbacks = 0;
  std::size_t renormalizations = 0;
  double max_energy_drift = 0.0;      // over every step
  double max_constraint_drift = 0.0;  // max |C - 1| over every step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<HybridPoint> states;
  std::vector<double> energy;
  std::vector<double> constraint;
  TrajectoryMetadata metadata;
};

/// Integrates over [0, T] in steps of dt; T must be an integer multiple of dt.
Trajectory trajectory(const ModelSpec& model, const HybridPoint& h0, double T, double dt,
                      const IntegratorOptions& options = {});

/// Flows h for parameter delta_alpha along the Hamiltonian vector field of
/// the generator. Uses a fourth-order symmetric composition of midpoint steps
/// with sub-steps of at most 1e-3.
HybridPoint canonical_step(const HybridObservable& generator, const HybridPoint& h, double delta_alpha,
                           const IntegratorOptions& options = {});

/// Exact propagation exp(-i H t) of the decoded amplitudes via eigendecomposition.
QuantumPhasePoint unitary_oracle(const HermitianMatrix& H, const QuantumPhasePoint& q0, double t);

enum class CoordinateKind { Position, Momentum };

/// Continuous additive displacement of one classical coordinate after t0.
struct Perturbation {
  double t0 = 0.0;
  std::size_t coordinate = 0;
  CoordinateKind kind = CoordinateKind::Position;
  /// Displacement as a function of s = t - t0; zero for s <= 0, C^1 at onset.
  std::function<double(double)> profile;
  /// sup |profile'|.
  double derivative_bound = 0.0;

  static Perturbation none(double t0);
  /// amplitude * sin^2(pi s / width) on [0, width], zero elsewhere.
  static Perturbation smooth_bump(double t0, std::size_t coordinate, CoordinateKind kind, double amplitude,
                                  double width);
  /// amplitude * (1 - cos(pi s / width)) / 2 on [0, width], amplitude afterwards.
  static Perturbation smooth_step(double t0, std::size_t coordinate, CoordinateKind kind, double amplitude,
                                  double width);
};

struct TangibilityReport {
  bool pre_segment_identical = false;
  bool identical_overall = false;
  std::vector<double> times;
  std::vector<double> z_series;
  std::vector<double> z_unperturbed;
  /// Largest per-step change of z not produced by the Hamiltonian flow.
  double max_discontinuity = 0.0;
  double discontinuity_bound = 0.0;
  double max_constraint_deviation = 0.0;
  bool passed() const { return pre_segment_identical && max_discontinuity <= discontinuity_bound; }
};

TangibilityReport tangibility_experiment(const ModelSpec& model, const HybridPoint& h0,
                                         const Perturbation& perturbation, double T, double dt,
                                         const IntegratorOptions& options = {});

}  // namespace hybridflow
