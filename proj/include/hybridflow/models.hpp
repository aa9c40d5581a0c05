// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file models.hpp
/// @brief Concrete hybrid Hamiltonians: generic potentials, bilinearly coupled
/// oscillators, and the position-localized coupling on a Hermite basis.
///
/// Units: hbar = 1. The localized coupling lambda_k carries energy / length^2.

#pragma once

#include "hybridflow/dynamics.hpp"
#include "hybridflow/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hybridflow {

/// Orthonormal oscillator eigenfunction Phi_i(q) for mass M and frequency Omega.
double hermite_eval(std::size_t i, double q, double M = 1.0, double Omega = 1.0);
/// Phi_0(q) .. Phi_{N-1}(q) by the normalized upward recurrence.
RealVector hermite_functions(std::size_t N, double q, double M = 1.0, double Omega = 1.0);
/// dPhi_i/dq for i < N.
RealVector hermite_function_derivatives(std::size_t N, double q, double M = 1.0, double Omega = 1.0);

struct BilinearParams {
  RealVector m;       // classical masses
  RealVector omega;   // classical frequencies
  RealVector lambda;  // couplings
  double M = 1.0;
  double Omega = 1.0;
  std::size_t N = 2;

  std::size_t n() const noexcept { return static_cast<std::size_t>(m.size()); }
  /// Throws Error naming the offending field.
  void validate() const;
};

struct QuadratureSpec {
  /// 0 selects max(2N, 24).
  std::size_t nodes = 0;
  /// Validated positions are |q| <= range_multiplier * (outermost node).
  double range_multiplier = 1.0;
};

struct LocalizedParams : BilinearParams {
  QuadratureSpec quadrature;
};

/// Classical harmonic part sum_k p_k^2 / (2 m_k) + m_k omega_k^2 x_k^2 / 2.
ClassicalObservable harmonic_classical(const RealVector& m, const RealVector& omega);
/// diag(Omega (j + 1/2)).
HermitianMatrix oscillator_hamiltonian(std::size_t N, double Omega);

/// sum_k p_k^2 / 2 + v(x_k) with v(q) = sum_r v[r] q^r.
ClassicalObservable polynomial_classical(std::size_t n, const std::vector<double>& v);
/// P^2 / 2 + sum_r V[r] X^r in the truncated oscillator basis. Matrix elements
/// are those of the untruncated operators.
HermitianMatrix polynomial_quantum(const BasisSet& basis, const std::vector<double>& V);

/// Weyl-ordered average of all orderings of X^a P^b, untruncated matrix elements.
HermitianMatrix weyl_monomial(const BasisSet& basis, unsigned a, unsigned b);

/// coefficient * prod_k x_k^{x_powers[k]} p_k^{p_powers[k]} * Weyl(X^a P^b).
struct InteractionTerm {
  double coefficient = 0.0;
  std::vector<unsigned> x_powers;
  std::vector<unsigned> p_powers;
  unsigned X_power = 0;
  unsigned P_power = 0;
};

HybridObservable interaction_from_recipe(std::size_t n, const BasisSet& basis, const std::vector<InteractionTerm>& terms);

ModelSpec build_generic(std::size_t n, ClassicalObservable H_cl, HermitianMatrix H_qm, HybridObservable interaction,
                        BasisSet basis);
ModelSpec build_generic(std::size_t n, ClassicalObservable H_cl, HermitianMatrix H_qm,
                        const std::vector<InteractionTerm>& recipe, BasisSet basis);

/// H_cl harmonic, H_qm = diag(Omega (j + 1/2)), M(x) = (sum_k lambda_k x_k) X.
ModelSpec build_bilinear(const BilinearParams& params);

struct LocalizedModel {
  ModelSpec model;
  LocalizedParams params;
  QuadratureRule rule;
  double orthonormality_error = 0.0;
  double validated_range = 0.0;
};

/// M(x)_ij = sum_k lambda_k x_k^2 Phi_i(x_k) Phi_j(x_k). Throws IntegrityError
/// when the quadrature does not reproduce orthonormality to 1e-10.
LocalizedModel build_localized_bilinear(const LocalizedParams& params);

struct WarnedValue {
  double value = 0.0;
  std::optional<std::string> warning;
};

/// Interaction value with a warning when some |x_k| lies outside the validated range.
WarnedValue localized_interaction(const LocalizedModel& model, const HybridPoint& h);

/// Max |integral Phi_i Phi_j - delta_ij| for i, j < N under the rule.
double orthonormality_defect(const QuadratureRule& rule, std::size_t N, double M, double Omega);

/// Truncated coherent state of amplitude alpha, renormalized.
ComplexVector coherent_state(std::size_t N, Complex alpha);
/// alpha with <X> = X0 and <P> = P0 for the oscillator of mass M and frequency Omega.
Complex coherent_amplitude(double X0, double P0, double M = 1.0, double Omega = 1.0);

/// Occupation of levels j >= N - 2, i.e. beyond level N - 3.
double truncation_occupation(const QuantumPhasePoint& q);
/// Warning text when the occupation exceeds the tolerance.
std::optional<std::string> truncation_warning(const QuantumPhasePoint& q, double tolerance = 1e-10);

}  // namespace hybridflow
