// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file brackets.hpp
/// @brief Classical, quantum and hybrid Poisson brackets.
///
/// {A, B}_x = sum_k (dA/dx_k dB/dp_k - dA/dp_k dB/dx_k)
///          + sum_i (dA/dX_i dB/dP_i - dA/dP_i dB/dX_i).
/// The analytic routines work from quadratic forms and term lists; the
/// finite-difference routines take opaque scalar fields and serve as oracles.

#pragma once

#include "hybridflow/almost_classical.hpp"
#include "hybridflow/observables.hpp"

#include <functional>

namespace hybridflow {

struct BracketResult {
  double value = 0.0;
  double classical_part = 0.0;
  double quantum_part = 0.0;
};

using ScalarField = std::function<double(const HybridPoint&)>;

double classical_bracket(const ClassicalObservable& f, const ClassicalObservable& g, const ClassicalPoint& pt);

double quantum_bracket(const QuadraticObservable& F, const QuadraticObservable& G, const QuantumPhasePoint& q);

BracketResult bracket_from_gradients(const HybridGradient& a, const HybridGradient& b);

BracketResult hybrid_bracket(const HybridObservable& A, const HybridObservable& B, const HybridPoint& h);
BracketResult hybrid_bracket(const AlmostClassicalObservable& A, const AlmostClassicalObservable& B,
                             const HybridPoint& h);

/// Central differences over all 2(n+N) coordinates.
HybridGradient finite_difference_gradient(const ScalarField& f, const HybridPoint& h);
BracketResult numeric_bracket(const ScalarField& a, const ScalarField& b, const HybridPoint& h);

/// The observable <Psi| (1/i)[F, G] |Psi>.
QuadraticObservable commutator_observable(const QuadraticObservable& F, const QuadraticObservable& G);

/// |{F, G}_QM - <(1/i)[F, G]>| at q.
double commutator_residual(const QuadraticObservable& F, const QuadraticObservable& G, const QuantumPhasePoint& q);

/// Symbolic hybrid bracket inside the almost-classical algebra.
///
/// The classical part multiplies coefficient brackets {a, b}_CL with the
/// concatenated factor products. The quantum part contracts one index through
/// {conj z_i z_j, conj z_k z_l}_QM = -i (delta_jk conj z_i z_l - delta_li conj z_k z_j).
/// Throws UnsupportedError when an operand lacks analytic coefficient gradients.
AlmostClassicalObservable bracket_closure(const AlmostClassicalObservable& A, const AlmostClassicalObservable& B);

}  // namespace hybridflow
