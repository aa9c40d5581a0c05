// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file random.hpp
/// @brief Seeded random observables and states for property checks.

#pragma once

#include "hybridflow/almost_classical.hpp"

#include <random>

namespace hybridflow {

using Rng = std::mt19937_64;

/// (A + A^dagger) / 2 with i.i.d. standard complex normal A, times scale / sqrt(N).
HermitianMatrix random_hermitian(std::size_t N, Rng& rng, double scale = 1.0);
/// Uniform on the constraint sphere C = 1.
QuantumPhasePoint random_state(std::size_t N, Rng& rng);
ClassicalPoint random_classical_point(std::size_t n, Rng& rng, double sigma = 1.0);
HybridPoint random_hybrid_point(std::size_t n, std::size_t N, Rng& rng, double sigma = 1.0);
/// Up to `terms` monomials of total degree <= max_degree with complex normal coefficients.
Polynomial random_polynomial(std::size_t n, Rng& rng, int max_degree = 2, std::size_t terms = 3);
/// `terms` pair terms with 0..max_pairs bilinear factors and polynomial coefficients.
AlmostClassicalObservable random_almost_classical(std::size_t n, std::size_t N, Rng& rng, std::size_t terms = 3,
                                                  std::size_t max_pairs = 2, int max_degree = 2);

}  // namespace hybridflow
