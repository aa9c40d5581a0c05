// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file quadrature.hpp
/// @brief Gauss-Hermite rules from the Golub-Welsch eigenvalue problem.

#pragma once

#include "hybridflow/phase_space.hpp"

#include <cstddef>

namespace hybridflow {

struct QuadratureRule {
  RealVector nodes;
  RealVector weights;
};

/// Nodes and weights for integral f(t) exp(-t^2) dt; exact for polynomials of degree < 2n.
QuadratureRule gauss_hermite(std::size_t n);

/// Rule for integral f(q) dq with nodes spread as a Gaussian of the given
/// center and width: integral f ~= sum w_k f(q_k) with w absorbing exp(t^2).
/// Accurate when f decays like exp(-((q - center) / width)^2).
QuadratureRule gauss_hermite_unweighted(std::size_t n, double center, double width);

}  // namespace hybridflow
