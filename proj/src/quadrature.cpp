// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/quadrature.hpp"

#include "hybridflow/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace hybridflow {

namespace {

// Nodes from the Jacobi matrix; Christoffel numbers 1 / sum_j psi_j(t)^2 of the
// orthonormal Hermite functions, which stay well scaled in the tails.
QuadratureRule hermite_function_rule(std::size_t n) {
  if (n < 1) throw DimensionError("gauss_hermite: need at least one node");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) {
    J(k - 1, k) = J(k, k - 1) = std::sqrt(0.5 * static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw IntegrityError("gauss_hermite: eigensolver failed");
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  // The exact rule is even.
  for (Eigen::Index k = 0; k < m / 2; ++k) {
    const double t = 0.5 * (rule.nodes[m - 1 - k] - rule.nodes[k]);
    rule.nodes[k] = -t;
    rule.nodes[m - 1 - k] = t;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;

  rule.weights.resize(m);
  const double c0 = std::pow(std::numbers::pi, -0.25);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double t = rule.nodes[k];
    double prev = 0.0;
    double cur = c0 * std::exp(-0.5 * t * t);
    double sum = cur * cur;
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
      const double jj = static_cast<double>(j);
      const double next = std::sqrt(2.0 / (jj + 1.0)) * t * cur - std::sqrt(jj / (jj + 1.0)) * prev;
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    rule.weights[k] = 1.0 / sum;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(std::size_t n) {
  QuadratureRule rule = hermite_function_rule(n);
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    rule.weights[k] *= std::exp(-rule.nodes[k] * rule.nodes[k]);
  }
  return rule;
}

QuadratureRule gauss_hermite_unweighted(std::size_t n, double center, double width) {
  if (!(width > 0.0)) throw Error("gauss_hermite_unweighted: width must be positive");
  QuadratureRule rule = hermite_function_rule(n);
  rule.nodes = (center + width * rule.nodes.array()).matrix();
  rule.weights *= width;
  return rule;
}

}  // namespace hybridflow
