// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file almost_classical.hpp
/// @brief Almost-classical observables: sums of classical coefficients times
/// products of bilinear factors conj(z_i) z_j, z_i = (X_i + i P_i)/sqrt 2.
///
/// The algebra is closed under the hybrid bracket (see bracket_closure). Each
/// term is stored as a monomial: a coefficient, the sorted multiset of
/// conjugated indices and the sorted multiset of plain indices (equal sizes,
/// so every term is phase invariant).

#pragma once

#include "hybridflow/coefficient.hpp"
#include "hybridflow/observables.hpp"

#include <utility>
#include <vector>

namespace hybridflow {

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Input form: coeff(x, p) * prod over pairs (i, j) of conj(z_i) z_j.
struct PairTerm {
  Coefficient coeff;
  std::vector<IndexPair> pairs;
};

class AlmostClassicalObservable {
 public:
  struct Term {
    Coefficient coeff;
    std::vector<std::size_t> conjugated;  // sorted
    std::vector<std::size_t> plain;       // sorted
    std::vector<IndexPair> pairs() const;
  };

  AlmostClassicalObservable() = default;

  /// Canonicalizes: each term T is replaced by (T + conj T)/2 and like
  /// monomials are merged, so the term list is closed under conjugation and
  /// the value is real. Throws DimensionError for indices >= N.
  AlmostClassicalObservable(std::size_t n, std::size_t N, std::vector<PairTerm> terms);

  /// Merges like monomials without the conjugate symmetrization step.
  static AlmostClassicalObservable from_monomials(std::size_t n, std::size_t N, std::vector<Term> terms);

  static AlmostClassicalObservable from_quadratic(const QuadraticObservable& g, std::size_t n);
  /// Scalar part becomes a pair-free term; matrix entries M_ij(x, p) become
  /// coefficients of conj(z_i) z_j. Needs analytic matrix gradients for the
  /// coefficients to carry gradients.
  static AlmostClassicalObservable from_hybrid(const HybridObservable& a, std::size_t n);
  /// C = sum_i conj(z_i) z_i.
  static AlmostClassicalObservable constraint(std::size_t n, std::size_t N);

  std::size_t classical_dim() const noexcept { return n_; }
  std::size_t quantum_dim() const noexcept { return N_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool has_analytic_gradients() const;

  /// Real part of the term sum; throws IntegrityError if the imaginary
  /// residual exceeds 1e-10 relative.
  double value(const HybridPoint& h) const;
  HybridGradient gradient(const HybridPoint& h) const;

  AlmostClassicalObservable operator+(const AlmostClassicalObservable& o) const;
  AlmostClassicalObservable scaled(double s) const;

 private:
  void check_point(const HybridPoint& h) const;

  std::size_t n_ = 0;
  std::size_t N_ = 1;
  std::vector<Term> terms_;
};

double evaluate_almost_classical(const AlmostClassicalObservable& obs, const HybridPoint& h);

}  // namespace hybridflow
