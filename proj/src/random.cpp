// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/random.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>

namespace hybridflow {

HermitianMatrix random_hermitian(std::size_t N, Rng& rng, double scale) {
  if (N < 1) throw DimensionError("random_hermitian: N must be at least 1");
  std::normal_distribution<double> g(0.0, 1.0);
  const auto m = static_cast<Eigen::Index>(N);
  ComplexMatrix A(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = g(rng);
      A(i, j) = Complex(re, g(rng));
    }
  }
  const ComplexMatrix H = (A + A.adjoint()) * (0.5 * scale / std::sqrt(static_cast<double>(N)));
  return HermitianMatrix(H);
}

QuantumPhasePoint random_state(std::size_t N, Rng& rng) {
  if (N < 1) throw DimensionError("random_state: N must be at least 1");
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexVector c(static_cast<Eigen::Index>(N));
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double re = g(rng);
    c[i] = Complex(re, g(rng));
  }
  return encode_state(c / c.norm());
}

ClassicalPoint random_classical_point(std::size_t n, Rng& rng, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  RealVector x(static_cast<Eigen::Index>(n)), p(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = g(rng);
  for (Eigen::Index k = 0; k < p.size(); ++k) p[k] = g(rng);
  return ClassicalPoint(x, p);
}

HybridPoint random_hybrid_point(std::size_t n, std::size_t N, Rng& rng, double sigma) {
  ClassicalPoint cl = random_classical_point(n, rng, sigma);
  return HybridPoint(std::move(cl), random_state(N, rng));
}

Polynomial random_polynomial(std::size_t n, Rng& rng, int max_degree, std::size_t terms) {
  std::normal_distribution<double> g(0.0, 1.0);
  Polynomial out = Polynomial::constant(n, Complex(0.0, 0.0));
  if (n == 0) {
    const double re = g(rng);
    return Polynomial::constant(0, Complex(re, g(rng)));
  }
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, 2 * n - 1);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<int> xp(n, 0), pp(n, 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) {
      const std::size_t v = var(rng);
      if (v < n) ++xp[v]; else ++pp[v - n];
    }
    const double re = g(rng);
    out = out + Polynomial::monomial(Complex(re, g(rng)), std::move(xp), std::move(pp));
  }
  return out;
}

AlmostClassicalObservable random_almost_classical(std::size_t n, std::size_t N, Rng& rng, std::size_t terms,
                                                  std::size_t max_pairs, int max_degree) {
  std::uniform_int_distribution<std::size_t> count(0, max_pairs);
  std::uniform_int_distribution<std::size_t> index(0, N - 1);
  std::vector<PairTerm> input;
  for (std::size_t t = 0; t < terms; ++t) {
    PairTerm term;
    term.coeff = Coefficient(random_polynomial(n, rng, max_degree, 2));
    const std::size_t k = count(rng);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = index(rng);
      term.pairs.emplace_back(i, index(rng));
    }
    input.push_back(std::move(term));
  }
  return AlmostClassicalObservable(n, N, std::move(input));
}

}  // namespace hybridflow
