// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/brackets.hpp"

#include "hybridflow/errors.hpp"

namespace hybridflow {

double classical_bracket(const ClassicalObservable& f, const ClassicalObservable& g, const ClassicalPoint& pt) {
  const ClassicalGradient gf = f.gradient(pt);
  const ClassicalGradient gg = g.gradient(pt);
  return gf.dx.dot(gg.dp) - gf.dp.dot(gg.dx);
}

double quantum_bracket(const QuadraticObservable& F, const QuadraticObservable& G, const QuantumPhasePoint& q) {
  if (F.dim() != q.dim() || G.dim() != q.dim()) {
    throw DimensionError("quantum_bracket: observable and state dimensions differ");
  }
  const ComplexVector c = decode_state(q);
  const QuantumGradient gf = quadratic_gradient(F.matrix().matrix(), c);
  const QuantumGradient gg = quadratic_gradient(G.matrix().matrix(), c);
  return gf.dX.dot(gg.dP) - gf.dP.dot(gg.dX);
}

BracketResult bracket_from_gradients(const HybridGradient& a, const HybridGradient& b) {
  if (a.dx.size() != b.dx.size() || a.dX.size() != b.dX.size()) {
    throw DimensionError("bracket: gradient dimensions differ");
  }
  BracketResult r;
  r.classical_part = a.dx.dot(b.dp) - a.dp.dot(b.dx);
  r.quantum_part = a.dX.dot(b.dP) - a.dP.dot(b.dX);
  r.value = r.classical_part + r.quantum_part;
  return r;
}

BracketResult hybrid_bracket(const HybridObservable& A, const HybridObservable& B, const HybridPoint& h) {
  return bracket_from_gradients(A.gradient(h), B.gradient(h));
}

BracketResult hybrid_bracket(const AlmostClassicalObservable& A, const AlmostClassicalObservable& B,
                             const HybridPoint& h) {
  return bracket_from_gradients(A.gradient(h), B.gradient(h));
}

HybridGradient finite_difference_gradient(const ScalarField& f, const HybridPoint& h) {
  const std::size_t n = h.classical_dim(), N = h.quantum_dim();
  const RealVector y = h.flatten();
  RealVector g(y.size());
  for (Eigen::Index v = 0; v < y.size(); ++v) {
    RealVector yp = y, ym = y;
    const double step = fd_step(y[v]);
    yp[v] += step;
    ym[v] -= step;
    g[v] = (f(HybridPoint::unflatten(yp, n, N)) - f(HybridPoint::unflatten(ym, n, N))) / (yp[v] - ym[v]);
  }
  const auto nn = static_cast<Eigen::Index>(n), NN = static_cast<Eigen::Index>(N);
  return {g.segment(0, nn), g.segment(nn, nn), g.segment(2 * nn, NN), g.segment(2 * nn + NN, NN)};
}

BracketResult numeric_bracket(const ScalarField& a, const ScalarField& b, const HybridPoint& h) {
  return bracket_from_gradients(finite_difference_gradient(a, h), finite_difference_gradient(b, h));
}

QuadraticObservable commutator_observable(const QuadraticObservable& F, const QuadraticObservable& G) {
  if (F.dim() != G.dim()) throw DimensionError("commutator_observable: dimensions differ");
  const ComplexMatrix& f = F.matrix().matrix();
  const ComplexMatrix& g = G.matrix().matrix();
  ComplexMatrix c = Complex(0.0, -1.0) * (f * g - g * f);
  // (1/i)[F, G] is Hermitian up to rounding of the products.
  return QuadraticObservable(HermitianMatrix(std::move(c), 1e-9));
}

double commutator_residual(const QuadraticObservable& F, const QuadraticObservable& G, const QuantumPhasePoint& q) {
  const double lhs = quantum_bracket(F, G, q);
  const double rhs = expectation(commutator_observable(F, G), q);
  return std::abs(lhs - rhs);
}

AlmostClassicalObservable bracket_closure(const AlmostClassicalObservable& A, const AlmostClassicalObservable& B) {
  if (A.classical_dim() != B.classical_dim() || A.quantum_dim() != B.quantum_dim()) {
    throw DimensionError("bracket_closure: operand dimensions differ");
  }
  if (!A.has_analytic_gradients() || !B.has_analytic_gradients()) {
    throw UnsupportedError("bracket_closure: symbolic route requires analytic coefficient gradients");
  }
  using Term = AlmostClassicalObservable::Term;
  const Complex minus_i(0.0, -1.0), plus_i(0.0, 1.0);
  std::vector<Term> out;

  auto concat = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b, std::ptrdiff_t skip_a,
                   std::ptrdiff_t skip_b) {
    std::vector<std::size_t> r;
    r.reserve(a.size() + b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (static_cast<std::ptrdiff_t>(k) != skip_a) r.push_back(a[k]);
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (static_cast<std::ptrdiff_t>(k) != skip_b) r.push_back(b[k]);
    }
    return r;
  };

  for (const Term& ta : A.terms()) {
    for (const Term& tb : B.terms()) {
      // Classical part: coefficient bracket times the full product.
      if (A.classical_dim() > 0) {
        Coefficient cb = Coefficient::poisson_bracket(ta.coeff, tb.coeff);
        if (!cb.is_zero()) {
          out.push_back({std::move(cb), concat(ta.conjugated, tb.conjugated, -1, -1), concat(ta.plain, tb.plain, -1, -1)});
        }
      }
      // Quantum part: d/dz_m of A against d/dconj(z_m) of B, and the reverse.
      const Coefficient ab = ta.coeff * tb.coeff;
      if (ab.is_zero()) continue;
      for (std::size_t r = 0; r < ta.plain.size(); ++r) {
        for (std::size_t s = 0; s < tb.conjugated.size(); ++s) {
          if (ta.plain[r] != tb.conjugated[s]) continue;
          out.push_back({ab.scaled(minus_i), concat(ta.conjugated, tb.conjugated, -1, static_cast<std::ptrdiff_t>(s)),
                         concat(ta.plain, tb.plain, static_cast<std::ptrdiff_t>(r), -1)});
        }
      }
      for (std::size_t r = 0; r < ta.conjugated.size(); ++r) {
        for (std::size_t s = 0; s < tb.plain.size(); ++s) {
          if (ta.conjugated[r] != tb.plain[s]) continue;
          out.push_back({ab.scaled(plus_i), concat(ta.conjugated, tb.conjugated, static_cast<std::ptrdiff_t>(r), -1),
                         concat(ta.plain, tb.plain, -1, static_cast<std::ptrdiff_t>(s))});
        }
      }
    }
  }
  return AlmostClassicalObservable::from_monomials(A.classical_dim(), A.quantum_dim(), std::move(out));
}

}  // namespace hybridflow
