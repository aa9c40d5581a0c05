// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/almost_classical.hpp"

#include "hybridflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hybridflow {

namespace {

using Key = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

std::vector<AlmostClassicalObservable::Term> merge(std::vector<AlmostClassicalObservable::Term> terms) {
  std::map<Key, Coefficient> merged;
  for (auto& t : terms) {
    std::sort(t.conjugated.begin(), t.conjugated.end());
    std::sort(t.plain.begin(), t.plain.end());
    if (t.coeff.is_zero()) continue;
    Key key{t.conjugated, t.plain};
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(std::move(key), std::move(t.coeff));
    } else {
      it->second = it->second + t.coeff;
    }
  }
  std::vector<AlmostClassicalObservable::Term> out;
  out.reserve(merged.size());
  for (auto& [key, coeff] : merged) {
    if (coeff.is_zero()) continue;
    out.push_back({std::move(coeff), key.first, key.second});
  }
  return out;
}

// prod conj(c_i) over conjugated, times prod c_j over plain, skipping one
// position in one list when skip_* is set.
Complex monomial(const ComplexVector& c, const std::vector<std::size_t>& conjugated,
                 const std::vector<std::size_t>& plain, std::ptrdiff_t skip_conj = -1,
                 std::ptrdiff_t skip_plain = -1) {
  Complex m(1.0, 0.0);
  for (std::size_t r = 0; r < conjugated.size(); ++r) {
    if (static_cast<std::ptrdiff_t>(r) == skip_conj) continue;
    m *= std::conj(c[static_cast<Eigen::Index>(conjugated[r])]);
  }
  for (std::size_t r = 0; r < plain.size(); ++r) {
    if (static_cast<std::ptrdiff_t>(r) == skip_plain) continue;
    m *= c[static_cast<Eigen::Index>(plain[r])];
  }
  return m;
}

}  // namespace

std::vector<IndexPair> AlmostClassicalObservable::Term::pairs() const {
  std::vector<IndexPair> out;
  out.reserve(conjugated.size());
  for (std::size_t r = 0; r < conjugated.size(); ++r) out.emplace_back(conjugated[r], plain[r]);
  return out;
}

AlmostClassicalObservable::AlmostClassicalObservable(std::size_t n, std::size_t N, std::vector<PairTerm> terms)
    : n_(n), N_(N) {
  if (N < 1) throw DimensionError("AlmostClassicalObservable: quantum dimension must be at least 1");
  std::vector<Term> expanded;
  expanded.reserve(2 * terms.size());
  for (auto& t : terms) {
    Term term{t.coeff.scaled(0.5), {}, {}};
    for (const auto& [i, j] : t.pairs) {
      if (i >= N || j >= N) {
        std::ostringstream os;
        os << "AlmostClassicalObservable: pair (" << i << ", " << j << ") out of range for N = " << N;
        throw DimensionError(os.str());
      }
      term.conjugated.push_back(i);
      term.plain.push_back(j);
    }
    Term partner{term.coeff.conj(), term.plain, term.conjugated};
    expanded.push_back(std::move(term));
    expanded.push_back(std::move(partner));
  }
  terms_ = merge(std::move(expanded));
}

AlmostClassicalObservable AlmostClassicalObservable::from_monomials(std::size_t n, std::size_t N,
                                                                    std::vector<Term> terms) {
  AlmostClassicalObservable out;
  out.n_ = n;
  out.N_ = N;
  for (const auto& t : terms) {
    if (t.conjugated.size() != t.plain.size()) {
      throw IntegrityError("AlmostClassicalObservable: unbalanced monomial is not phase invariant");
    }
    for (std::size_t i : t.conjugated) {
      if (i >= N) throw DimensionError("AlmostClassicalObservable: index out of range");
    }
    for (std::size_t j : t.plain) {
      if (j >= N) throw DimensionError("AlmostClassicalObservable: index out of range");
    }
  }
  out.terms_ = merge(std::move(terms));
  return out;
}

AlmostClassicalObservable AlmostClassicalObservable::from_quadratic(const QuadraticObservable& g, std::size_t n) {
  const ComplexMatrix& m = g.matrix().matrix();
  std::vector<Term> terms;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) == Complex(0.0, 0.0)) continue;
      terms.push_back({Coefficient::constant(n, m(i, j)), {static_cast<std::size_t>(i)}, {static_cast<std::size_t>(j)}});
    }
  }
  return from_monomials(n, g.dim(), std::move(terms));
}

AlmostClassicalObservable AlmostClassicalObservable::from_hybrid(const HybridObservable& a, std::size_t n) {
  const std::size_t N = std::max<std::size_t>(1, a.quantum_dim());
  std::vector<Term> terms;
  const ClassicalObservable& f = a.scalar_part();
  if (!f.is_zero()) {
    Coefficient::GradientFn grad;
    if (f.has_analytic_gradient()) {
      grad = [f](const ClassicalPoint& pt) {
        const ClassicalGradient g = f.gradient(pt);
        return ComplexGradient{g.dx.cast<Complex>(), g.dp.cast<Complex>()};
      };
    }
    terms.push_back({Coefficient::function([f](const ClassicalPoint& pt) { return Complex(f(pt), 0.0); }, grad), {}, {}});
  }
  if (a.has_matrix_part()) {
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        Coefficient::GradientFn grad;
        if (a.has_analytic_matrix_gradient()) {
          grad = [a, ii, jj](const ClassicalPoint& pt) {
            const MatrixGradient g = a.matrix_gradient(pt);
            ComplexGradient out{ComplexVector(static_cast<Eigen::Index>(g.dx.size())),
                                ComplexVector(static_cast<Eigen::Index>(g.dp.size()))};
            for (std::size_t k = 0; k < g.dx.size(); ++k) {
              out.dx[static_cast<Eigen::Index>(k)] = g.dx[k](ii, jj);
              out.dp[static_cast<Eigen::Index>(k)] = g.dp[k](ii, jj);
            }
            return out;
          };
        }
        terms.push_back({Coefficient::function([a, ii, jj](const ClassicalPoint& pt) { return a.matrix(pt)(ii, jj); },
                                               grad),
                         {i},
                         {j}});
      }
    }
  }
  return from_monomials(n, N, std::move(terms));
}

AlmostClassicalObservable AlmostClassicalObservable::constraint(std::size_t n, std::size_t N) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < N; ++i) terms.push_back({Coefficient::constant(n, 1.0), {i}, {i}});
  return from_monomials(n, N, std::move(terms));
}

bool AlmostClassicalObservable::has_analytic_gradients() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.coeff.has_gradient(); });
}

void AlmostClassicalObservable::check_point(const HybridPoint& h) const {
  if (h.classical_dim() != n_ || h.quantum_dim() != N_) {
    throw DimensionError("AlmostClassicalObservable: point dimensions do not match");
  }
}

double AlmostClassicalObservable::value(const HybridPoint& h) const {
  check_point(h);
  const ComplexVector c = decode_state(h.qm());
  Complex sum(0.0, 0.0);
  double scale = 1.0;
  for (const auto& t : terms_) {
    const Complex v = t.coeff(h.cl()) * monomial(c, t.conjugated, t.plain);
    sum += v;
    scale += std::abs(v);
  }
  if (std::abs(sum.imag()) > 1e-10 * scale) {
    std::ostringstream os;
    os << "AlmostClassicalObservable: imaginary residual " << sum.imag() << " exceeds tolerance";
    throw IntegrityError(os.str());
  }
  return sum.real();
}

HybridGradient AlmostClassicalObservable::gradient(const HybridPoint& h) const {
  check_point(h);
  const auto n = static_cast<Eigen::Index>(n_);
  const auto N = static_cast<Eigen::Index>(N_);
  const ComplexVector c = decode_state(h.qm());
  ComplexVector dz = ComplexVector::Zero(N), dzbar = ComplexVector::Zero(N);
  ComplexVector dx = ComplexVector::Zero(n), dp = ComplexVector::Zero(n);
  for (const auto& t : terms_) {
    const Complex a = t.coeff(h.cl());
    const Complex mono = monomial(c, t.conjugated, t.plain);
    if (n > 0) {
      const ComplexGradient ga = t.coeff.gradient(h.cl());
      dx += ga.dx * mono;
      dp += ga.dp * mono;
    }
    for (std::size_t r = 0; r < t.plain.size(); ++r) {
      dz[static_cast<Eigen::Index>(t.plain[r])] += a * monomial(c, t.conjugated, t.plain, -1, static_cast<std::ptrdiff_t>(r));
    }
    for (std::size_t r = 0; r < t.conjugated.size(); ++r) {
      dzbar[static_cast<Eigen::Index>(t.conjugated[r])] +=
          a * monomial(c, t.conjugated, t.plain, static_cast<std::ptrdiff_t>(r), -1);
    }
  }
  const double s = 1.0 / std::sqrt(2.0);
  HybridGradient g;
  g.dx = dx.real();
  g.dp = dp.real();
  g.dX = (s * (dz + dzbar)).real();
  g.dP = (Complex(0.0, s) * (dz - dzbar)).real();
  return g;
}

AlmostClassicalObservable AlmostClassicalObservable::operator+(const AlmostClassicalObservable& o) const {
  if (o.n_ != n_ || o.N_ != N_) throw DimensionError("AlmostClassicalObservable: dimension mismatch");
  std::vector<Term> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return from_monomials(n_, N_, std::move(all));
}

AlmostClassicalObservable AlmostClassicalObservable::scaled(double s) const {
  std::vector<Term> all = terms_;
  for (auto& t : all) t.coeff = t.coeff.scaled(s);
  return from_monomials(n_, N_, std::move(all));
}

double evaluate_almost_classical(const AlmostClassicalObservable& obs, const HybridPoint& h) {
  return obs.value(h);
}

}  // namespace hybridflow
