// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/observables.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>
#include <sstream>

namespace hybridflow {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_hermitian(const ComplexMatrix& m, double tolerance, const char* where) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(where) + ": matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = hermitian_defect(m);
  if (!(defect <= tolerance * scale)) {
    std::ostringstream os;
    os << where << ": matrix is not Hermitian (defect " << defect << ")";
    throw IntegrityError(os.str());
  }
}

}  // namespace

double hermitian_defect(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianMatrix::HermitianMatrix(ComplexMatrix entries, double tolerance) : m_(std::move(entries)) {
  require_hermitian(m_, tolerance, "HermitianMatrix");
  if (m_.rows() < 1) throw DimensionError("HermitianMatrix: empty matrix");
  // Symmetrize away the admitted rounding asymmetry.
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

HermitianMatrix HermitianMatrix::identity(std::size_t N) {
  return HermitianMatrix(ComplexMatrix::Identity(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N)));
}

HermitianMatrix HermitianMatrix::zero(std::size_t N) {
  return HermitianMatrix(ComplexMatrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N)));
}

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

// ---------------------------------------------------------------------------

ClassicalObservable::ClassicalObservable(ValueFn f, GradientFn grad) : f_(std::move(f)), grad_(std::move(grad)) {
  if (!f_) throw Error("ClassicalObservable: empty value function");
}

ClassicalObservable ClassicalObservable::zero() {
  ClassicalObservable o(
      [](const ClassicalPoint&) { return 0.0; },
      [](const ClassicalPoint& pt) {
        return ClassicalGradient{RealVector::Zero(pt.x().size()), RealVector::Zero(pt.p().size())};
      });
  o.zero_ = true;
  return o;
}

ClassicalObservable ClassicalObservable::constant(double value) {
  return ClassicalObservable([value](const ClassicalPoint&) { return value; },
                             [](const ClassicalPoint& pt) {
                               return ClassicalGradient{RealVector::Zero(pt.x().size()),
                                                        RealVector::Zero(pt.p().size())};
                             });
}

ClassicalObservable ClassicalObservable::position(std::size_t k) {
  return ClassicalObservable(
      [k](const ClassicalPoint& pt) {
        if (k >= pt.dim()) throw DimensionError("position observable: index out of range");
        return pt.x()[static_cast<Eigen::Index>(k)];
      },
      [k](const ClassicalPoint& pt) {
        ClassicalGradient g{RealVector::Zero(pt.x().size()), RealVector::Zero(pt.p().size())};
        if (k >= pt.dim()) throw DimensionError("position observable: index out of range");
        g.dx[static_cast<Eigen::Index>(k)] = 1.0;
        return g;
      });
}

ClassicalObservable ClassicalObservable::momentum(std::size_t k) {
  return ClassicalObservable(
      [k](const ClassicalPoint& pt) {
        if (k >= pt.dim()) throw DimensionError("momentum observable: index out of range");
        return pt.p()[static_cast<Eigen::Index>(k)];
      },
      [k](const ClassicalPoint& pt) {
        ClassicalGradient g{RealVector::Zero(pt.x().size()), RealVector::Zero(pt.p().size())};
        if (k >= pt.dim()) throw DimensionError("momentum observable: index out of range");
        g.dp[static_cast<Eigen::Index>(k)] = 1.0;
        return g;
      });
}

ClassicalGradient ClassicalObservable::gradient(const ClassicalPoint& pt) const {
  if (grad_) {
    ClassicalGradient g = grad_(pt);
    if (static_cast<std::size_t>(g.dx.size()) != pt.dim() || static_cast<std::size_t>(g.dp.size()) != pt.dim()) {
      throw DimensionError("ClassicalObservable: gradient has wrong length");
    }
    return g;
  }
  return finite_difference_gradient(pt);
}

ClassicalGradient ClassicalObservable::finite_difference_gradient(const ClassicalPoint& pt) const {
  const auto n = static_cast<Eigen::Index>(pt.dim());
  ClassicalGradient g{RealVector::Zero(n), RealVector::Zero(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double hx = fd_step(pt.x()[k]);
    RealVector xp = pt.x(), xm = pt.x();
    xp[k] += hx;
    xm[k] -= hx;
    g.dx[k] = (f_(ClassicalPoint(xp, pt.p())) - f_(ClassicalPoint(xm, pt.p()))) / (xp[k] - xm[k]);

    const double hp = fd_step(pt.p()[k]);
    RealVector pp = pt.p(), pm = pt.p();
    pp[k] += hp;
    pm[k] -= hp;
    g.dp[k] = (f_(ClassicalPoint(pt.x(), pp)) - f_(ClassicalPoint(pt.x(), pm))) / (pp[k] - pm[k]);
  }
  return g;
}

ClassicalObservable ClassicalObservable::operator+(const ClassicalObservable& other) const {
  if (zero_) return other;
  if (other.zero_) return *this;
  const ClassicalObservable a = *this;
  const ClassicalObservable b = other;
  GradientFn grad;
  if (a.has_analytic_gradient() && b.has_analytic_gradient()) {
    grad = [a, b](const ClassicalPoint& pt) {
      ClassicalGradient ga = a.gradient(pt);
      const ClassicalGradient gb = b.gradient(pt);
      ga.dx += gb.dx;
      ga.dp += gb.dp;
      return ga;
    };
  }
  return ClassicalObservable([a, b](const ClassicalPoint& pt) { return a(pt) + b(pt); }, std::move(grad));
}

ClassicalObservable ClassicalObservable::scaled(double s) const {
  const ClassicalObservable a = *this;
  GradientFn grad;
  if (a.has_analytic_gradient()) {
    grad = [a, s](const ClassicalPoint& pt) {
      ClassicalGradient g = a.gradient(pt);
      g.dx *= s;
      g.dp *= s;
      return g;
    };
  }
  ClassicalObservable out([a, s](const ClassicalPoint& pt) { return s * a(pt); }, std::move(grad));
  out.zero_ = zero_;
  return out;
}

// ---------------------------------------------------------------------------

HybridObservable HybridObservable::classical(ClassicalObservable f) {
  HybridObservable o;
  o.scalar_ = std::move(f);
  return o;
}

HybridObservable HybridObservable::quantum(const HermitianMatrix& m) {
  HybridObservable o;
  o.N_ = m.dim();
  o.constant_ = m.matrix();
  return o;
}

HybridObservable HybridObservable::field(std::size_t N, MatrixFn M, MatrixGradientFn dM) {
  if (N < 1) throw DimensionError("HybridObservable::field: quantum dimension must be at least 1");
  if (!M) throw Error("HybridObservable::field: empty matrix function");
  HybridObservable o;
  o.N_ = N;
  o.M_ = std::move(M);
  o.dM_ = std::move(dM);
  return o;
}

ComplexMatrix HybridObservable::matrix(const ClassicalPoint& pt) const {
  const auto N = static_cast<Eigen::Index>(N_);
  if (N_ == 0) return ComplexMatrix();
  if (constant_) return *constant_;
  ComplexMatrix m = M_(pt);
  if (m.rows() != N || m.cols() != N) {
    throw DimensionError("HybridObservable: matrix field returned wrong dimension");
  }
  require_hermitian(m, kHermitianTolerance, "HybridObservable");
  return m;
}

MatrixGradient HybridObservable::matrix_gradient(const ClassicalPoint& pt) const {
  const auto n = pt.dim();
  const auto N = static_cast<Eigen::Index>(N_);
  MatrixGradient g;
  if (N_ == 0) return g;
  if (constant_) {
    g.dx.assign(n, ComplexMatrix::Zero(N, N));
    g.dp.assign(n, ComplexMatrix::Zero(N, N));
    return g;
  }
  if (dM_) {
    g = dM_(pt);
    if (g.dx.size() != n || g.dp.size() != n) {
      throw DimensionError("HybridObservable: matrix gradient has wrong length");
    }
    return g;
  }
  g.dx.resize(n);
  g.dp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double hx = fd_step(pt.x()[kk]);
    RealVector xp = pt.x(), xm = pt.x();
    xp[kk] += hx;
    xm[kk] -= hx;
    g.dx[k] = (M_(ClassicalPoint(xp, pt.p())) - M_(ClassicalPoint(xm, pt.p()))) / (xp[kk] - xm[kk]);
    const double hp = fd_step(pt.p()[kk]);
    RealVector pp = pt.p(), pm = pt.p();
    pp[kk] += hp;
    pm[kk] -= hp;
    g.dp[k] = (M_(ClassicalPoint(pt.x(), pp)) - M_(ClassicalPoint(pt.x(), pm))) / (pp[kk] - pm[kk]);
  }
  return g;
}

void HybridObservable::check_dims(const HybridPoint& h) const {
  if (N_ != 0 && h.quantum_dim() != N_) {
    throw DimensionError("HybridObservable: quantum dimension mismatch");
  }
}

double HybridObservable::value(const HybridPoint& h) const {
  check_dims(h);
  double v = scalar_(h.cl());
  if (N_ > 0) v += expectation(matrix(h.cl()), decode_state(h.qm()));
  return v;
}

HybridGradient HybridObservable::gradient(const HybridPoint& h) const {
  check_dims(h);
  const auto n = static_cast<Eigen::Index>(h.classical_dim());
  const auto N = static_cast<Eigen::Index>(h.quantum_dim());
  const ClassicalGradient gs = scalar_.gradient(h.cl());
  HybridGradient g{gs.dx, gs.dp, RealVector::Zero(N), RealVector::Zero(N)};
  if (N_ == 0) return g;

  const ComplexVector c = decode_state(h.qm());
  const QuantumGradient gq = quadratic_gradient(matrix(h.cl()), c);
  g.dX = gq.dX;
  g.dP = gq.dP;
  if (!constant_) {
    const MatrixGradient dM = matrix_gradient(h.cl());
    for (Eigen::Index k = 0; k < n; ++k) {
      g.dx[k] += expectation(dM.dx[static_cast<std::size_t>(k)], c);
      g.dp[k] += expectation(dM.dp[static_cast<std::size_t>(k)], c);
    }
  }
  return g;
}

HybridObservable HybridObservable::operator+(const HybridObservable& other) const {
  if (N_ != 0 && other.N_ != 0 && N_ != other.N_) {
    throw DimensionError("HybridObservable: cannot add observables of different quantum dimension");
  }
  HybridObservable out;
  out.scalar_ = scalar_ + other.scalar_;
  out.N_ = std::max(N_, other.N_);
  if (N_ == 0) {
    out.constant_ = other.constant_;
    out.M_ = other.M_;
    out.dM_ = other.dM_;
    return out;
  }
  if (other.N_ == 0) {
    out.constant_ = constant_;
    out.M_ = M_;
    out.dM_ = dM_;
    return out;
  }
  if (constant_ && other.constant_) {
    out.constant_ = *constant_ + *other.constant_;
    return out;
  }
  const HybridObservable a = *this;
  const HybridObservable b = other;
  out.M_ = [a, b](const ClassicalPoint& pt) { return ComplexMatrix(a.matrix(pt) + b.matrix(pt)); };
  if (a.has_analytic_matrix_gradient() && b.has_analytic_matrix_gradient()) {
    out.dM_ = [a, b](const ClassicalPoint& pt) {
      MatrixGradient ga = a.matrix_gradient(pt);
      const MatrixGradient gb = b.matrix_gradient(pt);
      for (std::size_t k = 0; k < ga.dx.size(); ++k) {
        ga.dx[k] += gb.dx[k];
        ga.dp[k] += gb.dp[k];
      }
      return ga;
    };
  }
  return out;
}

HybridObservable HybridObservable::scaled(double s) const {
  HybridObservable out;
  out.scalar_ = scalar_.scaled(s);
  out.N_ = N_;
  if (N_ == 0) return out;
  if (constant_) {
    out.constant_ = s * *constant_;
    return out;
  }
  const HybridObservable a = *this;
  out.M_ = [a, s](const ClassicalPoint& pt) { return ComplexMatrix(s * a.matrix(pt)); };
  if (a.has_analytic_matrix_gradient()) {
    out.dM_ = [a, s](const ClassicalPoint& pt) {
      MatrixGradient g = a.matrix_gradient(pt);
      for (std::size_t k = 0; k < g.dx.size(); ++k) {
        g.dx[k] *= s;
        g.dp[k] *= s;
      }
      return g;
    };
  }
  return out;
}

HybridObservable HybridObservable::with_scalar(ClassicalObservable f) const {
  HybridObservable out = *this;
  out.scalar_ = std::move(f);
  return out;
}

// ---------------------------------------------------------------------------

double expectation(const ComplexMatrix& G, const ComplexVector& c) {
  if (G.rows() != c.size() || G.cols() != c.size()) {
    throw DimensionError("expectation: matrix dimension does not match state dimension");
  }
  const Complex v = c.dot(G * c);  // conj(c)^T G c
  const double scale = std::max(1.0, std::abs(v));
  if (std::abs(v.imag()) > 1e-12 * scale) {
    std::ostringstream os;
    os << "expectation: imaginary residual " << v.imag() << " exceeds tolerance";
    throw IntegrityError(os.str());
  }
  return v.real();
}

double expectation(const QuadraticObservable& obs, const QuantumPhasePoint& q) {
  return expectation(obs.matrix().matrix(), decode_state(q));
}

QuantumGradient quadratic_gradient(const ComplexMatrix& G, const ComplexVector& c) {
  if (G.rows() != c.size()) {
    throw DimensionError("quadratic_gradient: matrix dimension does not match state dimension");
  }
  const ComplexVector v = G * c;
  return {kSqrt2 * v.real(), kSqrt2 * v.imag()};
}

double evaluate_hybrid(const HybridObservable& obs, const HybridPoint& h) { return obs.value(h); }

std::pair<HermitianMatrix, HermitianMatrix> position_momentum_matrices(const BasisSet& basis) {
  if (basis.kind != BasisKind::HarmonicOscillatorPosition) {
    throw UnsupportedError("position_momentum_matrices: requires a harmonic-oscillator basis");
  }
  const auto N = static_cast<Eigen::Index>(basis.dim);
  if (N < 1) throw DimensionError("position_momentum_matrices: empty basis");
  ComplexMatrix a = ComplexMatrix::Zero(N, N);
  for (Eigen::Index k = 1; k < N; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double mw = basis.mass * basis.frequency;
  const ComplexMatrix ad = a.adjoint();
  ComplexMatrix X = (a + ad) / std::sqrt(2.0 * mw);
  ComplexMatrix P = Complex(0.0, std::sqrt(mw / 2.0)) * (ad - a);
  return {HermitianMatrix(std::move(X)), HermitianMatrix(std::move(P))};
}

}  // namespace hybridflow
