// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file observables.hpp
/// @brief Classical, quantum (quadratic-form) and hybrid observables.
///
/// A quantum observable is the expectation <Psi|G|Psi> of a Hermitian matrix,
/// i.e. the quadratic form (1/2) sum_ij G_ij (X_i - i P_i)(X_j + i P_j).
/// A hybrid observable adds a classical scalar f(x, p) and lets the matrix
/// depend on the classical point.

#pragma once

#include "hybridflow/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hybridflow {

inline constexpr double kHermitianTolerance = 1e-12;

/// Central-difference step used whenever an analytic derivative is absent.
inline double fd_step(double coordinate) { return 1e-6 * std::max(1.0, std::abs(coordinate)); }

/// Dense complex matrix with G = G^dagger enforced at construction.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(ComplexMatrix entries, double tolerance = kHermitianTolerance);

  static HermitianMatrix identity(std::size_t N);
  static HermitianMatrix zero(std::size_t N);
  static HermitianMatrix diagonal(const RealVector& d);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }

 private:
  ComplexMatrix m_;
};

/// Largest |G_ij - conj(G_ji)|.
double hermitian_defect(const ComplexMatrix& m);

class QuadraticObservable {
 public:
  QuadraticObservable() = default;
  explicit QuadraticObservable(HermitianMatrix m) : m_(std::move(m)) {}

  const HermitianMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.dim(); }

 private:
  HermitianMatrix m_;
};

struct ClassicalGradient {
  RealVector dx;
  RealVector dp;
};

struct QuantumGradient {
  RealVector dX;
  RealVector dP;
};

/// Real differentiable function of (x, p). Gradients fall back to central
/// differences when no analytic gradient is supplied.
class ClassicalObservable {
 public:
  using ValueFn = std::function<double(const ClassicalPoint&)>;
  using GradientFn = std::function<ClassicalGradient(const ClassicalPoint&)>;

  ClassicalObservable() : ClassicalObservable(zero()) {}
  explicit ClassicalObservable(ValueFn f, GradientFn grad = {});

  static ClassicalObservable zero();
  static ClassicalObservable constant(double value);
  static ClassicalObservable position(std::size_t k);
  static ClassicalObservable momentum(std::size_t k);

  double operator()(const ClassicalPoint& pt) const { return f_(pt); }
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(grad_); }
  ClassicalGradient gradient(const ClassicalPoint& pt) const;
  ClassicalGradient finite_difference_gradient(const ClassicalPoint& pt) const;

  ClassicalObservable operator+(const ClassicalObservable& other) const;
  ClassicalObservable scaled(double s) const;

  bool is_zero() const noexcept { return zero_; }

 private:
  ValueFn f_;
  GradientFn grad_;
  bool zero_ = false;
};

/// dM/dx_k and dM/dp_k for k = 0..n-1.
struct MatrixGradient {
  std::vector<ComplexMatrix> dx;
  std::vector<ComplexMatrix> dp;
};

struct HybridGradient {
  RealVector dx;
  RealVector dp;
  RealVector dX;
  RealVector dP;
};

/// A(x, p; X, P) = f(x, p) + <Psi| M(x, p) |Psi>.
///
/// Either part may be absent. An observable with no matrix part belongs to the
/// classical sector; one with a constant matrix and zero scalar belongs to the
/// quantum sector.
class HybridObservable {
 public:
  using MatrixFn = std::function<ComplexMatrix(const ClassicalPoint&)>;
  using MatrixGradientFn = std::function<MatrixGradient(const ClassicalPoint&)>;

  HybridObservable() = default;

  static HybridObservable classical(ClassicalObservable f);
  static HybridObservable quantum(const HermitianMatrix& m);
  static HybridObservable quantum(const QuadraticObservable& g) { return quantum(g.matrix()); }
  /// Matrix field M(x, p) of dimension N; dM may be empty (finite differences).
  static HybridObservable field(std::size_t N, MatrixFn M, MatrixGradientFn dM = {});
  static HybridObservable zero() { return classical(ClassicalObservable::zero()); }

  /// Quantum dimension of the matrix part, 0 when there is none.
  std::size_t quantum_dim() const noexcept { return N_; }
  bool has_matrix_part() const noexcept { return N_ > 0; }
  bool has_constant_matrix() const noexcept { return constant_.has_value(); }
  bool has_analytic_matrix_gradient() const noexcept { return constant_.has_value() || static_cast<bool>(dM_); }
  const ClassicalObservable& scalar_part() const noexcept { return scalar_; }

  /// M(x, p); throws IntegrityError if the returned matrix is not Hermitian.
  ComplexMatrix matrix(const ClassicalPoint& pt) const;
  MatrixGradient matrix_gradient(const ClassicalPoint& pt) const;

  double value(const HybridPoint& h) const;
  HybridGradient gradient(const HybridPoint& h) const;

  HybridObservable operator+(const HybridObservable& other) const;
  HybridObservable scaled(double s) const;
  HybridObservable with_scalar(ClassicalObservable f) const;

 private:
  void check_dims(const HybridPoint& h) const;

  ClassicalObservable scalar_ = ClassicalObservable::zero();
  std::size_t N_ = 0;
  std::optional<ComplexMatrix> constant_;
  MatrixFn M_;
  MatrixGradientFn dM_;
};

/// <Psi|G|Psi> at q.
double expectation(const QuadraticObservable& obs, const QuantumPhasePoint& q);
double expectation(const ComplexMatrix& G, const ComplexVector& c);

/// (dG/dX_i, dG/dP_i) = (sqrt2 Re (Gc)_i, sqrt2 Im (Gc)_i).
QuantumGradient quadratic_gradient(const ComplexMatrix& G, const ComplexVector& c);

double evaluate_hybrid(const HybridObservable& obs, const HybridPoint& h);

/// Position and momentum operators of the truncated oscillator eigenbasis.
/// [X, P] = i holds only on the leading (N-1)x(N-1) block.
std::pair<HermitianMatrix, HermitianMatrix> position_momentum_matrices(const BasisSet& basis);

}  // namespace hybridflow
