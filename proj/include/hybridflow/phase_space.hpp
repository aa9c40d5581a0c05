// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file phase_space.hpp
/// @brief Joint classical/quantum state space in the oscillator representation.
///
/// A quantum state |Psi> = sum_i c_i |Phi_i> is stored as real canonical pairs
/// (X_i, P_i) with c_i = (X_i + i P_i) / sqrt(2). Normalized states live on the
/// sphere C = (1/2) sum_i (X_i^2 + P_i^2) = 1.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace hybridflow {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kConstraintTolerance = 1e-12;
inline constexpr double kAmplitudeNormTolerance = 1e-9;

/// Canonical coordinates (x_k, p_k) of the classical sector.
class ClassicalPoint {
 public:
  ClassicalPoint() = default;
  ClassicalPoint(RealVector x, RealVector p);

  static ClassicalPoint zero(std::size_t n);

  const RealVector& x() const noexcept { return x_; }
  const RealVector& p() const noexcept { return p_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.size()); }

  bool operator==(const ClassicalPoint& other) const;

 private:
  RealVector x_;
  RealVector p_;
};

/// Real canonical pairs (X_i, P_i) of the quantum sector.
///
/// The plain constructor accepts any finite coordinates; use physical() to
/// additionally require the point to sit on the constraint sphere.
class QuantumPhasePoint {
 public:
  QuantumPhasePoint() = default;
  QuantumPhasePoint(RealVector X, RealVector P);

  /// Throws NormalizationError when |C - 1| > tolerance.
  static QuantumPhasePoint physical(RealVector X, RealVector P,
                                    double tolerance = kConstraintTolerance);

  const RealVector& X() const noexcept { return X_; }
  const RealVector& P() const noexcept { return P_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(X_.size()); }

  /// c_i = (X_i + i P_i) / sqrt(2)
  ComplexVector amplitudes() const;

  bool operator==(const QuantumPhasePoint& other) const;

 private:
  RealVector X_;
  RealVector P_;
};

class HybridPoint {
 public:
  HybridPoint() = default;
  HybridPoint(ClassicalPoint cl, QuantumPhasePoint qm) : cl_(std::move(cl)), qm_(std::move(qm)) {}

  const ClassicalPoint& cl() const noexcept { return cl_; }
  const QuantumPhasePoint& qm() const noexcept { return qm_; }
  std::size_t classical_dim() const noexcept { return cl_.dim(); }
  std::size_t quantum_dim() const noexcept { return qm_.dim(); }

  /// Layout [x_1..x_n, p_1..p_n, X_1..X_N, P_1..P_N].
  RealVector flatten() const;
  static HybridPoint unflatten(const RealVector& y, std::size_t n, std::size_t N);

  bool operator==(const HybridPoint& other) const { return cl_ == other.cl_ && qm_ == other.qm_; }

 private:
  ClassicalPoint cl_;
  QuantumPhasePoint qm_;
};

enum class BasisKind { AbstractOrthonormal, HarmonicOscillatorPosition };

/// Orthonormal basis the amplitudes refer to. The harmonic-oscillator kind is
/// the Hermite-function basis of a mass M, frequency Omega oscillator.
struct BasisSet {
  BasisKind kind = BasisKind::AbstractOrthonormal;
  std::size_t dim = 1;
  double mass = 1.0;
  double frequency = 1.0;

  static BasisSet abstract(std::size_t N) { return {BasisKind::AbstractOrthonormal, N, 1.0, 1.0}; }
  static BasisSet oscillator(std::size_t N, double mass = 1.0, double frequency = 1.0);
};

/// X_i = sqrt(2) Re c_i, P_i = sqrt(2) Im c_i. Requires | ||c|| - 1 | <= 1e-9.
QuantumPhasePoint encode_state(const ComplexVector& amplitudes);

ComplexVector decode_state(const QuantumPhasePoint& q);

double constraint_value(const QuantumPhasePoint& q);

/// Multiplies every amplitude by e^{i theta}.
QuantumPhasePoint phase_rotate(const QuantumPhasePoint& q, double theta);

}  // namespace hybridflow
