// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/phase_space.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace hybridflow {

namespace {

bool all_finite(const RealVector& v) { return v.allFinite(); }

// Bitwise comparison: two states are equal only if every double matches.
bool same_bits(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

ClassicalPoint::ClassicalPoint(RealVector x, RealVector p) : x_(std::move(x)), p_(std::move(p)) {
  if (x_.size() != p_.size()) {
    throw DimensionError("ClassicalPoint: x and p must have equal length");
  }
  if (!all_finite(x_) || !all_finite(p_)) {
    throw IntegrityError("ClassicalPoint: non-finite coordinate");
  }
}

ClassicalPoint ClassicalPoint::zero(std::size_t n) {
  return ClassicalPoint(RealVector::Zero(static_cast<Eigen::Index>(n)),
                        RealVector::Zero(static_cast<Eigen::Index>(n)));
}

bool ClassicalPoint::operator==(const ClassicalPoint& other) const {
  return same_bits(x_, other.x_) && same_bits(p_, other.p_);
}

QuantumPhasePoint::QuantumPhasePoint(RealVector X, RealVector P) : X_(std::move(X)), P_(std::move(P)) {
  if (X_.size() != P_.size()) {
    throw DimensionError("QuantumPhasePoint: X and P must have equal length");
  }
  if (X_.size() < 1) {
    throw DimensionError("QuantumPhasePoint: quantum dimension must be at least 1");
  }
  if (!all_finite(X_) || !all_finite(P_)) {
    throw IntegrityError("QuantumPhasePoint: non-finite coordinate");
  }
}

QuantumPhasePoint QuantumPhasePoint::physical(RealVector X, RealVector P, double tolerance) {
  QuantumPhasePoint q(std::move(X), std::move(P));
  const double c = constraint_value(q);
  if (std::abs(c - 1.0) > tolerance) {
    std::ostringstream os;
    os << "QuantumPhasePoint: constraint value " << c << " deviates from 1 by more than " << tolerance;
    throw NormalizationError(os.str(), c);
  }
  return q;
}

ComplexVector QuantumPhasePoint::amplitudes() const { return decode_state(*this); }

bool QuantumPhasePoint::operator==(const QuantumPhasePoint& other) const {
  return same_bits(X_, other.X_) && same_bits(P_, other.P_);
}

RealVector HybridPoint::flatten() const {
  const auto n = static_cast<Eigen::Index>(classical_dim());
  const auto N = static_cast<Eigen::Index>(quantum_dim());
  RealVector y(2 * n + 2 * N);
  y.segment(0, n) = cl_.x();
  y.segment(n, n) = cl_.p();
  y.segment(2 * n, N) = qm_.X();
  y.segment(2 * n + N, N) = qm_.P();
  return y;
}

HybridPoint HybridPoint::unflatten(const RealVector& y, std::size_t n_, std::size_t N_) {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto N = static_cast<Eigen::Index>(N_);
  if (y.size() != 2 * n + 2 * N) {
    throw DimensionError("HybridPoint::unflatten: vector length does not match 2(n+N)");
  }
  return HybridPoint(ClassicalPoint(y.segment(0, n), y.segment(n, n)),
                     QuantumPhasePoint(y.segment(2 * n, N), y.segment(2 * n + N, N)));
}

BasisSet BasisSet::oscillator(std::size_t N, double mass, double frequency) {
  if (!(mass > 0.0) || !(frequency > 0.0)) {
    throw Error("BasisSet: oscillator mass and frequency must be positive");
  }
  return {BasisKind::HarmonicOscillatorPosition, N, mass, frequency};
}

QuantumPhasePoint encode_state(const ComplexVector& amplitudes) {
  if (amplitudes.size() < 1) {
    throw DimensionError("encode_state: empty amplitude vector");
  }
  const double norm = amplitudes.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kAmplitudeNormTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "encode_state: amplitude vector has norm " << norm << ", expected 1";
    throw NormalizationError(os.str(), norm);
  }
  // Absorb the admitted sub-tolerance norm error so the constraint holds to rounding.
  const ComplexVector c = (norm == 1.0) ? amplitudes : ComplexVector(amplitudes / norm);
  const double s = std::sqrt(2.0);
  return QuantumPhasePoint(s * c.real(), s * c.imag());
}

ComplexVector decode_state(const QuantumPhasePoint& q) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector c(q.X().size());
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = Complex(q.X()[i] * s, q.P()[i] * s);
  return c;
}

double constraint_value(const QuantumPhasePoint& q) {
  return 0.5 * (q.X().squaredNorm() + q.P().squaredNorm());
}

QuantumPhasePoint phase_rotate(const QuantumPhasePoint& q, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  RealVector X = c * q.X() - s * q.P();
  RealVector P = s * q.X() + c * q.P();
  return QuantumPhasePoint(std::move(X), std::move(P));
}

}  // namespace hybridflow
