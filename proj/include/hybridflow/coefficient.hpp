// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file coefficient.hpp
/// @brief Complex-valued classical coefficient functions c(x, p).
///
/// Coefficients are either exact polynomials in (x_1..x_n, p_1..p_n), closed
/// under sums, products and Poisson brackets, or opaque functions with an
/// optional analytic gradient.

#pragma once

#include "hybridflow/phase_space.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace hybridflow {

struct ComplexGradient {
  ComplexVector dx;
  ComplexVector dp;
};

/// Sparse polynomial; exponent vectors have length 2n (x powers, then p powers).
class Polynomial {
 public:
  using Exponents = std::vector<int>;

  explicit Polynomial(std::size_t n = 0) : n_(n) {}

  static Polynomial constant(std::size_t n, Complex c);
  /// Single monomial c * prod x_k^a_k p_k^b_k.
  static Polynomial monomial(Complex c, std::vector<int> x_powers, std::vector<int> p_powers);

  std::size_t classical_dim() const noexcept { return n_; }
  const std::map<Exponents, Complex>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Complex operator()(const ClassicalPoint& pt) const;
  /// d/d(variable v), v in [0, 2n): x_k is v = k, p_k is v = n + k.
  Polynomial derivative(std::size_t v) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(Complex s) const;
  Polynomial conj() const;

 private:
  void add_term(const Exponents& e, Complex c);

  std::size_t n_;
  std::map<Exponents, Complex> terms_;
};

class Coefficient {
 public:
  using ValueFn = std::function<Complex(const ClassicalPoint&)>;
  using GradientFn = std::function<ComplexGradient(const ClassicalPoint&)>;

  Coefficient() : Coefficient(Polynomial(0)) {}
  Coefficient(Polynomial poly);  // NOLINT: implicit by intent
  static Coefficient constant(std::size_t n, Complex c) { return Coefficient(Polynomial::constant(n, c)); }
  static Coefficient function(ValueFn f, GradientFn grad = {});

  bool is_polynomial() const noexcept { return poly_.has_value(); }
  const std::optional<Polynomial>& polynomial() const noexcept { return poly_; }
  /// True only for a polynomial with no terms.
  bool is_zero() const noexcept { return poly_ && poly_->is_zero(); }
  bool has_gradient() const noexcept { return poly_.has_value() || static_cast<bool>(grad_); }

  Complex operator()(const ClassicalPoint& pt) const;
  /// Throws UnsupportedError when no analytic gradient is available.
  ComplexGradient gradient(const ClassicalPoint& pt) const;

  Coefficient operator+(const Coefficient& o) const;
  Coefficient operator*(const Coefficient& o) const;
  Coefficient scaled(Complex s) const;
  Coefficient conj() const;

  /// {a, b}_CL. Polynomial inputs give a polynomial; otherwise the result has
  /// a value but no gradient.
  static Coefficient poisson_bracket(const Coefficient& a, const Coefficient& b);

 private:
  std::optional<Polynomial> poly_;
  ValueFn f_;
  GradientFn grad_;
};

}  // namespace hybridflow
