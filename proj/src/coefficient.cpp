// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/coefficient.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>

namespace hybridflow {

Polynomial Polynomial::constant(std::size_t n, Complex c) {
  Polynomial p(n);
  p.add_term(Exponents(2 * n, 0), c);
  return p;
}

Polynomial Polynomial::monomial(Complex c, std::vector<int> x_powers, std::vector<int> p_powers) {
  if (x_powers.size() != p_powers.size()) {
    throw DimensionError("Polynomial::monomial: x and p power lists differ in length");
  }
  Polynomial p(x_powers.size());
  Exponents e = std::move(x_powers);
  e.insert(e.end(), p_powers.begin(), p_powers.end());
  for (int k : e) {
    if (k < 0) throw Error("Polynomial::monomial: negative exponent");
  }
  p.add_term(e, c);
  return p;
}

void Polynomial::add_term(const Exponents& e, Complex c) {
  if (c == Complex(0.0, 0.0)) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0, 0.0)) terms_.erase(it);
  }
}

Complex Polynomial::operator()(const ClassicalPoint& pt) const {
  if (n_ == 0) return terms_.empty() ? Complex(0.0, 0.0) : terms_.begin()->second;
  if (pt.dim() != n_) throw DimensionError("Polynomial: classical dimension mismatch");
  Complex sum(0.0, 0.0);
  for (const auto& [e, c] : terms_) {
    double m = 1.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      for (int r = 0; r < e[k]; ++r) m *= pt.x()[kk];
      for (int r = 0; r < e[n_ + k]; ++r) m *= pt.p()[kk];
    }
    sum += c * m;
  }
  return sum;
}

Polynomial Polynomial::derivative(std::size_t v) const {
  if (v >= 2 * n_) throw DimensionError("Polynomial::derivative: variable index out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[v] == 0) continue;
    Exponents d = e;
    d[v] -= 1;
    out.add_term(d, c * static_cast<double>(e[v]));
  }
  return out;
}

namespace {

// A polynomial built with n = 0 is a constant and adapts to any dimension.
Polynomial lift(const Polynomial& p, std::size_t n) {
  if (p.classical_dim() == n) return p;
  if (p.classical_dim() != 0) throw DimensionError("Polynomial: classical dimension mismatch");
  return p.is_zero() ? Polynomial(n) : Polynomial::constant(n, p.terms().begin()->second);
}

}  // namespace

Polynomial Polynomial::operator+(const Polynomial& o_in) const {
  const std::size_t n = std::max(n_, o_in.n_);
  if (n_ != n) return lift(*this, n) + o_in;
  const Polynomial o = lift(o_in, n);
  Polynomial out = *this;
  for (const auto& [e, c] : o.terms_) out.add_term(e, c);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& o_in) const {
  const std::size_t n = std::max(n_, o_in.n_);
  if (n_ != n) return lift(*this, n) * o_in;
  const Polynomial o = lift(o_in, n);
  Polynomial out(n_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(ea.size());
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = ea[v] + eb[v];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::scaled(Complex s) const {
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, c * s);
  return out;
}

Polynomial Polynomial::conj() const {
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) out.add_term(e, std::conj(c));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ComplexGradient polynomial_gradient(const Polynomial& p, const ClassicalPoint& pt) {
  const std::size_t n = p.classical_dim();
  if (n == 0) {
    const auto m = static_cast<Eigen::Index>(pt.dim());
    return {ComplexVector::Zero(m), ComplexVector::Zero(m)};
  }
  if (pt.dim() != n) throw DimensionError("Coefficient: classical dimension mismatch");
  ComplexGradient g{ComplexVector(static_cast<Eigen::Index>(n)), ComplexVector(static_cast<Eigen::Index>(n))};
  for (std::size_t k = 0; k < n; ++k) {
    g.dx[static_cast<Eigen::Index>(k)] = p.derivative(k)(pt);
    g.dp[static_cast<Eigen::Index>(k)] = p.derivative(n + k)(pt);
  }
  return g;
}

}  // namespace

Coefficient::Coefficient(Polynomial poly) : poly_(std::move(poly)) {}

Coefficient Coefficient::function(ValueFn f, GradientFn grad) {
  if (!f) throw Error("Coefficient::function: empty value function");
  Coefficient c;
  c.poly_.reset();
  c.f_ = std::move(f);
  c.grad_ = std::move(grad);
  return c;
}

Complex Coefficient::operator()(const ClassicalPoint& pt) const {
  if (poly_) {
    // A zero polynomial built without a dimension evaluates anywhere.
    if (poly_->is_zero()) return Complex(0.0, 0.0);
    return (*poly_)(pt);
  }
  return f_(pt);
}

ComplexGradient Coefficient::gradient(const ClassicalPoint& pt) const {
  if (poly_) {
    if (poly_->is_zero()) {
      const auto n = static_cast<Eigen::Index>(pt.dim());
      return {ComplexVector::Zero(n), ComplexVector::Zero(n)};
    }
    return polynomial_gradient(*poly_, pt);
  }
  if (!grad_) throw UnsupportedError("Coefficient: no analytic gradient available");
  return grad_(pt);
}

Coefficient Coefficient::operator+(const Coefficient& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (poly_ && o.poly_) return Coefficient(*poly_ + *o.poly_);
  const Coefficient a = *this, b = o;
  GradientFn grad;
  if (a.has_gradient() && b.has_gradient()) {
    grad = [a, b](const ClassicalPoint& pt) {
      ComplexGradient ga = a.gradient(pt);
      const ComplexGradient gb = b.gradient(pt);
      ga.dx += gb.dx;
      ga.dp += gb.dp;
      return ga;
    };
  }
  return function([a, b](const ClassicalPoint& pt) { return a(pt) + b(pt); }, std::move(grad));
}

Coefficient Coefficient::operator*(const Coefficient& o) const {
  if (is_zero() || o.is_zero()) return Coefficient(Polynomial(0));
  if (poly_ && o.poly_) return Coefficient(*poly_ * *o.poly_);
  const Coefficient a = *this, b = o;
  GradientFn grad;
  if (a.has_gradient() && b.has_gradient()) {
    grad = [a, b](const ClassicalPoint& pt) {
      const Complex va = a(pt), vb = b(pt);
      const ComplexGradient ga = a.gradient(pt), gb = b.gradient(pt);
      return ComplexGradient{ComplexVector(ga.dx * vb + va * gb.dx), ComplexVector(ga.dp * vb + va * gb.dp)};
    };
  }
  return function([a, b](const ClassicalPoint& pt) { return a(pt) * b(pt); }, std::move(grad));
}

Coefficient Coefficient::scaled(Complex s) const {
  if (poly_) return Coefficient(poly_->scaled(s));
  const Coefficient a = *this;
  GradientFn grad;
  if (a.has_gradient()) {
    grad = [a, s](const ClassicalPoint& pt) {
      ComplexGradient g = a.gradient(pt);
      g.dx *= s;
      g.dp *= s;
      return g;
    };
  }
  return function([a, s](const ClassicalPoint& pt) { return s * a(pt); }, std::move(grad));
}

Coefficient Coefficient::conj() const {
  if (poly_) return Coefficient(poly_->conj());
  const Coefficient a = *this;
  GradientFn grad;
  if (a.has_gradient()) {
    grad = [a](const ClassicalPoint& pt) {
      const ComplexGradient g = a.gradient(pt);
      return ComplexGradient{g.dx.conjugate(), g.dp.conjugate()};
    };
  }
  return function([a](const ClassicalPoint& pt) { return std::conj(a(pt)); }, std::move(grad));
}

Coefficient Coefficient::poisson_bracket(const Coefficient& a, const Coefficient& b) {
  if (a.is_zero() || b.is_zero()) return Coefficient(Polynomial(0));
  if (!a.has_gradient() || !b.has_gradient()) {
    throw UnsupportedError("Coefficient::poisson_bracket: operands need analytic gradients");
  }
  if (a.poly_ && b.poly_) {
    if (a.poly_->classical_dim() == 0 || b.poly_->classical_dim() == 0) return Coefficient(Polynomial(0));
    const Polynomial& pa = *a.poly_;
    const Polynomial& pb = *b.poly_;
    if (pa.classical_dim() != pb.classical_dim()) {
      throw DimensionError("Coefficient::poisson_bracket: classical dimension mismatch");
    }
    const std::size_t n = pa.classical_dim();
    Polynomial out(n);
    for (std::size_t k = 0; k < n; ++k) {
      out = out + pa.derivative(k) * pb.derivative(n + k) + (pa.derivative(n + k) * pb.derivative(k)).scaled(-1.0);
    }
    return Coefficient(out);
  }
  return function([a, b](const ClassicalPoint& pt) {
    const ComplexGradient ga = a.gradient(pt), gb = b.gradient(pt);
    Complex s(0.0, 0.0);
    for (Eigen::Index k = 0; k < ga.dx.size(); ++k) s += ga.dx[k] * gb.dp[k] - ga.dp[k] * gb.dx[k];
    return s;
  });
}

}  // namespace hybridflow
