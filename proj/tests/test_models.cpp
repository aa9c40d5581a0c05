// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/errors.hpp"
#include "hybridflow/models.hpp"
#include "hybridflow/quadrature.hpp"
#include "hybridflow/random.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace hybridflow;

namespace {

const double kPi = std::numbers::pi;

RealVector one(double v) {
  RealVector r(1);
  r << v;
  return r;
}

BilinearParams bilinear(double lambda, std::size_t N) {
  BilinearParams b;
  b.m = one(1.0);
  b.omega = one(1.0);
  b.lambda = one(lambda);
  b.N = N;
  return b;
}

LocalizedParams localized(double lambda, std::size_t N) {
  LocalizedParams p;
  static_cast<BilinearParams&>(p) = bilinear(lambda, N);
  return p;
}

HybridPoint point(double x, double p, const ComplexVector& c) {
  return HybridPoint(ClassicalPoint(one(x), one(p)), encode_state(c));
}

ComplexVector ground(std::size_t N) {
  ComplexVector c = ComplexVector::Zero(N);
  c(0) = 1.0;
  return c;
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("gauss-hermite rules integrate polynomials exactly") {
    for (std::size_t n : {1, 5, 12, 40}) {
      const auto r = gauss_hermite(n);
      for (std::size_t k = 0; 2 * k < 2 * n; ++k) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < r.nodes.size(); ++i) s += r.weights(i) * std::pow(r.nodes(i), 2.0 * k);
        const double exact = std::tgamma(k + 0.5);
        CHECK(std::abs(s - exact) < 1e-12 * std::max(1.0, exact));
      }
      CHECK(std::abs(r.nodes.sum()) < 1e-12);
    }
    const auto u = gauss_hermite_unweighted(30, 0.5, 2.0);
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.nodes.size(); ++i) s += u.weights(i) * std::exp(-std::pow((u.nodes(i) - 0.5) / 2.0, 2));
    CHECK(s == doctest::Approx(2.0 * std::sqrt(kPi)).epsilon(1e-13));
  }

  TEST_CASE("hermite functions") {
    CHECK(hermite_eval(0, 0.0) == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-15));
    CHECK(hermite_eval(0, 0.0) == doctest::Approx(0.751126).epsilon(1e-6));
    CHECK(std::abs(hermite_eval(1, 0.0)) < 1e-300);
    for (double q : {-3.1, -0.4, 0.0, 1.7, 4.2}) {
      const RealVector phi = hermite_functions(12, q, 1.4, 0.6);
      for (unsigned j = 0; j < 12; ++j) {
        CHECK(std::abs(phi(j) - oracle::hermite_function(j, q, 1.4, 0.6)) < 1e-13);
      }
      const RealVector d = hermite_function_derivatives(12, q, 1.4, 0.6);
      const double h = 1e-6;
      const RealVector pp = hermite_functions(12, q + h, 1.4, 0.6);
      const RealVector pm = hermite_functions(12, q - h, 1.4, 0.6);
      CHECK(((pp - pm) / (2 * h) - d).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("quadrature reproduces orthonormality for i, j < 12") {
    const auto m = build_localized_bilinear(localized(1.0, 12));
    CHECK(m.orthonormality_error <= 1e-10);
    double worst = 0.0;
    for (unsigned i = 0; i < 12; ++i) {
      for (unsigned j = 0; j < 12; ++j) {
        const double s = oracle::trapezoid(
            [&](double q) { return oracle::hermite_function(i, q) * oracle::hermite_function(j, q); }, -12.0, 12.0, 2400);
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("free hybrid from zero potentials") {
    const auto basis = BasisSet::oscillator(6);
    const auto model = build_generic(1, polynomial_classical(1, {}), polynomial_quantum(basis, {}),
                                     std::vector<InteractionTerm>{}, basis);
    Rng rng(2);
    const auto h = random_hybrid_point(1, 6, rng);
    // Interior matrix elements of P^2 / 2 of the untruncated operator.
    const ComplexMatrix P2 = oracle::momentum(7) * oracle::momentum(7);
    const double expect = 0.5 * h.cl().p()(0) * h.cl().p()(0) +
                          0.5 * oracle::expect(P2.topLeftCorner(6, 6), h.qm().amplitudes());
    CHECK(total_hamiltonian(model, h) == doctest::Approx(expect).epsilon(1e-13));
  }

  TEST_CASE("harmonic generic model equals the uncoupled bilinear model") {
    const auto basis = BasisSet::oscillator(8);
    const auto generic = build_generic(1, polynomial_classical(1, {0.0, 0.0, 0.5}),
                                       polynomial_quantum(basis, {0.0, 0.0, 0.5}), std::vector<InteractionTerm>{}, basis);
    const auto bil = build_bilinear(bilinear(0.0, 8));
    CHECK((generic.H_qm.matrix() - bil.H_qm.matrix()).cwiseAbs().maxCoeff() < 1e-13);
    Rng rng(3);
    for (int s = 0; s < 5; ++s) {
      const auto h = random_hybrid_point(1, 8, rng);
      CHECK(total_hamiltonian(generic, h) == doctest::Approx(total_hamiltonian(bil, h)).epsilon(1e-13));
    }
  }

  TEST_CASE("x X P recipe is symmetrized") {
    const auto basis = BasisSet::oscillator(5);
    InteractionTerm t;
    t.coefficient = 1.0;
    t.x_powers = {1};
    t.p_powers = {0};
    t.X_power = 1;
    t.P_power = 1;
    const auto I = interaction_from_recipe(1, basis, {t});
    const ComplexMatrix X = oracle::position(6), P = oracle::momentum(6);
    const ComplexMatrix sym = ((X * P + P * X) / 2.0).topLeftCorner(5, 5);
    const ClassicalPoint at(one(1.5), one(0.0));
    CHECK((I.matrix(at) - 1.5 * sym).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(hermitian_defect(I.matrix(at)) < 1e-14);
    const auto g = I.matrix_gradient(at);
    CHECK((g.dx[0] - sym).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("bilinear backreaction and normal modes") {
    const auto model = build_bilinear(bilinear(0.1, 6));
    const Complex alpha = coherent_amplitude(0.5, 0.0);
    const auto h = point(0.3, 0.0, coherent_state(6, alpha));
    const auto [X, P] = position_momentum_matrices(BasisSet::oscillator(6));
    const double Xmean = oracle::expect(X.matrix(), h.qm().amplitudes());
    REQUIRE(Xmean > 0.0);
    RealVector g;
    model_gradient(model)(h.flatten(), g);
    // dp/dt = -dH/dx = -x - lambda <X>.
    CHECK(-g(0) == doctest::Approx(-0.3 - 0.1 * Xmean).epsilon(1e-14));

    Eigen::Matrix4d A;
    A << 0, 1, 0, 0, -1, 0, -0.1, 0, 0, 0, 0, 1, -0.1, 0, -1, 0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(A);
    std::vector<double> w;
    for (int k = 0; k < 4; ++k) w.push_back(std::abs(es.eigenvalues()(k).imag()));
    std::sort(w.begin(), w.end());
    CHECK(w[0] == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
    CHECK(w[3] == doctest::Approx(std::sqrt(1.1)).epsilon(1e-12));
    CHECK(w[3] == doctest::Approx(1.0488).epsilon(1e-4));
    CHECK(w[0] == doctest::Approx(0.9487).epsilon(1e-4));
  }

  TEST_CASE("bilinear parameter validation names the field") {
    BilinearParams b = bilinear(0.1, 4);
    b.m = one(-1.0);
    CHECK_THROWS_WITH_AS(b.validate(), doctest::Contains("m"), Error);
    b = bilinear(0.1, 1);
    CHECK_THROWS_WITH_AS(b.validate(), doctest::Contains("N"), Error);
  }

  TEST_CASE("localized interaction values") {
    const auto m = build_localized_bilinear(localized(1.0, 10));
    Rng rng(4);
    const auto q = random_state(10, rng);
    CHECK(localized_interaction(m, HybridPoint(ClassicalPoint(one(0.0), one(0.0)), q)).value == 0.0);
    const auto v = localized_interaction(m, point(1.0, 0.0, ground(10)));
    CHECK(v.value == doctest::Approx(std::exp(-1.0) / std::sqrt(kPi)).epsilon(1e-14));
    CHECK(v.value == doctest::Approx(0.20755).epsilon(1e-4));
    CHECK_FALSE(v.warning.has_value());
    const auto far = localized_interaction(m, point(50.0, 0.0, ground(10)));
    CHECK(far.warning.has_value());
  }

  TEST_CASE("localized interaction gradient matches finite differences") {
    const auto m = build_localized_bilinear(localized(0.7, 10));
    Rng rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int s = 0; s < 20; ++s) {
      const HybridPoint h(ClassicalPoint(one(u(rng)), one(0.2)), random_state(10, rng));
      const auto g = m.model.interaction.gradient(h);
      const double x = h.cl().x()(0), e = 1e-5;
      auto at = [&](double xx) {
        return m.model.interaction.value(HybridPoint(ClassicalPoint(one(xx), one(0.2)), h.qm()));
      };
      CHECK(std::abs(g.dx(0) - (at(x + e) - at(x - e)) / (2 * e)) < 1e-7);
      CHECK(g.dp(0) == 0.0);
    }
  }

  TEST_CASE("coherent states and truncation monitors") {
    const Complex a = coherent_amplitude(0.8, -0.4);
    const auto c = coherent_state(30, a);
    CHECK(c.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(oracle::expect(oracle::position(30), c) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(oracle::expect(oracle::momentum(30), c) == doctest::Approx(-0.4).epsilon(1e-12));

    const auto q = encode_state(coherent_state(4, Complex(1.5, 0.0)));
    const auto cc = q.amplitudes();
    CHECK(truncation_occupation(q) == doctest::Approx(std::norm(cc(2)) + std::norm(cc(3))).epsilon(1e-14));
    CHECK(truncation_warning(q).has_value());
    CHECK_FALSE(truncation_warning(encode_state(ground(8))).has_value());
  }

  TEST_CASE("weyl monomials beyond degree 16 are unsupported") {
    CHECK_THROWS_AS(weyl_monomial(BasisSet::oscillator(4), 9, 8), UnsupportedError);
    const auto XP = weyl_monomial(BasisSet::oscillator(4), 1, 1);
    CHECK(hermitian_defect(XP.matrix()) < 1e-14);
  }
}
