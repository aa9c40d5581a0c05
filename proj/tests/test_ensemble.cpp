// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/ensemble.hpp"
#include "hybridflow/errors.hpp"
#include "hybridflow/models.hpp"
#include "hybridflow/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hybridflow;

namespace {

RealVector vec(std::initializer_list<double> v) {
  RealVector r(v.size());
  int i = 0;
  for (double a : v) r(i++) = a;
  return r;
}

ComplexVector basis_state(std::size_t N, std::size_t k) {
  ComplexVector c = ComplexVector::Zero(N);
  c(k) = 1.0;
  return c;
}

// prob * N(x; mx, s) N(p; mp, s), integrates to prob.
WeightFn gaussian_weight(double prob, double mx, double mp, double s) {
  return [=](const ClassicalPoint& pt) {
    const double dx = (pt.x()(0) - mx) / s, dp = (pt.p()(0) - mp) / s;
    return prob * std::exp(-0.5 * (dx * dx + dp * dp)) / (2 * std::numbers::pi * s * s);
  };
}

WeightFn constant_weight(double w) {
  return [w](const ClassicalPoint&) { return w; };
}

HybridPoint at(const ComplexVector& c) { return HybridPoint(ClassicalPoint(vec({0.1}), vec({0.2})), encode_state(c)); }

ModelSpec bilinear(double lambda, std::size_t N) {
  BilinearParams b;
  b.m = vec({1.0});
  b.omega = vec({1.0});
  b.lambda = vec({lambda});
  b.N = N;
  return build_bilinear(b);
}

SamplerSettings sampler(std::size_t count, std::uint64_t seed) {
  SamplerSettings s;
  s.count = count;
  s.seed = seed;
  s.proposal.mean = vec({0.5, 0.0});
  s.proposal.sigma = vec({0.8, 0.8});
  return s;
}

DensitySpec two_component(std::size_t N) {
  ComplexVector mix = ComplexVector::Zero(N);
  mix(0) = 1.0 / std::sqrt(2.0);
  mix(1) = Complex(0.0, 1.0 / std::sqrt(2.0));
  return DensitySpec(1, N,
                     {{gaussian_weight(0.6, 0.5, 0.0, 0.5), basis_state(N, 0)},
                      {gaussian_weight(0.4, 0.3, 0.2, 0.4), mix}});
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("density of pure and mixed components") {
    ComplexVector psi(2);
    psi << 0.6, Complex(0.0, 0.8);
    const DensitySpec pure(1, 2, {{constant_weight(1.0), psi}});
    CHECK(density_value(pure, at(psi)) == doctest::Approx(1.0).epsilon(1e-15));

    ComplexVector orth(2);
    orth << 0.8, Complex(0.0, -0.6);
    const DensitySpec other(1, 2, {{constant_weight(1.0), orth}});
    CHECK(std::abs(density_value(other, at(psi))) < 1e-15);

    const DensitySpec mix(1, 2, {{constant_weight(0.3), psi}, {constant_weight(0.7), orth}});
    CHECK(density_value(mix, at(psi)) == doctest::Approx(0.3).epsilon(1e-15));
  }

  TEST_CASE("mixture linearity is exact") {
    Rng rng(1);
    const auto a = random_state(3, rng).amplitudes();
    const auto b = random_state(3, rng).amplitudes();
    const DensitySpec A(1, 3, {{gaussian_weight(1.0, 0.0, 0.0, 1.0), a}});
    const DensitySpec B(1, 3, {{gaussian_weight(1.0, 0.5, 0.0, 0.7), b}});
    const double p = 0.25;
    const DensitySpec M(1, 3, {{gaussian_weight(p, 0.0, 0.0, 1.0), a}, {gaussian_weight(1 - p, 0.5, 0.0, 0.7), b}});
    for (int s = 0; s < 20; ++s) {
      const auto h = random_hybrid_point(1, 3, rng);
      const double expect = p * density_value(A, h) + (1 - p) * density_value(B, h);
      CHECK(density_value(M, h) == doctest::Approx(expect).epsilon(1e-14));
      CHECK(density_value(M, h) >= 0.0);
    }
  }

  TEST_CASE("malformed densities are rejected") {
    CHECK_THROWS_AS(DensitySpec(1, 2, {{constant_weight(1.0), ComplexVector::Ones(2)}}), NormalizationError);
    CHECK_THROWS_AS(DensitySpec(1, 2, {{constant_weight(1.0), basis_state(3, 0)}}), DimensionError);
    const DensitySpec neg(1, 2, {{constant_weight(-0.1), basis_state(2, 0)}});
    CHECK_THROWS_AS(density_value(neg, at(basis_state(2, 0))), IntegrityError);
  }

  TEST_CASE("separable densities") {
    SeparableRecipe pure{1, 2, 2, {SeparableTerm{constant_weight(1.0), {{1.0, basis_state(2, 0)}}, {{1.0, basis_state(2, 1)}}}}};
    const auto d = separable_density(pure);
    CHECK(d.components().size() == 1);
    CHECK(density_value(d, at(basis_state(4, 1))) == doctest::Approx(1.0));

    SeparableRecipe mixed{1, 2, 2,
                          {SeparableTerm{constant_weight(1.0),
                                         {{0.5, basis_state(2, 0)}, {0.5, basis_state(2, 1)}},
                                         {{0.5, basis_state(2, 0)}, {0.5, basis_state(2, 1)}}}}};
    const auto dm = separable_density(mixed);
    Rng rng(2);
    for (int s = 0; s < 10; ++s) {
      CHECK(density_value(dm, random_hybrid_point(1, 4, rng)) == doctest::Approx(0.25).epsilon(1e-14));
    }
  }

  TEST_CASE("two-term separable recipe matches direct summation") {
    Rng rng(3);
    const auto a0 = random_state(2, rng).amplitudes();
    ComplexVector a1(2);
    a1 << -std::conj(a0(1)), std::conj(a0(0));
    const auto b0 = random_state(3, rng).amplitudes();
    SeparableRecipe r{1, 2, 3,
                      {SeparableTerm{gaussian_weight(0.7, 0.0, 0.0, 1.0), {{0.8, a0}, {0.2, a1}}, {{1.0, b0}}},
                       SeparableTerm{gaussian_weight(0.3, 1.0, 0.0, 0.5), {{1.0, a1}}, {{0.5, b0}, {0.5, basis_state(3, 2)}}}}};
    // Orthogonalize the second B factor against b0 for a valid recipe.
    ComplexVector e2 = basis_state(3, 2) - b0 * (b0.adjoint() * basis_state(3, 2))(0, 0);
    e2 /= e2.norm();
    r.terms[1].factor_b[1].second = e2;
    const auto d = separable_density(r);
    for (int s = 0; s < 20; ++s) {
      const auto h = random_hybrid_point(1, 6, rng);
      const ComplexVector psi = h.qm().amplitudes();
      double direct = 0.0;
      for (const auto& t : r.terms) {
        for (const auto& [pa, va] : t.factor_a) {
          for (const auto& [pb, vb] : t.factor_b) {
            ComplexVector prod(6);
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 3; ++j) prod(3 * i + j) = va(i) * vb(j);
            direct += t.weight(h.cl()) * pa * pb * std::norm(prod.dot(psi));
          }
        }
      }
      CHECK(density_value(d, h) == doctest::Approx(direct).epsilon(1e-13));
    }
  }

  TEST_CASE("normalization by quadrature") {
    GaussianProposal prop{vec({0.5, 0.0}), vec({0.8, 0.8})};
    CHECK(normalization_integral(two_component(4), prop) == doctest::Approx(1.0).epsilon(1e-10));
    const DensitySpec half(1, 2, {{gaussian_weight(0.5, 0.0, 0.0, 0.5), basis_state(2, 0)}});
    CHECK_THROWS_AS(validate_normalization(half, prop), NormalizationError);
    CHECK_THROWS_AS((GaussianProposal{vec({0.0, 0.0}), vec({0.0, 1.0})}.validate(1)), SamplerError);
  }

  TEST_CASE("density is constant along characteristics") {
    const auto model = bilinear(0.1, 6);
    EnsembleOptions o;
    o.threads = 2;
    const auto run = liouville_propagate(model, two_component(6), sampler(16, 5), 5.0, 1e-2, {}, o);
    for (double d : run.max_density_drift) CHECK(d <= 1e-8);
    double sum = 0.0;
    for (const auto& s : run.samples) sum += s.weight;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    const auto rep = positivity_normalization_report(run);
    CHECK(rep.passed);
    CHECK(rep.min_density >= 0.0);
    CHECK(rep.max_normalization_residual < 1e-10);
    CHECK(run.observables.empty());
  }

  TEST_CASE("corrupted runs fail with the sample index") {
    const auto model = bilinear(0.1, 4);
    auto run = liouville_propagate(model, two_component(4), sampler(8, 6), 0.1, 1e-2);
    run.samples[3].weight = -run.samples[3].weight;
    const auto rep = positivity_normalization_report(run);
    CHECK_FALSE(rep.passed);
    REQUIRE(rep.offending_sample.has_value());
    CHECK(*rep.offending_sample == 3);
  }

  TEST_CASE("results do not depend on the thread count") {
    const auto model = bilinear(0.1, 4);
    const std::vector<NamedObservable> obs{{"x_1", HybridObservable::classical(ClassicalObservable::position(0))},
                                           {"H", model.as_observable()}};
    EnsembleOptions one, four;
    one.threads = 1;
    four.threads = 4;
    const auto a = liouville_propagate(model, two_component(4), sampler(12, 7), 1.0, 1e-2, obs, one);
    const auto b = liouville_propagate(model, two_component(4), sampler(12, 7), 1.0, 1e-2, obs, four);
    REQUIRE(a.observables.size() == 2);
    for (std::size_t o = 0; o < 2; ++o) {
      CHECK(a.observables[o].mean == b.observables[o].mean);
      CHECK(a.observables[o].standard_error == b.observables[o].standard_error);
    }
    for (std::size_t s = 0; s < 12; ++s) CHECK(a.samples[s].initial == b.samples[s].initial);
  }

  TEST_CASE("a proposal that misses the density raises SamplerError") {
    const auto model = bilinear(0.1, 2);
    const DensitySpec zero(1, 2, {{constant_weight(0.0), basis_state(2, 0)}});
    CHECK_THROWS_AS(liouville_propagate(model, zero, sampler(4, 1), 0.1, 1e-2), SamplerError);
    const auto matrix = DensitySpec::from_matrix_function(
        1, 2, [](const ClassicalPoint&) { return ComplexMatrix(ComplexMatrix::Identity(2, 2) / 2.0); });
    CHECK(density_value(matrix, at(basis_state(2, 0))) == doctest::Approx(0.5));
    CHECK_THROWS_AS(liouville_propagate(model, matrix, sampler(4, 1), 0.1, 1e-2), UnsupportedError);
  }
}
