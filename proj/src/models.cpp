// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/models.hpp"

#include "hybridflow/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hybridflow {

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string("model parameter ") + field + " must be positive");
}

double ipow(double base, unsigned e) {
  double r = 1.0;
  for (unsigned k = 0; k < e; ++k) r *= base;
  return r;
}

// Normalized Hermite functions psi_j(xi), j < N, in the dimensionless coordinate.
RealVector hermite_psi(std::size_t N, double xi) {
  RealVector psi = RealVector::Zero(static_cast<Eigen::Index>(N));
  if (N == 0) return psi;
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
  if (N > 1) psi[1] = std::sqrt(2.0) * xi * psi[0];
  for (std::size_t k = 1; k + 1 < N; ++k) {
    const double kk = static_cast<double>(k);
    psi[static_cast<Eigen::Index>(k + 1)] = std::sqrt(2.0 / (kk + 1.0)) * xi * psi[static_cast<Eigen::Index>(k)] -
                                            std::sqrt(kk / (kk + 1.0)) * psi[static_cast<Eigen::Index>(k - 1)];
  }
  return psi;
}

// Matrix elements of X and P on the first N levels, computed in a basis large
// enough that products up to the given degree are untruncated.
std::pair<ComplexMatrix, ComplexMatrix> padded_position_momentum(const BasisSet& basis, unsigned degree) {
  const auto P = position_momentum_matrices(BasisSet::oscillator(basis.dim + degree, basis.mass, basis.frequency));
  return {P.first.matrix(), P.second.matrix()};
}

void require_oscillator(const BasisSet& basis, const char* who) {
  if (basis.kind != BasisKind::HarmonicOscillatorPosition) {
    throw UnsupportedError(std::string(who) + ": requires a harmonic-oscillator basis");
  }
}

}  // namespace

double hermite_eval(std::size_t i, double q, double M, double Omega) {
  require_positive(M, "M");
  require_positive(Omega, "Omega");
  const double mw = M * Omega;
  return std::pow(mw, 0.25) * hermite_psi(i + 1, std::sqrt(mw) * q)[static_cast<Eigen::Index>(i)];
}

RealVector hermite_functions(std::size_t N, double q, double M, double Omega) {
  require_positive(M, "M");
  require_positive(Omega, "Omega");
  const double mw = M * Omega;
  return std::pow(mw, 0.25) * hermite_psi(N, std::sqrt(mw) * q);
}

RealVector hermite_function_derivatives(std::size_t N, double q, double M, double Omega) {
  require_positive(M, "M");
  require_positive(Omega, "Omega");
  const double mw = M * Omega;
  // dpsi_j/dxi = sqrt(j/2) psi_{j-1} - sqrt((j+1)/2) psi_{j+1}.
  const RealVector psi = hermite_psi(N + 1, std::sqrt(mw) * q);
  RealVector d(static_cast<Eigen::Index>(N));
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const double jj = static_cast<double>(j);
    d[j] = -std::sqrt(0.5 * (jj + 1.0)) * psi[j + 1];
    if (j > 0) d[j] += std::sqrt(0.5 * jj) * psi[j - 1];
  }
  return std::pow(mw, 0.75) * d;
}

void BilinearParams::validate() const {
  if (m.size() < 1) throw Error("model parameter m must have at least one entry");
  if (omega.size() != m.size()) throw DimensionError("model parameter omega must have the length of m");
  if (lambda.size() != m.size()) throw DimensionError("model parameter lambda must have the length of m");
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    require_positive(m[k], "m");
    require_positive(omega[k], "omega");
    if (!std::isfinite(lambda[k])) throw Error("model parameter lambda must be finite");
  }
  require_positive(M, "M");
  require_positive(Omega, "Omega");
  if (N < 2) throw Error("model parameter N must be at least 2");
}

ClassicalObservable harmonic_classical(const RealVector& m, const RealVector& omega) {
  if (m.size() != omega.size()) throw DimensionError("harmonic_classical: length mismatch");
  const RealVector k = (m.array() * omega.array().square()).matrix();
  const RealVector inv_m = m.cwiseInverse();
  return ClassicalObservable(
      [k, inv_m](const ClassicalPoint& pt) {
        return 0.5 * (pt.p().array().square() * inv_m.array()).sum() + 0.5 * (k.array() * pt.x().array().square()).sum();
      },
      [k, inv_m](const ClassicalPoint& pt) {
        return ClassicalGradient{(k.array() * pt.x().array()).matrix(), (inv_m.array() * pt.p().array()).matrix()};
      });
}

HermitianMatrix oscillator_hamiltonian(std::size_t N, double Omega) {
  RealVector d(static_cast<Eigen::Index>(N));
  for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = Omega * (static_cast<double>(j) + 0.5);
  return HermitianMatrix::diagonal(d);
}

ClassicalObservable polynomial_classical(std::size_t n, const std::vector<double>& v) {
  auto poly = [v](double q) {
    double r = 0.0;
    for (std::size_t k = v.size(); k-- > 0;) r = r * q + v[k];
    return r;
  };
  auto dpoly = [v](double q) {
    double r = 0.0;
    for (std::size_t k = v.size(); k-- > 1;) r = r * q + static_cast<double>(k) * v[k];
    return r;
  };
  return ClassicalObservable(
      [n, poly](const ClassicalPoint& pt) {
        if (pt.dim() != n) throw DimensionError("polynomial_classical: dimension mismatch");
        double e = 0.5 * pt.p().squaredNorm();
        for (Eigen::Index k = 0; k < pt.x().size(); ++k) e += poly(pt.x()[k]);
        return e;
      },
      [dpoly](const ClassicalPoint& pt) {
        RealVector dx(pt.x().size());
        for (Eigen::Index k = 0; k < dx.size(); ++k) dx[k] = dpoly(pt.x()[k]);
        return ClassicalGradient{dx, pt.p()};
      });
}

HermitianMatrix polynomial_quantum(const BasisSet& basis, const std::vector<double>& V) {
  require_oscillator(basis, "polynomial_quantum");
  const unsigned degree = std::max<unsigned>(2, static_cast<unsigned>(V.size()));
  const auto [X, P] = padded_position_momentum(basis, degree);
  ComplexMatrix H = 0.5 * P * P;
  ComplexMatrix Xk = ComplexMatrix::Identity(X.rows(), X.cols());
  for (double c : V) {
    if (!std::isfinite(c)) throw Error("polynomial_quantum: coefficients must be finite");
    H += c * Xk;
    Xk = Xk * X;
  }
  const auto N = static_cast<Eigen::Index>(basis.dim);
  return HermitianMatrix(H.topLeftCorner(N, N), 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()));
}

HermitianMatrix weyl_monomial(const BasisSet& basis, unsigned a, unsigned b) {
  require_oscillator(basis, "weyl_monomial");
  const unsigned d = a + b;
  if (d > 16) throw UnsupportedError("weyl_monomial: total degree above 16");
  const auto [X, P] = padded_position_momentum(basis, d);
  ComplexMatrix sum = ComplexMatrix::Zero(X.rows(), X.cols());
  std::size_t count = 0;
  // Each bit pattern with a ones is one ordering: bit set -> X, clear -> P.
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) != a) continue;
    ComplexMatrix prod = ComplexMatrix::Identity(X.rows(), X.cols());
    for (unsigned s = 0; s < d; ++s) prod = prod * (((mask >> s) & 1u) ? X : P);
    sum += prod;
    ++count;
  }
  sum /= static_cast<double>(count);
  const auto N = static_cast<Eigen::Index>(basis.dim);
  const ComplexMatrix top = sum.topLeftCorner(N, N);
  return HermitianMatrix(top, 1e-12 * std::max(1.0, top.cwiseAbs().maxCoeff()));
}

HybridObservable interaction_from_recipe(std::size_t n, const BasisSet& basis, const std::vector<InteractionTerm>& terms) {
  if (terms.empty()) return HybridObservable::zero();
  struct Compiled {
    double coefficient;
    std::vector<unsigned> xp, pp;
    ComplexMatrix W;
  };
  std::vector<Compiled> compiled;
  for (const InteractionTerm& t : terms) {
    if (!std::isfinite(t.coefficient)) throw Error("interaction term coefficient must be finite");
    Compiled c{t.coefficient, t.x_powers, t.p_powers, weyl_monomial(basis, t.X_power, t.P_power).matrix()};
    if (c.xp.empty()) c.xp.assign(n, 0);
    if (c.pp.empty()) c.pp.assign(n, 0);
    if (c.xp.size() != n || c.pp.size() != n) {
      throw DimensionError("interaction term classical exponents must have one entry per classical coordinate");
    }
    compiled.push_back(std::move(c));
  }
  const auto N = static_cast<Eigen::Index>(basis.dim);
  auto scalar = [](const Compiled& c, const ClassicalPoint& pt) {
    double s = c.coefficient;
    for (std::size_t k = 0; k < c.xp.size(); ++k) {
      s *= ipow(pt.x()[static_cast<Eigen::Index>(k)], c.xp[k]) * ipow(pt.p()[static_cast<Eigen::Index>(k)], c.pp[k]);
    }
    return s;
  };
  // d/dz of coefficient * prod z^e, z one of the 2n classical coordinates.
  auto partial = [](const Compiled& c, const ClassicalPoint& pt, std::size_t k, bool momentum) {
    const unsigned e = momentum ? c.pp[k] : c.xp[k];
    if (e == 0) return 0.0;
    double s = c.coefficient * static_cast<double>(e);
    for (std::size_t j = 0; j < c.xp.size(); ++j) {
      const double xj = pt.x()[static_cast<Eigen::Index>(j)];
      const double pj = pt.p()[static_cast<Eigen::Index>(j)];
      const unsigned ex = c.xp[j] - ((j == k && !momentum) ? 1u : 0u);
      const unsigned ep = c.pp[j] - ((j == k && momentum) ? 1u : 0u);
      s *= ipow(xj, ex) * ipow(pj, ep);
    }
    return s;
  };
  return HybridObservable::field(
      basis.dim,
      [compiled, scalar, N](const ClassicalPoint& pt) {
        ComplexMatrix M = ComplexMatrix::Zero(N, N);
        for (const Compiled& c : compiled) M += scalar(c, pt) * c.W;
        return M;
      },
      [compiled, partial, n, N](const ClassicalPoint& pt) {
        MatrixGradient g;
        g.dx.assign(n, ComplexMatrix::Zero(N, N));
        g.dp.assign(n, ComplexMatrix::Zero(N, N));
        for (const Compiled& c : compiled) {
          for (std::size_t k = 0; k < n; ++k) {
            if (c.xp[k]) g.dx[k] += partial(c, pt, k, false) * c.W;
            if (c.pp[k]) g.dp[k] += partial(c, pt, k, true) * c.W;
          }
        }
        return g;
      });
}

ModelSpec build_generic(std::size_t n, ClassicalObservable H_cl, HermitianMatrix H_qm, HybridObservable interaction,
                        BasisSet basis) {
  ModelSpec spec;
  spec.name = "generic";
  spec.n = n;
  spec.N = H_qm.dim();
  spec.H_cl = std::move(H_cl);
  spec.H_qm = std::move(H_qm);
  spec.interaction = std::move(interaction);
  spec.basis = basis;
  spec.validate();
  if (spec.interaction.has_matrix_part()) {
    // Hermiticity at the origin; matrix() throws IntegrityError otherwise.
    (void)spec.interaction.matrix(ClassicalPoint::zero(n));
  }
  return spec;
}

ModelSpec build_generic(std::size_t n, ClassicalObservable H_cl, HermitianMatrix H_qm,
                        const std::vector<InteractionTerm>& recipe, BasisSet basis) {
  HybridObservable I = interaction_from_recipe(n, basis, recipe);
  return build_generic(n, std::move(H_cl), std::move(H_qm), std::move(I), basis);
}

ModelSpec build_bilinear(const BilinearParams& params) {
  params.validate();
  const std::size_t n = params.n();
  const BasisSet basis = BasisSet::oscillator(params.N, params.M, params.Omega);
  const ComplexMatrix X = position_momentum_matrices(basis).first.matrix();
  const RealVector lambda = params.lambda;
  const auto N = static_cast<Eigen::Index>(params.N);

  ModelSpec spec;
  spec.name = "bilinear";
  spec.n = n;
  spec.N = params.N;
  spec.H_cl = harmonic_classical(params.m, params.omega);
  spec.H_qm = oscillator_hamiltonian(params.N, params.Omega);
  spec.basis = basis;
  if (lambda.cwiseAbs().maxCoeff() > 0.0) {
    spec.interaction = HybridObservable::field(
        params.N, [X, lambda](const ClassicalPoint& pt) -> ComplexMatrix { return lambda.dot(pt.x()) * X; },
        [X, lambda, n, N](const ClassicalPoint&) {
          MatrixGradient g;
          g.dx.reserve(n);
          for (std::size_t k = 0; k < n; ++k) g.dx.push_back(lambda[static_cast<Eigen::Index>(k)] * X);
          g.dp.assign(n, ComplexMatrix::Zero(N, N));
          return g;
        });
  }
  spec.validate();
  return spec;
}

double orthonormality_defect(const QuadratureRule& rule, std::size_t N, double M, double Omega) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
    const RealVector phi = hermite_functions(N, rule.nodes[k], M, Omega);
    G.noalias() += rule.weights[k] * phi * phi.transpose();
  }
  return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

LocalizedModel build_localized_bilinear(const LocalizedParams& params) {
  params.validate();
  if (!(params.quadrature.range_multiplier > 0.0)) throw Error("quadrature range_multiplier must be positive");
  const std::size_t n = params.n();
  const std::size_t N = params.N;
  const double M = params.M, Omega = params.Omega;

  LocalizedModel out;
  out.params = params;
  const std::size_t nodes = params.quadrature.nodes ? params.quadrature.nodes : std::max<std::size_t>(2 * N, 24);
  if (nodes < N) throw Error("quadrature nodes must be at least N");
  out.rule = gauss_hermite_unweighted(nodes, 0.0, 1.0 / std::sqrt(M * Omega));
  out.orthonormality_error = orthonormality_defect(out.rule, N, M, Omega);
  if (out.orthonormality_error > 1e-10) {
    std::ostringstream os;
    os << "build_localized_bilinear: quadrature reproduces orthonormality only to " << out.orthonormality_error;
    throw IntegrityError(os.str());
  }
  out.validated_range = params.quadrature.range_multiplier * out.rule.nodes.cwiseAbs().maxCoeff();

  const RealVector lambda = params.lambda;
  const auto n_idx = static_cast<Eigen::Index>(n);
  const auto N_idx = static_cast<Eigen::Index>(N);
  ModelSpec spec;
  spec.name = "localized";
  spec.n = n;
  spec.N = N;
  spec.H_cl = harmonic_classical(params.m, params.omega);
  spec.H_qm = oscillator_hamiltonian(N, Omega);
  spec.basis = BasisSet::oscillator(N, M, Omega);
  spec.interaction = HybridObservable::field(
      N,
      [lambda, n_idx, N_idx, N, M, Omega](const ClassicalPoint& pt) -> ComplexMatrix {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N_idx, N_idx);
        for (Eigen::Index k = 0; k < n_idx; ++k) {
          const double x = pt.x()[k];
          const RealVector phi = hermite_functions(N, x, M, Omega);
          A.noalias() += (lambda[k] * x * x) * phi * phi.transpose();
        }
        return A.cast<Complex>();
      },
      [lambda, n, n_idx, N_idx, N, M, Omega](const ClassicalPoint& pt) {
        MatrixGradient g;
        g.dx.reserve(n);
        for (Eigen::Index k = 0; k < n_idx; ++k) {
          const double x = pt.x()[k];
          const RealVector phi = hermite_functions(N, x, M, Omega);
          const RealVector dphi = hermite_function_derivatives(N, x, M, Omega);
          const Eigen::MatrixXd outer = phi * phi.transpose();
          const Eigen::MatrixXd sym = dphi * phi.transpose() + phi * dphi.transpose();
          g.dx.push_back((lambda[k] * (2.0 * x * outer + x * x * sym)).cast<Complex>());
        }
        g.dp.assign(n, ComplexMatrix::Zero(N_idx, N_idx));
        return g;
      });
  spec.validate();
  out.model = std::move(spec);
  return out;
}

WarnedValue localized_interaction(const LocalizedModel& model, const HybridPoint& h) {
  WarnedValue out;
  out.value = model.model.interaction.value(h);
  const double xmax = h.cl().x().cwiseAbs().maxCoeff();
  if (xmax > model.validated_range) {
    std::ostringstream os;
    os << "classical position " << xmax << " lies outside the quadrature-validated range " << model.validated_range;
    out.warning = os.str();
  }
  return out;
}

ComplexVector coherent_state(std::size_t N, Complex alpha) {
  if (N < 1) throw DimensionError("coherent_state: N must be at least 1");
  ComplexVector c(static_cast<Eigen::Index>(N));
  c[0] = 1.0;
  for (Eigen::Index j = 1; j < c.size(); ++j) c[j] = c[j - 1] * alpha / std::sqrt(static_cast<double>(j));
  return c / c.norm();
}

Complex coherent_amplitude(double X0, double P0, double M, double Omega) {
  require_positive(M, "M");
  require_positive(Omega, "Omega");
  const double mw = M * Omega;
  return {std::sqrt(mw / 2.0) * X0, P0 / std::sqrt(2.0 * mw)};
}

double truncation_occupation(const QuantumPhasePoint& q) {
  const ComplexVector c = decode_state(q);
  const Eigen::Index N = c.size();
  const Eigen::Index first = std::max<Eigen::Index>(0, N - 2);
  return c.tail(N - first).squaredNorm();
}

std::optional<std::string> truncation_warning(const QuantumPhasePoint& q, double tolerance) {
  const double occ = truncation_occupation(q);
  if (occ <= tolerance) return std::nullopt;
  std::ostringstream os;
  os << "truncation: occupation of the top two levels is " << occ << " (limit " << tolerance << "); increase N";
  return os.str();
}

}  // namespace hybridflow
