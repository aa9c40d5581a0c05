// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/dynamics.hpp"

#include "hybridflow/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

namespace hybridflow {

namespace {

const double kSqrt2 = std::sqrt(2.0);

struct Layout {
  Eigen::Index n, N;
  Eigen::Index size() const { return 2 * n + 2 * N; }
};

// J grad: (dx, dp, dX, dP) -> (dp, -dx, dP, -dX).
void symplectic_rotate(const Layout& L, const RealVector& g, RealVector& f) {
  f.resize(L.size());
  f.segment(0, L.n) = g.segment(L.n, L.n);
  f.segment(L.n, L.n) = -g.segment(0, L.n);
  f.segment(2 * L.n, L.N) = g.segment(2 * L.n + L.N, L.N);
  f.segment(2 * L.n + L.N, L.N) = -g.segment(2 * L.n, L.N);
}

double constraint_of(const Layout& L, const RealVector& y) {
  return 0.5 * y.segment(2 * L.n, 2 * L.N).squaredNorm();
}

void validate_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("integrator: dt must be positive and finite");
}

std::size_t step_count(double T, double dt) {
  validate_step(dt);
  if (!(T > 0.0) || !std::isfinite(T)) throw Error("trajectory: T must be positive and finite");
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw Error("trajectory: T must be an integer multiple of dt");
  }
  return static_cast<std::size_t>(steps);
}

}  // namespace

HybridObservable ModelSpec::as_observable() const {
  return HybridObservable::classical(H_cl) + HybridObservable::quantum(H_qm) + interaction;
}

void ModelSpec::validate() const {
  if (N < 1) throw DimensionError("ModelSpec: quantum dimension must be at least 1");
  if (H_qm.dim() != N) throw DimensionError("ModelSpec: H_qm dimension does not match N");
  if (interaction.has_matrix_part() && interaction.quantum_dim() != N) {
    throw DimensionError("ModelSpec: interaction dimension does not match N");
  }
  if (basis.dim != N) throw DimensionError("ModelSpec: basis dimension does not match N");
}

double total_hamiltonian(const ModelSpec& model, const HybridPoint& h) {
  if (h.classical_dim() != model.n || h.quantum_dim() != model.N) {
    throw DimensionError("total_hamiltonian: point dimensions do not match the model");
  }
  double e = model.H_cl(h.cl());
  const ComplexVector c = decode_state(h.qm());
  e += expectation(model.H_qm.matrix(), c);
  e += model.interaction.value(h);
  return e;
}

FlatGradientFn model_gradient(const ModelSpec& model) {
  model.validate();
  const Layout L{static_cast<Eigen::Index>(model.n), static_cast<Eigen::Index>(model.N)};
  return [model, L](const RealVector& y, RealVector& g) {
    const ClassicalPoint cl(y.segment(0, L.n), y.segment(L.n, L.n));
    ComplexVector c(L.N);
    for (Eigen::Index i = 0; i < L.N; ++i) c[i] = Complex(y[2 * L.n + i], y[2 * L.n + L.N + i]) / kSqrt2;

    ClassicalGradient gc = model.H_cl.gradient(cl);
    ComplexVector v = model.H_qm.matrix() * c;
    const HybridObservable& I = model.interaction;
    if (!I.scalar_part().is_zero()) {
      const ClassicalGradient gi = I.scalar_part().gradient(cl);
      gc.dx += gi.dx;
      gc.dp += gi.dp;
    }
    if (I.has_matrix_part()) {
      v += I.matrix(cl) * c;
      if (!I.has_constant_matrix()) {
        const MatrixGradient dM = I.matrix_gradient(cl);
        for (Eigen::Index k = 0; k < L.n; ++k) {
          gc.dx[k] += c.dot(dM.dx[static_cast<std::size_t>(k)] * c).real();
          gc.dp[k] += c.dot(dM.dp[static_cast<std::size_t>(k)] * c).real();
        }
      }
    }
    g.resize(L.size());
    g.segment(0, L.n) = gc.dx;
    g.segment(L.n, L.n) = gc.dp;
    g.segment(2 * L.n, L.N) = kSqrt2 * v.real();
    g.segment(2 * L.n + L.N, L.N) = kSqrt2 * v.imag();
  };
}

FlatGradientFn observable_gradient(const HybridObservable& generator, std::size_t n, std::size_t N) {
  const Layout L{static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N)};
  return [generator, L, n, N](const RealVector& y, RealVector& g) {
    const HybridGradient hg = generator.gradient(HybridPoint::unflatten(y, n, N));
    g.resize(L.size());
    g.segment(0, L.n) = hg.dx;
    g.segment(L.n, L.n) = hg.dp;
    g.segment(2 * L.n, L.N) = hg.dX;
    g.segment(2 * L.n + L.N, L.N) = hg.dP;
  };
}

RealVector midpoint_step(const FlatGradientFn& grad, std::size_t n, std::size_t N, const RealVector& y0, double dt,
                         const IntegratorOptions& options, StepInfo* info) {
  const Layout L{static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(N)};
  if (y0.size() != L.size()) throw DimensionError("midpoint_step: state has wrong length");
  RealVector g, f;
  auto field = [&](const RealVector& y, RealVector& out) {
    grad(y, g);
    symplectic_rotate(L, g, out);
  };

  const double scale = std::max(1.0, y0.lpNorm<Eigen::Infinity>());
  const double tol = options.residual_tolerance * scale;

  // Explicit Euler predictor, then fixed-point sweeps y1 <- y0 + dt f((y0 + y1)/2).
  field(y0, f);
  RealVector y1 = y0 + dt * f;
  RealVector mid(L.size());
  double residual = std::numeric_limits<double>::infinity();
  double previous = residual;
  int it = 0;
  bool converged = false;
  bool newton = false;
  for (; it < options.max_iterations && it < options.fixed_point_iterations; ++it) {
    mid = 0.5 * (y0 + y1);
    field(mid, f);
    RealVector next = y0 + dt * f;
    residual = (next - y1).lpNorm<Eigen::Infinity>();
    y1 = std::move(next);
    if (!std::isfinite(residual)) break;
    if (residual <= tol) {
      converged = true;
      ++it;
      break;
    }
    // Contraction lost: hand over to Newton.
    if (it >= 2 && residual > 0.5 * previous) {
      ++it;
      break;
    }
    previous = residual;
  }

  if (!converged) {
    newton = true;
    if (!y1.allFinite()) y1 = y0;
    RealVector G, fp, fm;
    Eigen::MatrixXd J(L.size(), L.size());
    for (; it < options.max_iterations; ++it) {
      mid = 0.5 * (y0 + y1);
      field(mid, f);
      G = y1 - y0 - dt * f;
      // Jacobian of the midpoint residual, column by column from central differences of f.
      for (Eigen::Index v = 0; v < L.size(); ++v) {
        RealVector mp = mid, mm = mid;
        const double h = fd_step(mid[v]);
        mp[v] += h;
        mm[v] -= h;
        field(mp, fp);
        field(mm, fm);
        J.col(v) = -0.5 * dt * (fp - fm) / (mp[v] - mm[v]);
        J(v, v) += 1.0;
      }
      const RealVector delta = J.partialPivLu().solve(G);
      y1 -= delta;
      residual = delta.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(residual)) break;
      if (residual <= tol) {
        converged = true;
        ++it;
        break;
      }
    }
  }

  if (info) {
    info->iterations = it;
    info->used_newton = newton;
    info->residual = residual;
  }
  if (!converged) {
    std::ostringstream os;
    os << "midpoint_step: nonlinear solve did not converge (residual " << residual << " after " << it
       << " iterations); retry with a smaller dt";
    throw StepFailure(os.str(), residual);
  }
  return y1;
}

HybridPoint flow_step(const ModelSpec& model, const HybridPoint& h, double dt, const IntegratorOptions& options) {
  validate_step(dt);
  if (h.classical_dim() != model.n || h.quantum_dim() != model.N) {
    throw DimensionError("flow_step: point dimensions do not match the model");
  }
  const double c = constraint_value(h.qm());
  if (std::abs(c - 1.0) > options.constraint_tolerance) {
    throw NormalizationError("flow_step: state is off the constraint sphere", c);
  }
  const RealVector y1 = midpoint_step(model_gradient(model), model.n, model.N, h.flatten(), dt, options);
  return HybridPoint::unflatten(y1, model.n, model.N);
}

Trajectory trajectory(const ModelSpec& model, const HybridPoint& h0, double T, double dt,
                      const IntegratorOptions& options) {
  const std::size_t steps = step_count(T, dt);
  if (h0.classical_dim() != model.n || h0.quantum_dim() != model.N) {
    throw DimensionError("trajectory: initial point dimensions do not match the model");
  }
  {
    const double c = constraint_value(h0.qm());
    if (std::abs(c - 1.0) > options.constraint_tolerance) {
      throw NormalizationError("trajectory: initial state is off the constraint sphere", c);
    }
  }
  const Layout L{static_cast<Eigen::Index>(model.n), static_cast<Eigen::Index>(model.N)};
  const FlatGradientFn grad = model_gradient(model);
  const std::size_t stride = std::max<std::size_t>(1, options.record_stride);

  Trajectory tr;
  tr.metadata.dt = dt;
  tr.metadata.newton_tolerance = options.residual_tolerance;
  tr.metadata.steps = steps;
  const std::size_t samples = steps / stride + 1 + (steps % stride != 0 ? 1 : 0);
  tr.times.reserve(samples);
  tr.states.reserve(samples);
  tr.energy.reserve(samples);
  tr.constraint.reserve(samples);

  const double e0 = total_hamiltonian(model, h0);
  auto record = [&](double t, const HybridPoint& h, double e, double c) {
    tr.times.push_back(t);
    tr.states.push_back(h);
    tr.energy.push_back(e);
    tr.constraint.push_back(c);
  };
  record(0.0, h0, e0, constraint_value(h0.qm()));
  tr.metadata.max_constraint_drift = std::abs(tr.constraint.back() - 1.0);

  RealVector y = h0.flatten();
  for (std::size_t k = 0; k < steps; ++k) {
    RealVector y1;
    StepInfo info;
    try {
      y1 = midpoint_step(grad, model.n, model.N, y, dt, options, &info);
    } catch (const StepFailure& e) {
      std::ostringstream os;
      os << e.what() << " at step " << k;
      throw StepFailure(os.str(), e.residual(), k);
    }
    if (info.used_newton) ++tr.metadata.newton_fallbacks;
    if (options.renormalize) {
      const double c = constraint_of(L, y1);
      y1.segment(2 * L.n, 2 * L.N) /= std::sqrt(c);
      ++tr.metadata.renormalizations;
      if (options.log) {
        std::ostringstream os;
        os.precision(17);
        os << "renormalized constraint at step " << (k + 1) << " from C = " << c;
        options.log(os.str());
      }
    }
    const double t = static_cast<double>(k + 1) * dt;
    if (options.on_step) options.on_step(k, t, y, y1);
    y = std::move(y1);

    const HybridPoint h = HybridPoint::unflatten(y, model.n, model.N);
    const double e = total_hamiltonian(model, h);
    const double c = constraint_of(L, y);
    tr.metadata.max_energy_drift = std::max(tr.metadata.max_energy_drift, std::abs(e - e0));
    tr.metadata.max_constraint_drift = std::max(tr.metadata.max_constraint_drift, std::abs(c - 1.0));
    if ((k + 1) % stride == 0 || k + 1 == steps) record(t, h, e, c);
  }
  return tr;
}

HybridPoint canonical_step(const HybridObservable& generator, const HybridPoint& h, double delta_alpha,
                           const IntegratorOptions& options) {
  if (delta_alpha == 0.0) return h;
  if (!std::isfinite(delta_alpha)) throw Error("canonical_step: parameter must be finite");
  const std::size_t n = h.classical_dim(), N = h.quantum_dim();
  const FlatGradientFn grad = observable_gradient(generator, n, N);

  // Triple-jump composition of the symmetric midpoint map (fourth order).
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2);
  const double w0 = -cbrt2 / (2.0 - cbrt2);
  const double max_inner = 1e-3;
  const double outer_limit = max_inner / std::max(std::abs(w0), std::abs(w1));
  const auto substeps = static_cast<std::size_t>(std::ceil(std::abs(delta_alpha) / outer_limit));
  const double step = delta_alpha / static_cast<double>(substeps);

  // Negative parameters run the flow backwards; midpoint_step takes a signed dt.
  RealVector y = h.flatten();
  for (std::size_t s = 0; s < substeps; ++s) {
    y = midpoint_step(grad, n, N, y, w1 * step, options);
    y = midpoint_step(grad, n, N, y, w0 * step, options);
    y = midpoint_step(grad, n, N, y, w1 * step, options);
  }
  return HybridPoint::unflatten(y, n, N);
}

QuantumPhasePoint unitary_oracle(const HermitianMatrix& H, const QuantumPhasePoint& q0, double t) {
  if (H.dim() != q0.dim()) throw DimensionError("unitary_oracle: dimension mismatch");
  if (t == 0.0) return q0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H.matrix());
  if (es.info() != Eigen::Success) throw IntegrityError("unitary_oracle: eigendecomposition failed");
  const ComplexMatrix& V = es.eigenvectors();
  const RealVector& E = es.eigenvalues();
  ComplexVector a = V.adjoint() * decode_state(q0);
  for (Eigen::Index k = 0; k < a.size(); ++k) a[k] *= std::exp(Complex(0.0, -E[k] * t));
  const ComplexVector c = V * a;
  return QuantumPhasePoint(kSqrt2 * c.real(), kSqrt2 * c.imag());
}

// ---------------------------------------------------------------------------

Perturbation Perturbation::none(double t0) {
  Perturbation p;
  p.t0 = t0;
  p.profile = [](double) { return 0.0; };
  p.derivative_bound = 0.0;
  return p;
}

Perturbation Perturbation::smooth_bump(double t0, std::size_t coordinate, CoordinateKind kind, double amplitude,
                                       double width) {
  if (!(width > 0.0)) throw Error("Perturbation: width must be positive");
  Perturbation p;
  p.t0 = t0;
  p.coordinate = coordinate;
  p.kind = kind;
  p.profile = [amplitude, width](double s) {
    if (s <= 0.0 || s >= width) return 0.0;
    const double r = std::sin(std::numbers::pi * s / width);
    return amplitude * r * r;
  };
  p.derivative_bound = std::abs(amplitude) * std::numbers::pi / width;
  return p;
}

Perturbation Perturbation::smooth_step(double t0, std::size_t coordinate, CoordinateKind kind, double amplitude,
                                       double width) {
  if (!(width > 0.0)) throw Error("Perturbation: width must be positive");
  Perturbation p;
  p.t0 = t0;
  p.coordinate = coordinate;
  p.kind = kind;
  p.profile = [amplitude, width](double s) {
    if (s <= 0.0) return 0.0;
    if (s >= width) return amplitude;
    return amplitude * 0.5 * (1.0 - std::cos(std::numbers::pi * s / width));
  };
  p.derivative_bound = std::abs(amplitude) * std::numbers::pi / (2.0 * width);
  return p;
}

TangibilityReport tangibility_experiment(const ModelSpec& model, const HybridPoint& h0,
                                         const Perturbation& perturbation, double T, double dt,
                                         const IntegratorOptions& options) {
  const std::size_t steps = step_count(T, dt);
  if (!(perturbation.t0 > 0.0 && perturbation.t0 < T)) {
    throw Error("tangibility_experiment: onset t0 must lie strictly inside (0, T)");
  }
  if (!perturbation.profile) throw Error("tangibility_experiment: perturbation has no profile");
  if (perturbation.coordinate >= model.n) {
    throw DimensionError("tangibility_experiment: perturbed coordinate index out of range");
  }
  const Layout L{static_cast<Eigen::Index>(model.n), static_cast<Eigen::Index>(model.N)};
  const Eigen::Index zi = static_cast<Eigen::Index>(perturbation.coordinate) +
                          (perturbation.kind == CoordinateKind::Momentum ? L.n : 0);

  IntegratorOptions plain = options;
  plain.record_stride = 1;
  plain.on_step = nullptr;
  const Trajectory reference = trajectory(model, h0, T, dt, plain);
  const FlatGradientFn grad = model_gradient(model);

  TangibilityReport rep;
  rep.times = reference.times;
  rep.pre_segment_identical = true;
  rep.identical_overall = true;
  rep.z_series.reserve(steps + 1);
  rep.z_unperturbed.reserve(steps + 1);
  rep.discontinuity_bound = perturbation.derivative_bound * dt + 1e-10;

  RealVector y = h0.flatten();
  auto compare = [&](std::size_t k) {
    const bool same = HybridPoint::unflatten(y, model.n, model.N) == reference.states[k];
    if (!same) {
      rep.identical_overall = false;
      if (reference.times[k] <= perturbation.t0) rep.pre_segment_identical = false;
    }
    rep.z_series.push_back(y[zi]);
    rep.z_unperturbed.push_back(reference.states[k].flatten()[zi]);
    rep.max_constraint_deviation = std::max(rep.max_constraint_deviation, std::abs(constraint_of(L, y) - 1.0));
  };
  compare(0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double t_next = static_cast<double>(k + 1) * dt;
    RealVector y1 = midpoint_step(grad, model.n, model.N, y, dt, plain);
    if (options.renormalize) y1.segment(2 * L.n, 2 * L.N) /= std::sqrt(constraint_of(L, y1));
    if (t_next > perturbation.t0) {
      y1[zi] += perturbation.profile(t_next - perturbation.t0) - perturbation.profile(t - perturbation.t0);
    }
    // Increment of z beyond what an unperturbed step from the same state gives.
    RealVector free = midpoint_step(grad, model.n, model.N, y, dt, plain);
    if (options.renormalize) free.segment(2 * L.n, 2 * L.N) /= std::sqrt(constraint_of(L, free));
    rep.max_discontinuity = std::max(rep.max_discontinuity, std::abs(y1[zi] - free[zi]));
    y = std::move(y1);
    compare(k + 1);
  }
  return rep;
}

}  // namespace hybridflow
