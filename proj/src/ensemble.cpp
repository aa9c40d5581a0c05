// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/ensemble.hpp"

#include "hybridflow/errors.hpp"
#include "hybridflow/quadrature.hpp"

#include <Eigen/LU>

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace hybridflow {

namespace {

double checked_weight(const WeightFn& w, const ClassicalPoint& pt, std::size_t j) {
  const double v = w(pt);
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << "density: weight of component " << j << " is " << v << " (must be nonnegative)";
    throw IntegrityError(os.str());
  }
  return v;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

void check_orthonormal(const std::vector<std::pair<double, ComplexVector>>& factor, std::size_t dim, const char* name) {
  for (std::size_t i = 0; i < factor.size(); ++i) {
    if (static_cast<std::size_t>(factor[i].second.size()) != dim) {
      throw DimensionError(std::string("separable_density: factor ") + name + " state has wrong dimension");
    }
    if (!(factor[i].first >= 0.0)) throw IntegrityError("separable_density: factor weights must be nonnegative");
    for (std::size_t j = 0; j <= i; ++j) {
      const Complex ov = factor[j].second.dot(factor[i].second);
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(ov - target) > 1e-9) {
        throw NormalizationError(std::string("separable_density: factor ") + name + " states are not orthonormal",
                                 std::abs(ov));
      }
    }
  }
}

}  // namespace

DensitySpec::DensitySpec(std::size_t n, std::size_t N, std::vector<DensityComponent> components)
    : n_(n), N_(N), components_(std::move(components)) {
  if (N_ < 1) throw DimensionError("DensitySpec: quantum dimension must be at least 1");
  if (components_.empty()) throw Error("DensitySpec: at least one component is required");
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const DensityComponent& c = components_[j];
    if (!c.weight) throw Error("DensitySpec: component has no weight function");
    if (static_cast<std::size_t>(c.state.size()) != N_) {
      throw DimensionError("DensitySpec: projector state has the wrong dimension");
    }
    const double norm = c.state.norm();
    if (std::abs(norm - 1.0) > kAmplitudeNormTolerance) {
      std::ostringstream os;
      os << "DensitySpec: projector state " << j << " has norm " << norm;
      throw NormalizationError(os.str(), norm);
    }
  }
}

DensitySpec DensitySpec::from_matrix_function(std::size_t n, std::size_t N, MatrixDensityFn rho) {
  if (!rho) throw Error("DensitySpec: empty matrix function");
  DensitySpec d;
  d.n_ = n;
  d.N_ = N;
  d.matrix_fn_ = std::move(rho);
  return d;
}

double density_value(const DensitySpec& dens, const HybridPoint& h) {
  if (h.classical_dim() != dens.classical_dim() || h.quantum_dim() != dens.quantum_dim()) {
    throw DimensionError("density_value: point dimensions do not match the density");
  }
  const ComplexVector psi = decode_state(h.qm());
  if (dens.is_matrix_function()) {
    const ComplexMatrix rho = dens.matrix_function()(h.cl());
    const double v = psi.dot(rho * psi).real();
    if (v < -1e-12) throw IntegrityError("density_value: matrix density is not positive at the sampled point");
    return std::max(v, 0.0);
  }
  double v = 0.0;
  for (std::size_t j = 0; j < dens.components().size(); ++j) {
    const DensityComponent& c = dens.components()[j];
    v += checked_weight(c.weight, h.cl(), j) * std::norm(c.state.dot(psi));
  }
  return v;
}

double density_value(const DensitySpec& dens, const ClassicalPoint& weights_at, const QuantumPhasePoint& q,
                     const std::vector<ComplexVector>& states) {
  if (states.size() != dens.components().size()) throw DimensionError("density_value: one state per component");
  const ComplexVector psi = decode_state(q);
  double v = 0.0;
  for (std::size_t j = 0; j < states.size(); ++j) {
    v += checked_weight(dens.components()[j].weight, weights_at, j) * std::norm(states[j].dot(psi));
  }
  return v;
}

DensitySpec separable_density(const SeparableRecipe& recipe) {
  if (recipe.N_A < 1 || recipe.N_B < 1) throw DimensionError("separable_density: factor dimensions must be positive");
  if (recipe.terms.empty()) throw Error("separable_density: at least one term is required");
  std::vector<DensityComponent> comps;
  for (const SeparableTerm& t : recipe.terms) {
    if (!t.weight) throw Error("separable_density: term has no weight function");
    check_orthonormal(t.factor_a, recipe.N_A, "A");
    check_orthonormal(t.factor_b, recipe.N_B, "B");
    for (const auto& [wa, a] : t.factor_a) {
      for (const auto& [wb, b] : t.factor_b) {
        const double w = wa * wb;
        if (w == 0.0) continue;
        WeightFn outer = t.weight;
        comps.push_back({[outer, w](const ClassicalPoint& pt) { return w * outer(pt); }, kron(a, b)});
      }
    }
  }
  if (comps.empty()) throw Error("separable_density: all product weights vanish");
  return DensitySpec(recipe.n, recipe.N_A * recipe.N_B, std::move(comps));
}

void GaussianProposal::validate(std::size_t n) const {
  if (static_cast<std::size_t>(mean.size()) != 2 * n || static_cast<std::size_t>(sigma.size()) != 2 * n) {
    throw DimensionError("proposal: mean and sigma need 2n entries ordered [x, p]");
  }
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (!(sigma[k] > 0.0) || !std::isfinite(sigma[k]) || !std::isfinite(mean[k])) {
      throw SamplerError("proposal: sigma must be positive and finite");
    }
  }
}

double GaussianProposal::pdf(const ClassicalPoint& pt) const {
  const auto n = static_cast<Eigen::Index>(pt.dim());
  double log_p = 0.0;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    const double z = ((k < n ? pt.x()[k] : pt.p()[k - n]) - mean[k]) / sigma[k];
    log_p += -0.5 * z * z - std::log(sigma[k]) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  return std::exp(log_p);
}

double normalization_integral(const DensitySpec& dens, const GaussianProposal& proposal, std::size_t nodes_per_dim) {
  if (dens.is_matrix_function()) throw UnsupportedError("normalization_integral: matrix densities are not supported");
  const std::size_t n = dens.classical_dim();
  proposal.validate(n);
  const std::size_t dims = 2 * n;
  // Each axis gets a rule centred on the proposal mean with width sqrt(2) sigma.
  std::vector<QuadratureRule> rules;
  for (std::size_t d = 0; d < dims; ++d) {
    const auto k = static_cast<Eigen::Index>(d);
    rules.push_back(gauss_hermite_unweighted(nodes_per_dim, proposal.mean[k], std::sqrt(2.0) * proposal.sigma[k]));
  }
  std::vector<std::size_t> idx(dims, 0);
  double total = 0.0;
  RealVector x(static_cast<Eigen::Index>(n)), p(static_cast<Eigen::Index>(n));
  while (true) {
    double w = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const auto r = static_cast<Eigen::Index>(idx[d]);
      const double q = rules[d].nodes[r];
      w *= rules[d].weights[r];
      if (d < n) x[static_cast<Eigen::Index>(d)] = q; else p[static_cast<Eigen::Index>(d - n)] = q;
    }
    const ClassicalPoint pt(x, p);
    for (std::size_t j = 0; j < dens.components().size(); ++j) total += w * checked_weight(dens.components()[j].weight, pt, j);
    std::size_t d = 0;
    while (d < dims && ++idx[d] == nodes_per_dim) idx[d++] = 0;
    if (d == dims) break;
  }
  return total;
}

void validate_normalization(const DensitySpec& dens, const GaussianProposal& proposal, double tolerance,
                            std::size_t nodes_per_dim) {
  const double z = normalization_integral(dens, proposal, nodes_per_dim);
  if (std::abs(z - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "density normalization sum_j integral w_j = " << z << " differs from 1 by more than " << tolerance;
    throw NormalizationError(os.str(), z);
  }
}

EnsembleRun liouville_propagate(const ModelSpec& model, const DensitySpec& dens, const SamplerSettings& sampler,
                                double T, double dt, const std::vector<NamedObservable>& observables,
                                const EnsembleOptions& options) {
  if (dens.is_matrix_function()) throw UnsupportedError("liouville_propagate: matrix densities cannot be sampled");
  if (sampler.count < 1) throw SamplerError("liouville_propagate: sample count must be at least 1");
  if (dens.classical_dim() != model.n || dens.quantum_dim() != model.N) {
    throw DimensionError("liouville_propagate: density dimensions do not match the model");
  }
  model.validate();
  const std::size_t n = model.n, N = model.N;
  const auto ni = static_cast<Eigen::Index>(n);
  sampler.proposal.validate(n);
  const std::size_t K = dens.components().size();

  EnsembleRun run;
  run.n = n;
  run.N = N;
  run.liouville_tolerance = options.liouville_tolerance;

  // Draw sequentially so the sample set depends on the seed alone.
  std::mt19937_64 rng(sampler.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> raw(sampler.count, 0.0);
  run.samples.resize(sampler.count);
  double raw_total = 0.0;
  std::vector<double> w(K);
  for (std::size_t s = 0; s < sampler.count; ++s) {
    RealVector z(2 * ni);
    for (Eigen::Index k = 0; k < z.size(); ++k) {
      z[k] = sampler.proposal.mean[k] + sampler.proposal.sigma[k] * normal(rng);
    }
    const ClassicalPoint cl(z.head(ni), z.tail(ni));
    double W = 0.0;
    for (std::size_t j = 0; j < K; ++j) W += (w[j] = checked_weight(dens.components()[j].weight, cl, j));
    const double u = uniform(rng);
    std::size_t pick = 0;
    if (W > 0.0) {
      double acc = 0.0;
      pick = K - 1;
      for (std::size_t j = 0; j < K; ++j) {
        acc += w[j];
        if (u * W < acc) {
          pick = j;
          break;
        }
      }
    }
    raw[s] = W / sampler.proposal.pdf(cl);
    if (!std::isfinite(raw[s])) throw SamplerError("liouville_propagate: proposal density underflows at a draw");
    raw_total += raw[s];
    run.samples[s].initial = HybridPoint(cl, encode_state(dens.components()[pick].state));
    run.samples[s].component = pick;
    run.samples[s].classical_start = z;
  }
  if (!(raw_total > 0.0)) throw SamplerError("liouville_propagate: no proposal draw carries density weight");
  for (std::size_t s = 0; s < sampler.count; ++s) run.samples[s].weight = raw[s] / raw_total;

  const std::size_t stride = std::max<std::size_t>(1, options.integrator.record_stride);
  run.density_series.assign(sampler.count, {});
  run.max_density_drift.assign(sampler.count, 0.0);
  run.max_constraint_drift.assign(sampler.count, 0.0);
  if (options.keep_trajectories) run.trajectories.resize(sampler.count);
  // values[s][o][t]
  std::vector<std::vector<std::vector<double>>> values(sampler.count);
  std::vector<double> times;
  std::mutex times_mutex;

  const ComplexMatrix Hq = model.H_qm.matrix();
  auto work = [&](std::size_t s) {
    const EnsembleSample& smp = run.samples[s];
    std::vector<ComplexVector> states;
    for (const DensityComponent& c : dens.components()) states.push_back(c.state);
    std::vector<std::vector<ComplexVector>> recorded{states};

    IntegratorOptions io = options.integrator;
    io.log = nullptr;
    const std::size_t steps_total = static_cast<std::size_t>(std::llround(T / dt));
    io.on_step = [&](std::size_t step, double, const RealVector& y0, const RealVector& y1) {
      // Projectors follow the same Cayley map the midpoint rule applies to Psi.
      const RealVector mid = 0.5 * (y0 + y1);
      ComplexMatrix H = Hq;
      if (model.interaction.has_matrix_part()) H += model.interaction.matrix(ClassicalPoint(mid.head(ni), mid.segment(ni, ni)));
      const ComplexMatrix I = ComplexMatrix::Identity(H.rows(), H.cols());
      const Complex half(0.0, 0.5 * dt);
      const Eigen::PartialPivLU<ComplexMatrix> lu(I + half * H);
      const ComplexMatrix rhs = I - half * H;
      for (ComplexVector& c : states) c = lu.solve(rhs * c);
      if ((step + 1) % stride == 0 || step + 1 == steps_total) recorded.push_back(states);
    };
    Trajectory tr = trajectory(model, smp.initial, T, dt, io);
    const ClassicalPoint start(smp.classical_start.head(ni), smp.classical_start.tail(ni));
    std::vector<double>& dseries = run.density_series[s];
    dseries.reserve(tr.states.size());
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
      dseries.push_back(density_value(dens, start, tr.states[t].qm(), recorded[t]));
    }
    double drift = 0.0;
    for (double d : dseries) drift = std::max(drift, std::abs(d - dseries.front()));
    run.max_density_drift[s] = drift;
    run.max_constraint_drift[s] = tr.metadata.max_constraint_drift;
    values[s].assign(observables.size(), std::vector<double>(tr.states.size()));
    for (std::size_t o = 0; o < observables.size(); ++o) {
      for (std::size_t t = 0; t < tr.states.size(); ++t) values[s][o][t] = observables[o].observable.value(tr.states[t]);
    }
    if (s == 0) {
      std::lock_guard<std::mutex> lock(times_mutex);
      times = tr.times;
    }
    if (options.keep_trajectories) run.trajectories[s] = std::move(tr);
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, sampler.count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t s = next.fetch_add(1);
      if (s >= sampler.count) return;
      try {
        work(s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = sampler.count;
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  run.times = times;
  // Index-ordered reduction keeps results independent of scheduling.
  for (std::size_t o = 0; o < observables.size(); ++o) {
    ObservableSeries series;
    series.name = observables[o].name;
    series.mean.assign(times.size(), 0.0);
    series.standard_error.assign(times.size(), 0.0);
    for (std::size_t t = 0; t < times.size(); ++t) {
      double mean = 0.0;
      for (std::size_t s = 0; s < sampler.count; ++s) mean += run.samples[s].weight * values[s][o][t];
      double var = 0.0;
      for (std::size_t s = 0; s < sampler.count; ++s) {
        const double d = run.samples[s].weight * (values[s][o][t] - mean);
        var += d * d;
      }
      series.mean[t] = mean;
      series.standard_error[t] = std::sqrt(var);
    }
    run.observables.push_back(std::move(series));
  }
  return run;
}

EnsembleReport positivity_normalization_report(const EnsembleRun& run) {
  EnsembleReport rep;
  double sum = 0.0;
  rep.min_density = std::numeric_limits<double>::infinity();
  auto fail = [&](std::size_t s, const std::string& why) {
    if (!rep.passed) return;
    rep.passed = false;
    rep.offending_sample = s;
    std::ostringstream os;
    os << "sample " << s << ": " << why;
    rep.message = os.str();
  };
  for (std::size_t s = 0; s < run.samples.size(); ++s) {
    const double w = run.samples[s].weight;
    if (!(w >= 0.0)) fail(s, "negative importance weight");
    sum += w;
    if (s < run.density_series.size()) {
      for (double d : run.density_series[s]) {
        rep.min_density = std::min(rep.min_density, d);
        if (d < -1e-12) fail(s, "negative density value");
      }
    }
    if (s < run.max_density_drift.size()) {
      rep.max_density_drift = std::max(rep.max_density_drift, run.max_density_drift[s]);
      if (run.max_density_drift[s] > run.liouville_tolerance) fail(s, "density not constant along the characteristic");
    }
    if (s < run.max_constraint_drift.size()) {
      rep.max_normalization_residual = std::max(rep.max_normalization_residual, run.max_constraint_drift[s]);
    }
  }
  if (!std::isfinite(rep.min_density)) rep.min_density = 0.0;
  rep.weight_sum_residual = std::abs(sum - 1.0);
  if (rep.passed && rep.weight_sum_residual > 1e-12) {
    rep.passed = false;
    rep.message = "importance weights do not sum to 1";
  }
  if (rep.passed) rep.message = "ok";
  return rep;
}

}  // namespace hybridflow
