// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "hybridflow/brackets.hpp"
#include "hybridflow/cli/commands.hpp"
#include "hybridflow/cli/config.hpp"
#include "hybridflow/ensemble.hpp"
#include "hybridflow/errors.hpp"
#include "hybridflow/models.hpp"
#include "hybridflow/random.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace hybridflow;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = HYBRIDFLOW_CONFIG_DIR;

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Measure {
 public:
  Measure& add(const std::string& name, double value, double limit) {
    ok_ = ok_ && value <= limit;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s=%.3g (<= %.3g)", text_.empty() ? "" : ", ", name.c_str(), value, limit);
    text_ += buf;
    return *this;
  }
  Measure& require(const std::string& name, bool cond) {
    ok_ = ok_ && cond;
    text_ += (text_.empty() ? "" : ", ") + name + (cond ? "=yes" : "=NO");
    return *this;
  }
  Outcome done() const { return {ok_, text_}; }

 private:
  bool ok_ = true;
  std::string text_;
};

RealVector one(double v) {
  RealVector r(1);
  r << v;
  return r;
}

cli::RunConfig load(const std::string& file, cli::Command c) {
  auto r = cli::load_config((kConfigDir / file).string(), c);
  if (!r.diagnostics.empty()) throw Error(file + ": " + cli::format_diagnostic(r.diagnostics.front()));
  const auto d = cli::validate(r.config);
  if (!d.empty()) throw Error(file + ": " + cli::format_diagnostic(d.front()));
  return r.config;
}

BilinearParams bilinear(double lambda, std::size_t N) {
  BilinearParams b;
  b.m = one(1.0);
  b.omega = one(1.0);
  b.lambda = one(lambda);
  b.N = N;
  return b;
}

HybridPoint quantum_point(const QuantumPhasePoint& q) { return HybridPoint(ClassicalPoint::zero(0), q); }

// a x^2 + b x p + c p^2 + d x with its exact gradient.
ClassicalObservable random_classical(Rng& rng) {
  std::normal_distribution<double> g;
  const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
  return ClassicalObservable(
      [=](const ClassicalPoint& pt) {
        const double x = pt.x()(0), p = pt.p()(0);
        return a * x * x + b * x * p + c * p * p + d * x;
      },
      [=](const ClassicalPoint& pt) {
        const double x = pt.x()(0), p = pt.p()(0);
        return ClassicalGradient{one(2 * a * x + b * p + d), one(b * x + 2 * c * p)};
      });
}

Outcome commutator_equivalence() {
  const auto rep = cli::bracket_check(8, 200, 1.0, 42);
  Rng rng(42);
  double oracle_worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const auto F = random_hermitian(8, rng), G = random_hermitian(8, rng);
    const auto q = random_state(8, rng);
    const double lhs = quantum_bracket(QuadraticObservable(F), QuadraticObservable(G), q);
    oracle_worst = std::max(oracle_worst, std::abs(lhs - oracle::commutator_expectation(F.matrix(), G.matrix(), q.amplitudes())));
  }
  return Measure()
      .add("max_residual", rep.max_commutator_residual, 1e-10)
      .add("oracle_residual", oracle_worst, 1e-10)
      .done();
}

Outcome separability() {
  Rng rng(2);
  double cross = 0.0, cl_change = 0.0, qm_change = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto f = random_classical(rng);
    const auto G = random_hermitian(4, rng);
    const auto h = random_hybrid_point(1, 4, rng);
    const auto A = HybridObservable::classical(f), B = HybridObservable::quantum(G);
    cross = std::max({cross, std::abs(hybrid_bracket(A, B, h).value), std::abs(hybrid_bracket(B, A, h).value)});

    if (s % 10 == 0) {
      const auto probe_cl = random_classical(rng);
      const QuadraticObservable probe_qm(random_hermitian(4, rng));
      const auto moved_by_qm = canonical_step(B, h, 0.3);
      cl_change = std::max(cl_change, std::abs(probe_cl(moved_by_qm.cl()) - probe_cl(h.cl())));
      const auto moved_by_cl = canonical_step(A, h, 0.3);
      qm_change = std::max(qm_change, std::abs(expectation(probe_qm, moved_by_cl.qm()) - expectation(probe_qm, h.qm())));
    }
  }
  return Measure()
      .add("max_cross_bracket", cross, 1e-12)
      .add("classical_change_under_quantum_generator", cl_change, 1e-12)
      .add("quantum_change_under_classical_generator", qm_change, 1e-12)
      .done();
}

Outcome schrodinger_recovery() {
  Rng rng(3);
  const auto H = random_hermitian(6, rng);
  const auto q0 = random_state(6, rng);
  const auto model = build_generic(0, ClassicalObservable::zero(), H, HybridObservable::zero(), BasisSet::abstract(6));
  IntegratorOptions o;
  o.record_stride = 1000;
  const auto tr = trajectory(model, quantum_point(q0), 5.0, 1e-4, o);
  double dev = 0.0, oracle_gap = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const auto ref = unitary_oracle(H, q0, tr.times[k]);
    dev = std::max({dev, (tr.states[k].qm().X() - ref.X()).cwiseAbs().maxCoeff(),
                    (tr.states[k].qm().P() - ref.P()).cwiseAbs().maxCoeff()});
    const ComplexVector expm = oracle::propagate(H.matrix(), q0.amplitudes(), tr.times[k]);
    oracle_gap = std::max(oracle_gap, (ref.amplitudes() - expm).cwiseAbs().maxCoeff());
  }
  return Measure().add("max_coordinate_deviation", dev, 1e-7).add("eig_vs_expm", oracle_gap, 1e-12).done();
}

Outcome constraint_conservation() {
  const auto model = build_bilinear(bilinear(0.1, 12));
  const HybridPoint h0(ClassicalPoint(one(1.0), one(0.0)),
                       encode_state(coherent_state(12, coherent_amplitude(0.5, 0.0))));
  IntegratorOptions o;
  o.record_stride = 10000;
  const auto tr = trajectory(model, h0, 1000.0, 1e-2, o);
  return Measure()
      .require("steps_1e5", tr.metadata.steps == 100000)
      .add("max_constraint_drift", tr.metadata.max_constraint_drift, 1e-10)
      .done();
}

Outcome energy_conservation() {
  const auto model = build_bilinear(bilinear(0.1, 12));
  const HybridPoint h0(ClassicalPoint(one(1.0), one(0.0)),
                       encode_state(coherent_state(12, coherent_amplitude(0.5, 0.0))));
  IntegratorOptions o;
  o.record_stride = 1000;
  const auto tb = trajectory(model, h0, 1.0, 1e-4, o);

  const auto cfg = load("localized_simulate.toml", cli::Command::Simulate);
  const auto loc = cli::build_model(cfg.model);
  const auto tl = trajectory(loc, cli::build_initial(cfg, loc), 10.0, 1e-3, o);
  return Measure()
      .require("bilinear_steps_1e4", tb.metadata.steps == 10000)
      .add("bilinear_max_dH", tb.metadata.max_energy_drift, 1e-10)
      .add("localized_max_dH", tl.metadata.max_energy_drift, 1e-6)
      .done();
}

Outcome peres_terno() {
  const auto cfg = load("peres_terno.toml", cli::Command::PeresTerno);
  const double lambda = cfg.model.lambda[0];
  BilinearParams params = bilinear(lambda, cfg.model.N);
  const ModelSpec model = build_bilinear(params);
  const HybridPoint h0 = cli::build_initial(cfg, model);
  const double T = cfg.numerics.T, dt = cfg.numerics.dt;

  // Normal modes u = x +- <X> with frequencies sqrt(1 +- lambda), from the 4x4 system matrix.
  Eigen::Matrix4d A;
  A << 0, 1, 0, 0, -1, 0, -lambda, 0, 0, 0, 0, 1, -lambda, 0, -1, 0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(A);
  std::vector<double> w;
  for (int k = 0; k < 4; ++k) w.push_back(std::abs(es.eigenvalues()(k).imag()));
  std::sort(w.begin(), w.end());
  const double wm = w[0], wp = w[3];
  const double eig_gap = std::max(std::abs(wm - std::sqrt(1 - lambda)), std::abs(wp - std::sqrt(1 + lambda)));

  const double x0 = h0.cl().x()(0);
  const ComplexMatrix Xop = oracle::position(static_cast<int>(cfg.model.N));
  const ComplexMatrix Pop = oracle::momentum(static_cast<int>(cfg.model.N));
  const double X0 = oracle::expect(Xop, h0.qm().amplitudes());
  const double P0 = oracle::expect(Pop, h0.qm().amplitudes());
  const double p0 = h0.cl().p()(0);
  // u_pm(t) = u_pm(0) cos(w t) + u'_pm(0) sin(w t) / w.
  auto closed_form = [&](double t) {
    const double up = (x0 + X0) * std::cos(wp * t) + (p0 + P0) * std::sin(wp * t) / wp;
    const double um = (x0 - X0) * std::cos(wm * t) + (p0 - P0) * std::sin(wm * t) / wm;
    const double vp = -(x0 + X0) * wp * std::sin(wp * t) + (p0 + P0) * std::cos(wp * t);
    const double vm = -(x0 - X0) * wm * std::sin(wm * t) + (p0 - P0) * std::cos(wm * t);
    return std::array<double, 4>{(up + um) / 2, (vp + vm) / 2, (up - um) / 2, (vp - vm) / 2};
  };

  double dev = 0.0, trunc = 0.0;
  IntegratorOptions o;
  o.record_stride = std::numeric_limits<std::size_t>::max();
  o.on_step = [&](std::size_t, double t, const RealVector&, const RealVector& y1) {
    const auto h = HybridPoint::unflatten(y1, 1, cfg.model.N);
    const auto c = h.qm().amplitudes();
    const auto ref = closed_form(t);
    dev = std::max({dev, std::abs(h.cl().x()(0) - ref[0]), std::abs(h.cl().p()(0) - ref[1]),
                    std::abs(oracle::expect(Xop, c) - ref[2]), std::abs(oracle::expect(Pop, c) - ref[3])});
    trunc = std::max(trunc, truncation_occupation(h.qm()));
  };
  trajectory(model, h0, T, dt, o);

  const auto rep = cli::peres_terno_benchmark(params, h0, T, dt, {}, cfg.peres_terno.lag);
  double expected_gap = 0.0;
  std::vector<double> expected = rep.expected_frequencies;
  std::sort(expected.begin(), expected.end());
  if (expected.size() == 2) expected_gap = std::max(std::abs(expected[0] - wm), std::abs(expected[1] - wp));
  return Measure()
      .add("max_deviation_vs_closed_form", dev, 1e-8)
      .add("benchmark_max_deviation", rep.max_deviation, 1e-8)
      .add("max_truncation_occupation", std::max(trunc, rep.max_truncation_occupation), 1e-10)
      .add("max_frequency_error", rep.max_frequency_error, 1e-6)
      .add("eigen_oracle_vs_sqrt(1+-lambda)", eig_gap, 1e-12)
      .require("two_modes", expected.size() == 2)
      .add("benchmark_expected_vs_eigen_oracle", expected_gap, 1e-12)
      .done();
}

Outcome algebra_closure() {
  const auto cfg = load("closure_check.toml", cli::Command::ClosureCheck);
  cli::ClosureCheckConfig cc = cfg.closure_check;
  cc.pairs = 20;
  cc.points = 100;
  const auto rep = cli::closure_check(cc, *cfg.numerics.seed);
  return Measure()
      .add("max_closure_error", rep.max_closure_error, 1e-6)
      .add("max_constraint_bracket", rep.max_constraint_bracket, 1e-10)
      .done();
}

Outcome tangibility() {
  const auto cfg = load("tangibility.toml", cli::Command::Tangibility);
  const auto model = cli::build_model(cfg.model);
  const auto h0 = cli::build_initial(cfg, model);
  const auto& t = cfg.tangibility;
  const auto bump = Perturbation::smooth_bump(t.t0, t.coordinate - 1, CoordinateKind::Position, t.amplitude, t.width);
  const auto rep = tangibility_experiment(model, h0, bump, cfg.numerics.T, cfg.numerics.dt);
  const auto step = Perturbation::smooth_step(2.0, 0, CoordinateKind::Momentum, 0.1, 0.5);
  const auto rep_step = tangibility_experiment(model, h0, step, cfg.numerics.T, cfg.numerics.dt);
  const auto none = tangibility_experiment(model, h0, Perturbation::none(t.t0), cfg.numerics.T, cfg.numerics.dt);
  // A bump that does not return to zero would fail the increment bound; check the detector notices.
  Perturbation jump = bump;
  jump.profile = [](double s) { return s > 0.0 ? 0.05 : 0.0; };
  const auto rep_jump = tangibility_experiment(model, h0, jump, cfg.numerics.T, cfg.numerics.dt);
  return Measure()
      .require("pre_t0_bitwise_identical", rep.pre_segment_identical && rep_step.pre_segment_identical)
      .add("max_increment_minus_bound", rep.max_discontinuity - rep.discontinuity_bound, 0.0)
      .add("step_increment_minus_bound", rep_step.max_discontinuity - rep_step.discontinuity_bound, 0.0)
      .add("max_constraint_deviation", std::max(rep.max_constraint_deviation, rep_step.max_constraint_deviation), 1e-10)
      .require("zero_perturbation_identical", none.identical_overall)
      .require("jump_detected", !rep_jump.passed())
      .done();
}

WeightFn gaussian_weight(double prob, double mx, double mp, double s) {
  return [=](const ClassicalPoint& pt) {
    const double dx = (pt.x()(0) - mx) / s, dp = (pt.p()(0) - mp) / s;
    return prob * std::exp(-0.5 * (dx * dx + dp * dp)) / (2 * std::numbers::pi * s * s);
  };
}

Outcome liouville() {
  Measure m;
  // Density constancy, bilinear lambda = 0.1 over t = 5.
  {
    const std::size_t N = 8;
    ComplexVector e1 = ComplexVector::Zero(N), mix = ComplexVector::Zero(N);
    e1(1) = 1.0;
    mix(0) = 1.0 / std::sqrt(2.0);
    mix(2) = Complex(0.0, 1.0 / std::sqrt(2.0));
    const DensitySpec dens(1, N, {{gaussian_weight(0.5, 1.0, 0.0, 0.3), e1}, {gaussian_weight(0.5, 0.0, 0.5, 0.3), mix}});
    SamplerSettings s{200, 99, GaussianProposal{RealVector::Constant(2, 0.5), RealVector::Constant(2, 0.8)}};
    s.proposal.mean(1) = 0.25;
    EnsembleOptions o;
    o.keep_trajectories = false;
    const auto run = liouville_propagate(build_bilinear(bilinear(0.1, N)), dens, s, 5.0, 1e-2, {}, o);
    const auto rep = positivity_normalization_report(run);
    m.add("max_density_drift", rep.max_density_drift, 1e-8).require("report_pass_custom", rep.passed);
  }
  // Reports on every bundled ensemble config, via the command.
  {
    std::size_t configs = 0;
    bool all_pass = true;
    double drift = 0.0;
    const fs::path out = fs::temp_directory_path() / "hybridflow_acceptance";
    for (const auto& e : fs::directory_iterator(kConfigDir)) {
      auto r = cli::load_config(e.path().string(), cli::Command::Ensemble);
      if (!r.diagnostics.empty() || r.config.declared_command != cli::Command::Ensemble) continue;
      ++configs;
      std::ostringstream so, se;
      cli::RunOptions opts;
      opts.out_dir = out.string();
      opts.out = &so;
      opts.err = &se;
      all_pass = all_pass && cli::run(r.config, opts) == cli::kSuccess;
      std::ifstream in(out / (r.config.output.prefix + "_ensemble.json"));
      const auto j = nlohmann::json::parse(in);
      all_pass = all_pass && j.at("monitors").at("passed").get<bool>();
      drift = std::max(drift, j.at("monitors").at("max_density_drift").get<double>());
    }
    m.require("bundled_ensemble_reports_pass", configs > 0 && all_pass).add("bundled_max_density_drift", drift, 1e-8);
  }
  // Factorization with no interaction, 1e4 samples.
  {
    const std::size_t N = 4;
    const double px = 0.6;
    ComplexVector a = ComplexVector::Zero(N), b = ComplexVector::Zero(N);
    a(0) = 1.0;
    b(0) = 1.0 / std::sqrt(2.0);
    b(1) = 1.0 / std::sqrt(2.0);
    // Product density: the same classical packet for both components.
    const double mx = 0.7, mp = -0.2, sw = 0.4;
    const DensitySpec dens(1, N, {{gaussian_weight(px, mx, mp, sw), a}, {gaussian_weight(1 - px, mx, mp, sw), b}});
    const auto model = build_bilinear(bilinear(0.0, N));
    const auto [Xm, Pm] = position_momentum_matrices(model.basis);
    const std::vector<NamedObservable> obs{{"x", HybridObservable::classical(ClassicalObservable::position(0))},
                                           {"X", HybridObservable::quantum(Xm)}};
    SamplerSettings s{10000, 2026, GaussianProposal{RealVector(2), RealVector::Constant(2, 0.6)}};
    s.proposal.mean << 0.5, 0.0;
    EnsembleOptions o;
    o.integrator.record_stride = 50;
    const double T = 2.0;
    const auto run = liouville_propagate(model, dens, s, T, 1e-2, obs, o);

    // Independent single-sector predictions.
    const double t = run.times.back();
    const double x_exact = mx * std::cos(t) + mp * std::sin(t);
    const auto qa = unitary_oracle(model.H_qm, encode_state(a), t), qb = unitary_oracle(model.H_qm, encode_state(b), t);
    const double X_exact = px * expectation(QuadraticObservable(Xm), qa) + (1 - px) * expectation(QuadraticObservable(Xm), qb);

    const auto& xs = run.observables[0];
    const auto& Xs = run.observables[1];
    const double zx = std::abs(xs.mean.back() - x_exact) / xs.standard_error.back();
    const double zX = std::abs(Xs.mean.back() - X_exact) / Xs.standard_error.back();

    // Weighted covariance of the final x and <X> across samples.
    double cov = 0.0;
    std::vector<double> d(run.samples.size());
    for (std::size_t k = 0; k < run.samples.size(); ++k) {
      const auto& h = run.trajectories[k].states.back();
      d[k] = (h.cl().x()(0) - xs.mean.back()) * (expectation(QuadraticObservable(Xm), h.qm()) - Xs.mean.back());
      cov += run.samples[k].weight * d[k];
    }
    double var = 0.0;
    for (std::size_t k = 0; k < run.samples.size(); ++k) {
      const double e = run.samples[k].weight * (d[k] - cov);
      var += e * e;
    }
    const double zc = std::abs(cov) / std::sqrt(var);
    const auto rep = positivity_normalization_report(run);
    m.add("classical_marginal_z", zx, 3.0)
        .add("quantum_marginal_z", zX, 3.0)
        .add("covariance_z", zc, 3.0)
        .require("factorized_run_report_pass", rep.passed);
  }
  return m.done();
}

Outcome localized() {
  LocalizedParams p;
  static_cast<BilinearParams&>(p) = bilinear(0.7, 16);
  const auto lm = build_localized_bilinear(p);
  Rng rng(10);
  std::uniform_real_distribution<double> u(-0.9 * lm.validated_range, 0.9 * lm.validated_range);
  double value_err = 0.0, grad_err = 0.0;
  for (int s = 0; s < 50; ++s) {
    const double x = u(rng);
    const auto q = random_state(16, rng);
    const HybridPoint h(ClassicalPoint(one(x), one(0.1)), q);
    const auto c = q.amplitudes();
    Complex psi = 0.0;
    for (unsigned i = 0; i < 16; ++i) psi += c(i) * oracle::hermite_function(i, x);
    const double ref = 0.7 * x * x * std::norm(psi);
    value_err = std::max(value_err, std::abs(localized_interaction(lm, h).value - ref));
    const double e = 2e-6 * std::max(1.0, std::abs(x));
    auto at = [&](double xx) { return lm.model.interaction.value(HybridPoint(ClassicalPoint(one(xx), one(0.1)), q)); };
    const double fd = (at(x + e) - at(x - e)) / (2 * e);
    grad_err = std::max(grad_err, std::abs(lm.model.interaction.gradient(h).dx(0) - fd));
  }
  return Measure()
      .add("max_value_error", value_err, 1e-8)
      .add("max_gradient_error", grad_err, 1e-7)
      .add("orthonormality_error", lm.orthonormality_error, 1e-10)
      .done();
}

Outcome axioms() {
  Rng rng(11);
  double anti = 0.0, lin = 0.0, jacobi = 0.0, leibniz = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto A = random_almost_classical(1, 3, rng);
    const auto B = random_almost_classical(1, 3, rng);
    const auto D = random_almost_classical(1, 3, rng);
    const auto h = random_hybrid_point(1, 3, rng);
    const double ab = hybrid_bracket(A, B, h).value;
    const double scale = std::max(1.0, std::abs(ab));
    anti = std::max(anti, std::abs(ab + hybrid_bracket(B, A, h).value) / scale);
    const double a = 0.8, b = -1.7;
    const double rhs = a * ab + b * hybrid_bracket(D, B, h).value;
    lin = std::max(lin, std::abs(hybrid_bracket(A.scaled(a) + D.scaled(b), B, h).value - rhs) / std::max(1.0, std::abs(rhs)));
    const double rhs2 = a * ab + b * hybrid_bracket(A, D, h).value;
    lin = std::max(lin, std::abs(hybrid_bracket(A, B.scaled(a) + D.scaled(b), h).value - rhs2) / std::max(1.0, std::abs(rhs2)));

    const QuadraticObservable F(random_hermitian(6, rng)), G(random_hermitian(6, rng)), K(random_hermitian(6, rng));
    const auto q = random_state(6, rng);
    jacobi = std::max(jacobi, std::abs(quantum_bracket(F, commutator_observable(G, K), q) +
                                       quantum_bracket(G, commutator_observable(K, F), q) +
                                       quantum_bracket(K, commutator_observable(F, G), q)));

    if (s < 20) {
      auto fa = [&](const HybridPoint& y) { return A.value(y); };
      auto fb = [&](const HybridPoint& y) { return B.value(y); };
      auto fd = [&](const HybridPoint& y) { return D.value(y); };
      auto fbd = [&](const HybridPoint& y) { return B.value(y) * D.value(y); };
      const double lhs = numeric_bracket(fa, fbd, h).value;
      const double r = numeric_bracket(fa, fb, h).value * D.value(h) + B.value(h) * numeric_bracket(fa, fd, h).value;
      leibniz = std::max(leibniz, std::abs(lhs - r) / std::max(1.0, std::abs(r)));
    }
  }
  return Measure()
      .add("antisymmetry", anti, 1e-12)
      .add("bilinearity", lin, 1e-12)
      .add("jacobi", jacobi, 1e-9)
      .add("leibniz_fd", leibniz, 1e-6)
      .done();
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double time_limit;  // seconds, 0 for none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "commutator-bracket equivalence", commutator_equivalence, 5.0},
      {2, "sector separability", separability, 0.0},
      {3, "Schrodinger recovery", schrodinger_recovery, 30.0},
      {4, "constraint conservation", constraint_conservation, 60.0},
      {5, "energy conservation", energy_conservation, 0.0},
      {6, "Peres-Terno benchmark", peres_terno, 0.0},
      {7, "algebra closure", algebra_closure, 0.0},
      {8, "tangibility", tangibility, 0.0},
      {9, "Liouville ensemble", liouville, 300.0},
      {10, "localized interaction", localized, 0.0},
      {11, "bracket axioms", axioms, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = out.passed;
    char timing[96];
    if (c.time_limit > 0.0) {
      ok = ok && secs < c.time_limit;
      std::snprintf(timing, sizeof timing, "runtime=%.2fs (< %.0fs)", secs, c.time_limit);
    } else {
      std::snprintf(timing, sizeof timing, "runtime=%.2fs", secs);
    }
    std::printf("%s [%d] %s: %s; %s\n", ok ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), timing);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
