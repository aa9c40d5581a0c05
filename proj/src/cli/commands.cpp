// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/cli/commands.hpp"

#include "hybridflow/brackets.hpp"
#include "hybridflow/ensemble.hpp"
#include "hybridflow/errors.hpp"
#include "hybridflow/random.hpp"
#include "hybridflow/serialization.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace hybridflow::cli {

namespace {

using nlohmann::json;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

std::filesystem::path output_path(const RunConfig& c, const std::string& suffix) {
  std::filesystem::path dir(c.output.directory);
  std::filesystem::create_directories(dir);
  return dir / (c.output.prefix + suffix);
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

IntegratorOptions integrator_options(const RunConfig& c, Streams& s) {
  IntegratorOptions o;
  o.residual_tolerance = c.numerics.residual_tolerance;
  o.max_iterations = c.numerics.max_iterations;
  o.renormalize = c.numerics.renormalize;
  o.record_stride = c.numerics.record_stride;
  if (c.numerics.renormalize) {
    o.log = [&s](const std::string& msg) { s.err << "note: " << msg << '\n'; };
  }
  return o;
}

BilinearParams bilinear_params(const ModelConfig& m) {
  BilinearParams p;
  p.m = m.m;
  p.omega = m.omega;
  p.lambda = m.lambda;
  p.M = m.M;
  p.Omega = m.Omega;
  p.N = m.N;
  return p;
}

json vector_json(const std::vector<double>& v) { return json(v); }

int cmd_simulate(const RunConfig& c, Streams& s) {
  const ModelSpec model = build_model(c.model);
  const HybridPoint h0 = build_initial(c, model);
  json warnings = json::array();
  if (model.basis.kind == BasisKind::HarmonicOscillatorPosition) {
    if (auto w = truncation_warning(h0.qm())) warnings.push_back(*w);
  }
  const Trajectory tr = trajectory(model, h0, c.numerics.T, c.numerics.dt, integrator_options(c, s));
  double max_truncation = 0.0;
  if (model.basis.kind == BasisKind::HarmonicOscillatorPosition) {
    for (const HybridPoint& h : tr.states) max_truncation = std::max(max_truncation, truncation_occupation(h.qm()));
    if (max_truncation > 1e-10) {
      warnings.push_back("truncation: top-level occupation reached " + format_number(max_truncation) +
                         " along the trajectory; increase N");
    }
  }
  for (const auto& w : warnings) s.err << "warning: " << w.get<std::string>() << '\n';

  if (c.output.write_trajectory) write_file_atomic(output_path(c, "_trajectory.csv"), trajectory_csv(tr));
  json summary = {{"command", "simulate"},
                  {"model", model.name},
                  {"n", model.n},
                  {"N", model.N},
                  {"T", c.numerics.T},
                  {"metadata", to_json(tr.metadata)},
                  {"initial_state", to_json(h0)},
                  {"final_state", to_json(tr.states.back())},
                  {"max_truncation_occupation", max_truncation},
                  {"warnings", warnings}};
  bool ok = true;
  if (c.numerics.energy_tolerance) {
    summary["energy_tolerance"] = *c.numerics.energy_tolerance;
    ok = ok && tr.metadata.max_energy_drift <= *c.numerics.energy_tolerance;
  }
  if (c.numerics.constraint_tolerance) {
    summary["constraint_tolerance"] = *c.numerics.constraint_tolerance;
    ok = ok && tr.metadata.max_constraint_drift <= *c.numerics.constraint_tolerance;
  }
  summary["passed"] = ok;
  write_json(output_path(c, "_summary.json"), summary);
  s.out << "simulate: " << tr.metadata.steps << " steps, max |dH| = " << format_number(tr.metadata.max_energy_drift)
        << ", max |C-1| = " << format_number(tr.metadata.max_constraint_drift) << '\n';
  return ok ? kSuccess : kPropertyFailure;
}

int cmd_peres_terno(const RunConfig& c, Streams& s) {
  const BilinearParams params = bilinear_params(c.model);
  const ModelSpec model = build_bilinear(params);
  const HybridPoint h0 = build_initial(c, model);
  IntegratorOptions o = integrator_options(c, s);
  const PeresTernoConfig& cfg = c.peres_terno;
  const PeresTernoReport rep = peres_terno_benchmark(params, h0, c.numerics.T, c.numerics.dt, o, cfg.lag);
  const bool truncation_ok = rep.max_truncation_occupation <= cfg.truncation_tolerance;
  const bool passed = rep.max_deviation <= cfg.tolerance && rep.max_frequency_error <= cfg.frequency_tolerance;
  if (!truncation_ok) {
    s.err << "warning: truncation occupation " << format_number(rep.max_truncation_occupation) << " exceeds "
          << format_number(cfg.truncation_tolerance) << "; increase N\n";
  }
  json j = {{"command", "benchmark-peres-terno"},
            {"steps", rep.steps},
            {"dt", c.numerics.dt},
            {"T", c.numerics.T},
            {"max_deviation", rep.max_deviation},
            {"max_deviation_per_coordinate", vector_json(rep.max_deviation_per_coordinate)},
            {"tolerance", cfg.tolerance},
            {"expected_frequencies", vector_json(rep.expected_frequencies)},
            {"measured_frequencies", vector_json(rep.measured_frequencies)},
            {"max_frequency_error", rep.max_frequency_error},
            {"frequency_tolerance", cfg.frequency_tolerance},
            {"max_truncation_occupation", rep.max_truncation_occupation},
            {"truncation_ok", truncation_ok},
            {"passed", passed}};
  write_json(output_path(c, "_peres_terno.json"), j);
  s.out << "benchmark-peres-terno: max_deviation = " << format_number(rep.max_deviation)
        << ", max_frequency_error = " << format_number(rep.max_frequency_error) << (passed ? " (pass)" : " (FAIL)")
        << '\n';
  return passed ? kSuccess : kPropertyFailure;
}

int cmd_tangibility(const RunConfig& c, Streams& s) {
  const ModelSpec model = build_model(c.model);
  const HybridPoint h0 = build_initial(c, model);
  const TangibilityConfig& t = c.tangibility;
  const CoordinateKind kind = t.kind == "momentum" ? CoordinateKind::Momentum : CoordinateKind::Position;
  const Perturbation pert = t.shape == "step"
                                ? Perturbation::smooth_step(t.t0, t.coordinate - 1, kind, t.amplitude, t.width)
                                : Perturbation::smooth_bump(t.t0, t.coordinate - 1, kind, t.amplitude, t.width);
  const TangibilityReport rep =
      tangibility_experiment(model, h0, pert, c.numerics.T, c.numerics.dt, integrator_options(c, s));
  const bool constraint_ok = rep.max_constraint_deviation <= 1e-10;
  const bool passed = rep.passed() && constraint_ok;
  if (c.output.write_trajectory) {
    std::string csv = "t,z,z_unperturbed\n";
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
      csv += format_number(rep.times[k]) + ',' + format_number(rep.z_series[k]) + ',' +
             format_number(rep.z_unperturbed[k]) + '\n';
    }
    write_file_atomic(output_path(c, "_tangibility.csv"), csv);
  }
  json j = {{"command", "tangibility"},
            {"pre_segment_identical", rep.pre_segment_identical},
            {"identical_overall", rep.identical_overall},
            {"max_discontinuity", rep.max_discontinuity},
            {"discontinuity_bound", rep.discontinuity_bound},
            {"max_constraint_deviation", rep.max_constraint_deviation},
            {"passed", passed}};
  write_json(output_path(c, "_tangibility.json"), j);
  s.out << "tangibility: pre-onset identical = " << (rep.pre_segment_identical ? "yes" : "no")
        << ", max increment = " << format_number(rep.max_discontinuity) << " (bound "
        << format_number(rep.discontinuity_bound) << ")" << (passed ? " (pass)" : " (FAIL)") << '\n';
  return passed ? kSuccess : kPropertyFailure;
}

int cmd_bracket_check(const RunConfig& c, Streams& s) {
  const BracketCheckConfig& b = c.bracket_check;
  const BracketCheckReport rep = bracket_check(b.N, b.pairs, b.scale, *c.numerics.seed);
  const bool passed = rep.max_commutator_residual <= b.tolerance;
  json j = {{"command", "bracket-check"},
            {"N", b.N},
            {"pairs", b.pairs},
            {"seed", *c.numerics.seed},
            {"max_commutator_residual", rep.max_commutator_residual},
            {"tolerance", b.tolerance},
            {"passed", passed}};
  write_json(output_path(c, "_bracket_check.json"), j);
  s.out << "bracket-check: max_commutator_residual = " << format_number(rep.max_commutator_residual)
        << (passed ? " (pass)" : " (FAIL)") << '\n';
  return passed ? kSuccess : kPropertyFailure;
}

int cmd_closure_check(const RunConfig& c, Streams& s) {
  const ClosureCheckConfig& k = c.closure_check;
  const ClosureCheckReport rep = closure_check(k, *c.numerics.seed);
  const bool passed = rep.max_closure_error <= k.tolerance && rep.max_constraint_bracket <= k.constraint_tolerance;
  json j = {{"command", "closure-check"},
            {"n", k.n},
            {"N", k.N},
            {"pairs", k.pairs},
            {"points", k.points},
            {"seed", *c.numerics.seed},
            {"max_closure_error", rep.max_closure_error},
            {"tolerance", k.tolerance},
            {"max_constraint_bracket", rep.max_constraint_bracket},
            {"constraint_tolerance", k.constraint_tolerance},
            {"passed", passed}};
  write_json(output_path(c, "_closure_check.json"), j);
  s.out << "closure-check: max_closure_error = " << format_number(rep.max_closure_error)
        << ", max |{C, A}| = " << format_number(rep.max_constraint_bracket) << (passed ? " (pass)" : " (FAIL)")
        << '\n';
  return passed ? kSuccess : kPropertyFailure;
}

HybridObservable named_observable(const std::string& name, const ModelSpec& model) {
  const std::size_t n = model.n, N = model.N;
  if (name == "H") return model.as_observable();
  if (name == "C") {
    return HybridObservable::quantum(HermitianMatrix::identity(N));
  }
  if (name == "X_hat") return HybridObservable::quantum(position_momentum_matrices(model.basis).first);
  if (name == "P_hat") return HybridObservable::quantum(position_momentum_matrices(model.basis).second);
  const std::size_t underscore = name.find('_');
  const std::string head = name.substr(0, underscore);
  const std::size_t k = std::stoul(name.substr(underscore + 1)) - 1;
  if (head == "x") return HybridObservable::classical(ClassicalObservable::position(k));
  if (head == "p") return HybridObservable::classical(ClassicalObservable::momentum(k));
  RealVector e = RealVector::Zero(static_cast<Eigen::Index>(N));
  e[static_cast<Eigen::Index>(k)] = 1.0;
  (void)n;
  return HybridObservable::quantum(HermitianMatrix::diagonal(e));
}

int cmd_ensemble(const RunConfig& c, Streams& s) {
  const ModelSpec model = build_model(c.model);
  const EnsembleConfig& e = c.ensemble;
  const std::size_t n = model.n;
  std::vector<DensityComponent> comps;
  for (const ComponentConfig& cc : e.components) {
    GaussianProposal shape{cc.mean, cc.sigma};
    const double prob = cc.probability;
    comps.push_back({[shape, prob](const ClassicalPoint& pt) { return prob * shape.pdf(pt); }, cc.state});
  }
  const DensitySpec dens(n, model.N, std::move(comps));
  const GaussianProposal proposal{e.proposal_mean, e.proposal_sigma};
  proposal.validate(n);
  const double norm = normalization_integral(dens, proposal, e.quadrature_nodes);
  if (std::abs(norm - 1.0) > e.normalization_tolerance) {
    throw NormalizationError("ensemble: density normalization is " + format_number(norm) +
                                 "; widen the proposal or fix the component probabilities",
                             norm);
  }
  std::vector<NamedObservable> obs;
  for (const std::string& name : e.observables) obs.push_back({name, named_observable(name, model)});

  SamplerSettings sampler{e.samples, *c.numerics.seed, proposal};
  EnsembleOptions eo;
  eo.integrator = integrator_options(c, s);
  eo.integrator.log = nullptr;
  eo.threads = e.threads;
  eo.keep_trajectories = e.write_samples;
  eo.liouville_tolerance = e.liouville_tolerance;
  const EnsembleRun run = liouville_propagate(model, dens, sampler, c.numerics.T, c.numerics.dt, obs, eo);
  const EnsembleReport rep = positivity_normalization_report(run);

  json series = json::array();
  for (const ObservableSeries& o : run.observables) {
    series.push_back({{"name", o.name}, {"mean", o.mean}, {"standard_error", o.standard_error}});
  }
  json report = {{"passed", rep.passed},
                 {"min_density", rep.min_density},
                 {"weight_sum_residual", rep.weight_sum_residual},
                 {"max_normalization_residual", rep.max_normalization_residual},
                 {"max_density_drift", rep.max_density_drift},
                 {"liouville_tolerance", run.liouville_tolerance},
                 {"message", rep.message}};
  if (rep.offending_sample) report["offending_sample"] = *rep.offending_sample;
  json j = {{"command", "ensemble"},
            {"samples", e.samples},
            {"seed", *c.numerics.seed},
            {"density_normalization", norm},
            {"times", run.times},
            {"observables", series},
            {"monitors", report}};
  write_json(output_path(c, "_ensemble.json"), j);
  if (e.write_samples) {
    for (std::size_t k = 0; k < run.trajectories.size(); ++k) {
      write_file_atomic(output_path(c, "_sample_" + std::to_string(k) + ".csv"), trajectory_csv(run.trajectories[k]));
    }
  }
  s.out << "ensemble: " << e.samples << " characteristics, max density drift = " << format_number(rep.max_density_drift)
        << ", min density = " << format_number(rep.min_density) << (rep.passed ? " (pass)" : " (FAIL: " + rep.message + ")")
        << '\n';
  return rep.passed ? kSuccess : kPropertyFailure;
}

}  // namespace

double lag_frequency(const std::vector<double>& u, double dt, std::size_t K) {
  if (K < 1 || u.size() < 2 * K + 1) throw Error("lag_frequency: series too short for the lag");
  double num = 0.0, den = 0.0;
  for (std::size_t i = K; i + K < u.size(); ++i) {
    num += (u[i + K] + u[i - K]) * u[i];
    den += 2.0 * u[i] * u[i];
  }
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double cosine = std::clamp(num / den, -1.0, 1.0);
  return std::acos(cosine) / (static_cast<double>(K) * dt);
}

PeresTernoReport peres_terno_benchmark(const BilinearParams& params, const HybridPoint& h0, double T, double dt,
                                       const IntegratorOptions& options, double lag) {
  const ModelSpec model = build_bilinear(params);
  const auto n = static_cast<Eigen::Index>(params.n());
  const Eigen::Index q = n + 1;  // positions x_1..x_n, <X>
  RealVector mass(q);
  mass.head(n) = params.m;
  mass[n] = params.M;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(q, q);
  for (Eigen::Index k = 0; k < n; ++k) {
    K(k, k) = params.m[k] * params.omega[k] * params.omega[k];
    K(k, n) = K(n, k) = params.lambda[k];
  }
  K(n, n) = params.M * params.Omega * params.Omega;

  // The Ehrenfest variables obey z' = A z exactly (up to truncation).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * q, 2 * q);
  A.topRightCorner(q, q) = mass.cwiseInverse().asDiagonal();
  A.bottomLeftCorner(q, q) = -K;
  const Eigen::MatrixXd step = (A * dt).exp();

  const RealVector sqrt_mass = mass.cwiseSqrt();
  const Eigen::MatrixXd Kt = sqrt_mass.cwiseInverse().asDiagonal() * K * sqrt_mass.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kt);
  if (es.eigenvalues().minCoeff() <= 0.0) throw Error("peres_terno_benchmark: coupled system is not stable");

  const auto XP = position_momentum_matrices(model.basis);
  const ComplexMatrix Xm = XP.first.matrix(), Pm = XP.second.matrix();
  const auto Nn = static_cast<Eigen::Index>(params.N);
  auto ehrenfest = [&](const RealVector& y) {
    ComplexVector c(Nn);
    for (Eigen::Index i = 0; i < Nn; ++i) c[i] = Complex(y[2 * n + i], y[2 * n + Nn + i]) / std::sqrt(2.0);
    RealVector z(2 * q);
    z.head(n) = y.head(n);
    z[n] = c.dot(Xm * c).real();
    z.segment(q, n) = y.segment(n, n);
    z[2 * q - 1] = c.dot(Pm * c).real();
    return std::make_pair(z, c);
  };

  PeresTernoReport rep;
  auto [z, c0] = ehrenfest(h0.flatten());
  RealVector zref = z;
  RealVector maxdev = RealVector::Zero(2 * q);
  std::vector<std::vector<double>> modes(static_cast<std::size_t>(q));
  auto record_modes = [&](const RealVector& zz) {
    const RealVector u = es.eigenvectors().transpose() * (sqrt_mass.asDiagonal() * zz.head(q));
    for (Eigen::Index r = 0; r < q; ++r) modes[static_cast<std::size_t>(r)].push_back(u[r]);
  };
  record_modes(z);
  rep.max_truncation_occupation = c0.tail(2).squaredNorm();

  IntegratorOptions o = options;
  o.record_stride = std::numeric_limits<std::size_t>::max();
  o.on_step = [&](std::size_t, double, const RealVector&, const RealVector& y1) {
    zref = step * zref;
    const auto [zz, c] = ehrenfest(y1);
    maxdev = maxdev.cwiseMax((zz - zref).cwiseAbs());
    rep.max_truncation_occupation = std::max(rep.max_truncation_occupation, c.tail(2).squaredNorm());
    record_modes(zz);
  };
  const Trajectory tr = trajectory(model, h0, T, dt, o);
  rep.steps = tr.metadata.steps;
  rep.max_deviation_per_coordinate.assign(maxdev.data(), maxdev.data() + maxdev.size());
  rep.max_deviation = maxdev.maxCoeff();

  const double omega_max = std::sqrt(es.eigenvalues().maxCoeff());
  const double tau = omega_max * lag < 2.5 ? lag : 1.5 / omega_max;
  const auto lag_steps = static_cast<std::size_t>(std::max(1.0, std::round(tau / dt)));
  for (Eigen::Index r = 0; r < q; ++r) {
    const double expected = std::sqrt(es.eigenvalues()[r]);
    const double measured = lag_frequency(modes[static_cast<std::size_t>(r)], dt, lag_steps);
    rep.expected_frequencies.push_back(expected);
    rep.measured_frequencies.push_back(measured);
    // Unexcited modes (NaN) carry no frequency information.
    if (std::isfinite(measured)) rep.max_frequency_error = std::max(rep.max_frequency_error, std::abs(measured - expected));
  }
  return rep;
}

BracketCheckReport bracket_check(std::size_t N, std::size_t pairs, double scale, std::uint64_t seed) {
  Rng rng(seed);
  BracketCheckReport rep;
  for (std::size_t k = 0; k < pairs; ++k) {
    const QuadraticObservable F(random_hermitian(N, rng, scale));
    const QuadraticObservable G(random_hermitian(N, rng, scale));
    const QuantumPhasePoint q = random_state(N, rng);
    rep.max_commutator_residual = std::max(rep.max_commutator_residual, commutator_residual(F, G, q));
  }
  return rep;
}

ClosureCheckReport closure_check(const ClosureCheckConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  ClosureCheckReport rep;
  const AlmostClassicalObservable C = AlmostClassicalObservable::constraint(cfg.n, cfg.N);
  for (std::size_t k = 0; k < cfg.pairs; ++k) {
    const AlmostClassicalObservable A =
        random_almost_classical(cfg.n, cfg.N, rng, cfg.terms, cfg.max_pairs, cfg.max_degree);
    const AlmostClassicalObservable B =
        random_almost_classical(cfg.n, cfg.N, rng, cfg.terms, cfg.max_pairs, cfg.max_degree);
    const AlmostClassicalObservable AB = bracket_closure(A, B);
    const ScalarField fa = [&A](const HybridPoint& h) { return A.value(h); };
    const ScalarField fb = [&B](const HybridPoint& h) { return B.value(h); };
    for (std::size_t p = 0; p < cfg.points; ++p) {
      const HybridPoint h = random_hybrid_point(cfg.n, cfg.N, rng);
      const double symbolic = AB.value(h);
      const double numeric = numeric_bracket(fa, fb, h).value;
      rep.max_closure_error = std::max(rep.max_closure_error, std::abs(symbolic - numeric));
      rep.max_constraint_bracket = std::max(rep.max_constraint_bracket, std::abs(hybrid_bracket(C, A, h).value));
      rep.max_constraint_bracket = std::max(rep.max_constraint_bracket, std::abs(hybrid_bracket(C, B, h).value));
    }
  }
  return rep;
}

int run(RunConfig config, const RunOptions& options) {
  Streams s{options.out ? *options.out : std::cout, options.err ? *options.err : std::cerr};
  if (options.seed) config.numerics.seed = *options.seed;
  if (options.out_dir) config.output.directory = *options.out_dir;
  const std::vector<Diagnostic> diags = validate(config);
  if (!diags.empty()) {
    for (const Diagnostic& d : diags) s.err << "error: " << format_diagnostic(d) << '\n';
    return kValidationError;
  }
  try {
    switch (config.command) {
      case Command::Simulate: return cmd_simulate(config, s);
      case Command::Ensemble: return cmd_ensemble(config, s);
      case Command::BracketCheck: return cmd_bracket_check(config, s);
      case Command::PeresTerno: return cmd_peres_terno(config, s);
      case Command::Tangibility: return cmd_tangibility(config, s);
      case Command::ClosureCheck: return cmd_closure_check(config, s);
    }
  } catch (const StepFailure& e) {
    s.err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const IntegrityError& e) {
    s.err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const SamplerError& e) {
    s.err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const NormalizationError& e) {
    s.err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const Error& e) {
    s.err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::filesystem::filesystem_error& e) {
    s.err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kValidationError;
}

int run_file(Command command, const std::string& config_path, const RunOptions& options) {
  LoadResult loaded = load_config(config_path, command);
  if (!loaded.diagnostics.empty()) {
    std::ostream& err = options.err ? *options.err : std::cerr;
    for (const Diagnostic& d : loaded.diagnostics) err << "error: " << format_diagnostic(d) << '\n';
    return kValidationError;
  }
  return run(std::move(loaded.config), options);
}

}  // namespace hybridflow::cli
