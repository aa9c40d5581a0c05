// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/cli/config.hpp"

#include "hybridflow/errors.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hybridflow::cli {

namespace {

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

std::string to_string(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void error(const std::string& key, const std::string& message) { diags_.push_back({key, message}); }

  void allow(const toml::table& t, const std::string& prefix, std::initializer_list<std::string_view> keys) {
    const std::set<std::string_view> allowed(keys);
    for (auto&& [k, v] : t) {
      if (!allowed.count(k.str())) error(join(prefix, k.str()), "unknown key");
    }
  }

  const toml::table* table(const toml::table& t, std::string_view key, const std::string& prefix) {
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) {
      error(join(prefix, key), "expected a table");
      return nullptr;
    }
    return n->as_table();
  }

  bool number(const toml::table& t, std::string_view key, const std::string& prefix, double& out) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    if (auto v = n->value<double>(); v && n->is_number()) {
      out = *v;
      return true;
    }
    error(join(prefix, key), "expected a number");
    return false;
  }

  template <class T>
  bool integer(const toml::table& t, std::string_view key, const std::string& prefix, T& out) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    if (!n->is_integer()) {
      error(join(prefix, key), "expected an integer");
      return false;
    }
    const std::int64_t v = *n->value<std::int64_t>();
    if (v < 0) {
      error(join(prefix, key), "must be nonnegative");
      return false;
    }
    out = static_cast<T>(v);
    return true;
  }

  bool boolean(const toml::table& t, std::string_view key, const std::string& prefix, bool& out) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    if (!n->is_boolean()) {
      error(join(prefix, key), "expected true or false");
      return false;
    }
    out = *n->value<bool>();
    return true;
  }

  bool string(const toml::table& t, std::string_view key, const std::string& prefix, std::string& out) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    if (!n->is_string()) {
      error(join(prefix, key), "expected a string");
      return false;
    }
    out = *n->value<std::string>();
    return true;
  }

  bool numbers(const toml::node& n, const std::string& key, std::vector<double>& out) {
    const toml::array* a = n.as_array();
    if (!a) {
      error(key, "expected an array of numbers");
      return false;
    }
    out.clear();
    for (const toml::node& e : *a) {
      if (!e.is_number()) {
        error(key, "expected an array of numbers");
        return false;
      }
      out.push_back(*e.value<double>());
    }
    return true;
  }

  bool numbers(const toml::table& t, std::string_view key, const std::string& prefix, std::vector<double>& out) {
    const toml::node* n = t.get(key);
    if (!n) return false;
    return numbers(*n, join(prefix, key), out);
  }

  bool vector(const toml::table& t, std::string_view key, const std::string& prefix, RealVector& out) {
    std::vector<double> v;
    if (!numbers(t, key, prefix, v)) return false;
    out = Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
    return true;
  }

  bool unsigned_list(const toml::table& t, std::string_view key, const std::string& prefix, std::vector<unsigned>& out) {
    std::vector<double> v;
    if (!numbers(t, key, prefix, v)) return false;
    out.clear();
    for (double d : v) {
      if (d < 0 || d != std::floor(d)) {
        error(join(prefix, key), "expected nonnegative integers");
        return false;
      }
      out.push_back(static_cast<unsigned>(d));
    }
    return true;
  }

  bool complex_entry(const toml::node& e, const std::string& key, Complex& out) {
    if (e.is_number()) {
      out = Complex(*e.value<double>(), 0.0);
      return true;
    }
    const toml::array* pair = e.as_array();
    if (pair && pair->size() == 2 && (*pair)[0].is_number() && (*pair)[1].is_number()) {
      out = Complex(*(*pair)[0].value<double>(), *(*pair)[1].value<double>());
      return true;
    }
    error(key, "expected complex entries as numbers or [re, im] pairs");
    return false;
  }

  bool complex_vector(const toml::node& n, const std::string& key, ComplexVector& out) {
    const toml::array* a = n.as_array();
    if (!a) {
      error(key, "expected an array of [re, im] pairs");
      return false;
    }
    out.resize(static_cast<Eigen::Index>(a->size()));
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (!complex_entry((*a)[i], key, out[static_cast<Eigen::Index>(i)])) return false;
    }
    return true;
  }

  bool complex_matrix(const toml::node& n, const std::string& key, ComplexMatrix& out) {
    const toml::array* rows = n.as_array();
    if (!rows || rows->empty()) {
      error(key, "expected a non-empty array of rows");
      return false;
    }
    const auto R = static_cast<Eigen::Index>(rows->size());
    out.resize(R, R);
    for (Eigen::Index i = 0; i < R; ++i) {
      ComplexVector row;
      if (!complex_vector((*rows)[static_cast<std::size_t>(i)], key, row)) return false;
      if (row.size() != R) {
        error(key, "matrix must be square");
        return false;
      }
      out.row(i) = row.transpose();
    }
    return true;
  }

 private:
  std::vector<Diagnostic>& diags_;
};

void read_model(Reader& r, const toml::table& t, ModelConfig& m) {
  const std::string pre = "model";
  m.present = true;
  r.allow(t, pre,
          {"kind", "N", "m", "omega", "lambda", "M", "Omega", "quadrature_nodes", "range_multiplier", "n", "basis",
           "classical_potential", "quantum_potential", "h_qm", "interaction"});
  r.string(t, "kind", pre, m.kind);
  r.integer(t, "N", pre, m.N);
  r.vector(t, "m", pre, m.m);
  r.vector(t, "omega", pre, m.omega);
  r.vector(t, "lambda", pre, m.lambda);
  r.number(t, "M", pre, m.M);
  r.number(t, "Omega", pre, m.Omega);
  r.integer(t, "quadrature_nodes", pre, m.quadrature_nodes);
  r.number(t, "range_multiplier", pre, m.range_multiplier);
  r.integer(t, "n", pre, m.n);
  r.string(t, "basis", pre, m.basis);
  r.numbers(t, "classical_potential", pre, m.classical_potential);
  r.numbers(t, "quantum_potential", pre, m.quantum_potential);
  if (const toml::node* h = t.get("h_qm")) {
    ComplexMatrix H;
    if (r.complex_matrix(*h, "model.h_qm", H)) m.h_qm = H;
  }
  if (const toml::node* in = t.get("interaction")) {
    const toml::array* terms = in->as_array();
    if (!terms) {
      r.error("model.interaction", "expected an array of tables ([[model.interaction]])");
      return;
    }
    for (std::size_t i = 0; i < terms->size(); ++i) {
      const std::string tp = "model.interaction[" + std::to_string(i) + "]";
      const toml::table* tt = (*terms)[i].as_table();
      if (!tt) {
        r.error(tp, "expected a table");
        continue;
      }
      r.allow(*tt, tp, {"coefficient", "x_powers", "p_powers", "X_power", "P_power"});
      InteractionTerm term;
      if (!r.number(*tt, "coefficient", tp, term.coefficient)) r.error(tp + ".coefficient", "required");
      r.unsigned_list(*tt, "x_powers", tp, term.x_powers);
      r.unsigned_list(*tt, "p_powers", tp, term.p_powers);
      r.integer(*tt, "X_power", tp, term.X_power);
      r.integer(*tt, "P_power", tp, term.P_power);
      m.interaction.push_back(std::move(term));
    }
  }
}

void read_initial(Reader& r, const toml::table& t, InitialConfig& init) {
  const std::string pre = "initial";
  init.present = true;
  r.allow(t, pre, {"x", "p", "amplitudes", "X", "P", "coherent"});
  r.vector(t, "x", pre, init.x);
  r.vector(t, "p", pre, init.p);
  if (const toml::node* a = t.get("amplitudes")) {
    ComplexVector c;
    if (r.complex_vector(*a, "initial.amplitudes", c)) init.amplitudes = c;
  }
  RealVector v;
  if (r.vector(t, "X", pre, v)) init.X = v;
  if (r.vector(t, "P", pre, v)) init.P = v;
  std::vector<double> coh;
  if (r.numbers(t, "coherent", pre, coh)) {
    if (coh.size() == 2) {
      init.coherent = std::array<double, 2>{coh[0], coh[1]};
    } else {
      r.error("initial.coherent", "expected [<X>, <P>]");
    }
  }
}

void read_numerics(Reader& r, const toml::table& t, NumericsConfig& num) {
  const std::string pre = "numerics";
  r.allow(t, pre,
          {"dt", "T", "seed", "residual_tolerance", "max_iterations", "renormalize", "record_stride", "energy_tolerance",
           "constraint_tolerance"});
  r.number(t, "dt", pre, num.dt);
  r.number(t, "T", pre, num.T);
  std::uint64_t seed = 0;
  if (r.integer(t, "seed", pre, seed)) num.seed = seed;
  r.number(t, "residual_tolerance", pre, num.residual_tolerance);
  r.integer(t, "max_iterations", pre, num.max_iterations);
  r.boolean(t, "renormalize", pre, num.renormalize);
  r.integer(t, "record_stride", pre, num.record_stride);
  double v = 0.0;
  if (r.number(t, "energy_tolerance", pre, v)) num.energy_tolerance = v;
  if (r.number(t, "constraint_tolerance", pre, v)) num.constraint_tolerance = v;
}

void read_ensemble(Reader& r, const toml::table& t, EnsembleConfig& e) {
  const std::string pre = "ensemble";
  r.allow(t, pre,
          {"samples", "threads", "proposal_mean", "proposal_sigma", "liouville_tolerance", "normalization_tolerance",
           "quadrature_nodes", "observables", "component", "write_samples"});
  r.integer(t, "samples", pre, e.samples);
  r.integer(t, "threads", pre, e.threads);
  r.vector(t, "proposal_mean", pre, e.proposal_mean);
  r.vector(t, "proposal_sigma", pre, e.proposal_sigma);
  r.number(t, "liouville_tolerance", pre, e.liouville_tolerance);
  r.number(t, "normalization_tolerance", pre, e.normalization_tolerance);
  r.integer(t, "quadrature_nodes", pre, e.quadrature_nodes);
  r.boolean(t, "write_samples", pre, e.write_samples);
  if (const toml::node* obs = t.get("observables")) {
    const toml::array* a = obs->as_array();
    if (!a) {
      r.error("ensemble.observables", "expected an array of names");
    } else {
      for (const toml::node& n : *a) {
        if (!n.is_string()) {
          r.error("ensemble.observables", "expected an array of names");
          break;
        }
        e.observables.push_back(*n.value<std::string>());
      }
    }
  }
  if (const toml::node* comps = t.get("component")) {
    const toml::array* a = comps->as_array();
    if (!a) {
      r.error("ensemble.component", "expected an array of tables ([[ensemble.component]])");
      return;
    }
    for (std::size_t i = 0; i < a->size(); ++i) {
      const std::string cp = "ensemble.component[" + std::to_string(i) + "]";
      const toml::table* ct = (*a)[i].as_table();
      if (!ct) {
        r.error(cp, "expected a table");
        continue;
      }
      r.allow(*ct, cp, {"state", "probability", "mean", "sigma"});
      ComponentConfig c;
      if (const toml::node* s = ct->get("state")) {
        r.complex_vector(*s, cp + ".state", c.state);
      } else {
        r.error(cp + ".state", "required");
      }
      r.number(*ct, "probability", cp, c.probability);
      if (!r.vector(*ct, "mean", cp, c.mean)) r.error(cp + ".mean", "required");
      if (!r.vector(*ct, "sigma", cp, c.sigma)) r.error(cp + ".sigma", "required");
      e.components.push_back(std::move(c));
    }
  }
}

template <class F>
void with_table(Reader& r, const toml::table& root, std::string_view key, F&& f) {
  if (const toml::table* t = r.table(root, key, "")) f(*t, std::string(key));
}

bool uses_model(Command c) {
  return c == Command::Simulate || c == Command::Ensemble || c == Command::PeresTerno || c == Command::Tangibility;
}

bool uses_initial(Command c) {
  return c == Command::Simulate || c == Command::PeresTerno || c == Command::Tangibility;
}

bool uses_seed(Command c) {
  return c == Command::Ensemble || c == Command::BracketCheck || c == Command::ClosureCheck;
}

std::size_t classical_dim(const ModelConfig& m) {
  return m.kind == "generic" ? m.n : static_cast<std::size_t>(m.m.size());
}

std::size_t quantum_dim(const ModelConfig& m) {
  if (m.kind == "generic" && m.h_qm) return static_cast<std::size_t>(m.h_qm->rows());
  return m.N;
}

void validate_model(const ModelConfig& m, std::vector<Diagnostic>& d) {
  if (m.kind == "bilinear" || m.kind == "localized") {
    if (m.N < 2) d.push_back({"model.N", "must be at least 2"});
    if (m.m.size() < 1) d.push_back({"model.m", "needs at least one classical mass"});
    if (m.omega.size() != m.m.size()) d.push_back({"model.omega", "must have the length of model.m"});
    if (m.lambda.size() != m.m.size()) d.push_back({"model.lambda", "must have the length of model.m"});
    for (Eigen::Index k = 0; k < m.m.size(); ++k) {
      if (!(m.m[k] > 0.0)) d.push_back({"model.m", "masses must be positive"});
    }
    for (Eigen::Index k = 0; k < m.omega.size(); ++k) {
      if (!(m.omega[k] > 0.0)) d.push_back({"model.omega", "frequencies must be positive"});
    }
    if (!(m.M > 0.0)) d.push_back({"model.M", "must be positive"});
    if (!(m.Omega > 0.0)) d.push_back({"model.Omega", "must be positive"});
    if (m.kind == "localized") {
      if (!(m.range_multiplier > 0.0)) d.push_back({"model.range_multiplier", "must be positive"});
      if (m.quadrature_nodes != 0 && m.quadrature_nodes < m.N) {
        d.push_back({"model.quadrature_nodes", "must be 0 (automatic) or at least N"});
      }
    }
  } else if (m.kind == "generic") {
    if (m.basis != "oscillator" && m.basis != "abstract") d.push_back({"model.basis", "must be oscillator or abstract"});
    if (m.h_qm) {
      if (!m.quantum_potential.empty()) d.push_back({"model.h_qm", "give either h_qm or quantum_potential"});
      if (m.N != 0 && m.N != static_cast<std::size_t>(m.h_qm->rows())) {
        d.push_back({"model.N", "does not match the dimension of model.h_qm"});
      }
      const double defect = hermitian_defect(*m.h_qm);
      if (defect > kHermitianTolerance * std::max(1.0, m.h_qm->cwiseAbs().maxCoeff())) {
        d.push_back({"model.h_qm", "matrix is not Hermitian (defect " + to_string(defect) + ")"});
      }
    } else {
      if (m.N < 1) d.push_back({"model.N", "must be at least 1"});
      if (m.basis != "oscillator") d.push_back({"model.quantum_potential", "requires basis = \"oscillator\""});
    }
    if (!(m.M > 0.0)) d.push_back({"model.M", "must be positive"});
    if (!(m.Omega > 0.0)) d.push_back({"model.Omega", "must be positive"});
    if (!m.interaction.empty() && m.basis != "oscillator") {
      d.push_back({"model.interaction", "requires basis = \"oscillator\""});
    }
    for (std::size_t i = 0; i < m.interaction.size(); ++i) {
      const InteractionTerm& t = m.interaction[i];
      const std::string key = "model.interaction[" + std::to_string(i) + "]";
      if ((!t.x_powers.empty() && t.x_powers.size() != m.n) || (!t.p_powers.empty() && t.p_powers.size() != m.n)) {
        d.push_back({key, "x_powers and p_powers need one entry per classical coordinate"});
      }
      if (t.X_power + t.P_power > 16) d.push_back({key, "operator degree above 16"});
    }
  } else {
    d.push_back({"model.kind", "must be bilinear, localized or generic"});
  }
}

void validate_initial(const RunConfig& c, std::vector<Diagnostic>& d) {
  const InitialConfig& in = c.initial;
  if (!in.present) {
    d.push_back({"initial", "table is required for " + command_name(c.command)});
    return;
  }
  const std::size_t n = classical_dim(c.model);
  const std::size_t N = quantum_dim(c.model);
  if (static_cast<std::size_t>(in.x.size()) != n) d.push_back({"initial.x", "needs " + std::to_string(n) + " entries"});
  if (static_cast<std::size_t>(in.p.size()) != n) d.push_back({"initial.p", "needs " + std::to_string(n) + " entries"});
  const int forms = (in.amplitudes ? 1 : 0) + ((in.X || in.P) ? 1 : 0) + (in.coherent ? 1 : 0);
  if (forms != 1) {
    d.push_back({"initial", "give exactly one of amplitudes, (X, P) or coherent"});
    return;
  }
  if (in.amplitudes) {
    if (static_cast<std::size_t>(in.amplitudes->size()) != N) {
      d.push_back({"initial.amplitudes", "needs " + std::to_string(N) + " entries"});
    } else {
      const double norm = in.amplitudes->norm();
      if (std::abs(norm - 1.0) > kAmplitudeNormTolerance) {
        d.push_back({"initial.amplitudes", "state norm is " + to_string(norm) + ", expected 1"});
      }
    }
  }
  if (in.X || in.P) {
    if (!in.X || !in.P) {
      d.push_back({"initial", "X and P must be given together"});
    } else if (static_cast<std::size_t>(in.X->size()) != N || static_cast<std::size_t>(in.P->size()) != N) {
      d.push_back({"initial.X", "X and P need " + std::to_string(N) + " entries"});
    } else {
      const double C = 0.5 * (in.X->squaredNorm() + in.P->squaredNorm());
      if (std::abs(C - 1.0) > kConstraintTolerance) {
        d.push_back({"initial.X", "constraint C = " + to_string(C) + ", expected 1"});
      }
    }
  }
  if (in.coherent && c.model.kind == "generic" && c.model.basis != "oscillator") {
    d.push_back({"initial.coherent", "requires an oscillator basis"});
  }
}

bool is_valid_observable(const std::string& name, std::size_t n, std::size_t N) {
  if (name == "H" || name == "C" || name == "X_hat" || name == "P_hat") return true;
  auto indexed = [&](const std::string& prefix, std::size_t limit) {
    if (name.rfind(prefix, 0) != 0) return false;
    const std::string rest = name.substr(prefix.size());
    if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return false;
    const std::size_t k = std::stoul(rest);
    return k >= 1 && k <= limit;
  };
  return indexed("x_", n) || indexed("p_", n) || indexed("population_", N);
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "ensemble") return Command::Ensemble;
  if (name == "bracket-check") return Command::BracketCheck;
  if (name == "benchmark-peres-terno") return Command::PeresTerno;
  if (name == "tangibility") return Command::Tangibility;
  if (name == "closure-check") return Command::ClosureCheck;
  return std::nullopt;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Ensemble: return "ensemble";
    case Command::BracketCheck: return "bracket-check";
    case Command::PeresTerno: return "benchmark-peres-terno";
    case Command::Tangibility: return "tangibility";
    case Command::ClosureCheck: return "closure-check";
  }
  return "unknown";
}

std::string format_diagnostic(const Diagnostic& d) { return d.key.empty() ? d.message : d.key + ": " + d.message; }

LoadResult parse_config(const std::string& text, Command command) {
  LoadResult out;
  out.config.command = command;
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " (line " << e.source().begin.line << ", column " << e.source().begin.column << ")";
    out.diagnostics.push_back({"", "syntax error: " + os.str()});
    return out;
  }
  Reader r(out.diagnostics);
  RunConfig& c = out.config;
  r.allow(root, "",
          {"command", "model", "initial", "numerics", "output", "bracket_check", "peres_terno", "tangibility",
           "closure_check", "ensemble"});
  std::string declared;
  if (r.string(root, "command", "", declared)) {
    c.declared_command = parse_command(declared);
    if (!c.declared_command) r.error("command", "unknown command '" + declared + "'");
  }
  with_table(r, root, "model", [&](const toml::table& t, const std::string&) { read_model(r, t, c.model); });
  with_table(r, root, "initial", [&](const toml::table& t, const std::string&) { read_initial(r, t, c.initial); });
  with_table(r, root, "numerics", [&](const toml::table& t, const std::string&) { read_numerics(r, t, c.numerics); });
  with_table(r, root, "output", [&](const toml::table& t, const std::string& p) {
    r.allow(t, p, {"directory", "prefix", "write_trajectory"});
    r.string(t, "directory", p, c.output.directory);
    r.string(t, "prefix", p, c.output.prefix);
    r.boolean(t, "write_trajectory", p, c.output.write_trajectory);
  });
  with_table(r, root, "bracket_check", [&](const toml::table& t, const std::string& p) {
    r.allow(t, p, {"N", "pairs", "scale", "tolerance"});
    r.integer(t, "N", p, c.bracket_check.N);
    r.integer(t, "pairs", p, c.bracket_check.pairs);
    r.number(t, "scale", p, c.bracket_check.scale);
    r.number(t, "tolerance", p, c.bracket_check.tolerance);
  });
  with_table(r, root, "peres_terno", [&](const toml::table& t, const std::string& p) {
    r.allow(t, p, {"tolerance", "frequency_tolerance", "truncation_tolerance", "lag"});
    r.number(t, "tolerance", p, c.peres_terno.tolerance);
    r.number(t, "frequency_tolerance", p, c.peres_terno.frequency_tolerance);
    r.number(t, "truncation_tolerance", p, c.peres_terno.truncation_tolerance);
    r.number(t, "lag", p, c.peres_terno.lag);
  });
  with_table(r, root, "tangibility", [&](const toml::table& t, const std::string& p) {
    r.allow(t, p, {"t0", "coordinate", "kind", "shape", "amplitude", "width"});
    if (!r.number(t, "t0", p, c.tangibility.t0)) r.error("tangibility.t0", "required");
    r.integer(t, "coordinate", p, c.tangibility.coordinate);
    r.string(t, "kind", p, c.tangibility.kind);
    r.string(t, "shape", p, c.tangibility.shape);
    if (!r.number(t, "amplitude", p, c.tangibility.amplitude)) r.error("tangibility.amplitude", "required");
    r.number(t, "width", p, c.tangibility.width);
  });
  with_table(r, root, "closure_check", [&](const toml::table& t, const std::string& p) {
    r.allow(t, p, {"n", "N", "pairs", "points", "terms", "max_pairs", "max_degree", "tolerance", "constraint_tolerance"});
    r.integer(t, "n", p, c.closure_check.n);
    r.integer(t, "N", p, c.closure_check.N);
    r.integer(t, "pairs", p, c.closure_check.pairs);
    r.integer(t, "points", p, c.closure_check.points);
    r.integer(t, "terms", p, c.closure_check.terms);
    r.integer(t, "max_pairs", p, c.closure_check.max_pairs);
    r.integer(t, "max_degree", p, c.closure_check.max_degree);
    r.number(t, "tolerance", p, c.closure_check.tolerance);
    r.number(t, "constraint_tolerance", p, c.closure_check.constraint_tolerance);
  });
  with_table(r, root, "ensemble", [&](const toml::table& t, const std::string&) { read_ensemble(r, t, c.ensemble); });
  return out;
}

LoadResult load_config(const std::string& path, Command command) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    LoadResult out;
    out.config.command = command;
    out.diagnostics.push_back({"", "cannot read config file " + path});
    return out;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), command);
}

std::vector<Diagnostic> validate(const RunConfig& c) {
  std::vector<Diagnostic> d;
  if (c.declared_command && *c.declared_command != c.command) {
    d.push_back({"command", "config declares '" + command_name(*c.declared_command) + "' but '" +
                                command_name(c.command) + "' was requested"});
  }
  const Command cmd = c.command;
  if (uses_model(cmd)) {
    if (!c.model.present) {
      d.push_back({"model", "table is required for " + command_name(cmd)});
    } else {
      validate_model(c.model, d);
    }
    if (!(c.numerics.dt > 0.0) || !std::isfinite(c.numerics.dt)) d.push_back({"numerics.dt", "must be positive"});
    if (!(c.numerics.T > 0.0) || !std::isfinite(c.numerics.T)) d.push_back({"numerics.T", "must be positive"});
    if (c.numerics.dt > 0.0 && c.numerics.T > 0.0) {
      const double ratio = c.numerics.T / c.numerics.dt;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        d.push_back({"numerics.T", "must be an integer multiple of numerics.dt"});
      }
    }
    if (!(c.numerics.residual_tolerance > 0.0)) d.push_back({"numerics.residual_tolerance", "must be positive"});
    if (c.numerics.max_iterations < 1) d.push_back({"numerics.max_iterations", "must be at least 1"});
    if (c.numerics.record_stride < 1) d.push_back({"numerics.record_stride", "must be at least 1"});
  }
  if (uses_initial(cmd) && c.model.present) validate_initial(c, d);
  if (uses_seed(cmd) && !c.numerics.seed) d.push_back({"numerics.seed", "a seed is required for " + command_name(cmd)});

  if (cmd == Command::PeresTerno && c.model.present && c.model.kind != "bilinear") {
    d.push_back({"model.kind", "benchmark-peres-terno requires the bilinear model"});
  }
  if (cmd == Command::BracketCheck) {
    if (c.bracket_check.N < 1) d.push_back({"bracket_check.N", "must be at least 1"});
    if (c.bracket_check.pairs < 1) d.push_back({"bracket_check.pairs", "must be at least 1"});
    if (!(c.bracket_check.scale > 0.0)) d.push_back({"bracket_check.scale", "must be positive"});
  }
  if (cmd == Command::ClosureCheck) {
    const ClosureCheckConfig& k = c.closure_check;
    if (k.N < 1) d.push_back({"closure_check.N", "must be at least 1"});
    if (k.pairs < 1) d.push_back({"closure_check.pairs", "must be at least 1"});
    if (k.points < 1) d.push_back({"closure_check.points", "must be at least 1"});
    if (k.max_degree < 0 || k.max_degree > 6) d.push_back({"closure_check.max_degree", "must lie in 0..6"});
  }
  if (cmd == Command::Tangibility) {
    const TangibilityConfig& t = c.tangibility;
    if (!(t.t0 > 0.0 && t.t0 < c.numerics.T)) d.push_back({"tangibility.t0", "must lie strictly inside (0, T)"});
    if (c.model.present && (t.coordinate < 1 || t.coordinate > classical_dim(c.model))) {
      d.push_back({"tangibility.coordinate", "must be a classical coordinate index 1..n"});
    }
    if (t.kind != "position" && t.kind != "momentum") d.push_back({"tangibility.kind", "must be position or momentum"});
    if (t.shape != "bump" && t.shape != "step") d.push_back({"tangibility.shape", "must be bump or step"});
    if (!(t.width > 0.0)) d.push_back({"tangibility.width", "must be positive"});
  }
  if (cmd == Command::Ensemble && c.model.present) {
    const EnsembleConfig& e = c.ensemble;
    const std::size_t n = classical_dim(c.model);
    const std::size_t N = quantum_dim(c.model);
    if (e.samples < 1) d.push_back({"ensemble.samples", "must be at least 1"});
    if (static_cast<std::size_t>(e.proposal_mean.size()) != 2 * n) {
      d.push_back({"ensemble.proposal_mean", "needs 2n entries ordered [x, p]"});
    }
    if (static_cast<std::size_t>(e.proposal_sigma.size()) != 2 * n) {
      d.push_back({"ensemble.proposal_sigma", "needs 2n entries ordered [x, p]"});
    } else if (e.proposal_sigma.size() > 0 && !(e.proposal_sigma.minCoeff() > 0.0)) {
      d.push_back({"ensemble.proposal_sigma", "entries must be positive"});
    }
    if (e.components.empty()) d.push_back({"ensemble.component", "at least one component is required"});
    double total = 0.0;
    for (std::size_t i = 0; i < e.components.size(); ++i) {
      const ComponentConfig& comp = e.components[i];
      const std::string key = "ensemble.component[" + std::to_string(i) + "]";
      if (static_cast<std::size_t>(comp.state.size()) != N) {
        d.push_back({key + ".state", "needs " + std::to_string(N) + " entries"});
      } else if (std::abs(comp.state.norm() - 1.0) > kAmplitudeNormTolerance) {
        d.push_back({key + ".state", "state norm is " + to_string(comp.state.norm()) + ", expected 1"});
      }
      if (!(comp.probability >= 0.0)) d.push_back({key + ".probability", "must be nonnegative"});
      total += comp.probability;
      if (static_cast<std::size_t>(comp.mean.size()) != 2 * n) d.push_back({key + ".mean", "needs 2n entries"});
      if (static_cast<std::size_t>(comp.sigma.size()) != 2 * n) {
        d.push_back({key + ".sigma", "needs 2n entries"});
      } else if (comp.sigma.size() > 0 && !(comp.sigma.minCoeff() > 0.0)) {
        d.push_back({key + ".sigma", "entries must be positive"});
      }
    }
    if (!e.components.empty() && std::abs(total - 1.0) > e.normalization_tolerance) {
      d.push_back({"ensemble.component", "probabilities sum to " + to_string(total) + ", expected 1"});
    }
    for (const std::string& name : e.observables) {
      if (!is_valid_observable(name, n, N)) d.push_back({"ensemble.observables", "unknown observable '" + name + "'"});
      if ((name == "X_hat" || name == "P_hat") && c.model.kind == "generic" && c.model.basis != "oscillator") {
        d.push_back({"ensemble.observables", name + " requires an oscillator basis"});
      }
    }
    if (e.quadrature_nodes < 2) d.push_back({"ensemble.quadrature_nodes", "must be at least 2"});
  }
  return d;
}

ModelSpec build_model(const ModelConfig& m) {
  if (m.kind == "bilinear" || m.kind == "localized") {
    LocalizedParams p;
    p.m = m.m;
    p.omega = m.omega;
    p.lambda = m.lambda;
    p.M = m.M;
    p.Omega = m.Omega;
    p.N = m.N;
    if (m.kind == "bilinear") return build_bilinear(p);
    p.quadrature.nodes = m.quadrature_nodes;
    p.quadrature.range_multiplier = m.range_multiplier;
    return build_localized_bilinear(p).model;
  }
  const std::size_t N = m.h_qm ? static_cast<std::size_t>(m.h_qm->rows()) : m.N;
  const BasisSet basis = m.basis == "oscillator" ? BasisSet::oscillator(N, m.M, m.Omega) : BasisSet::abstract(N);
  HermitianMatrix H = m.h_qm ? HermitianMatrix(*m.h_qm, kHermitianTolerance * std::max(1.0, m.h_qm->cwiseAbs().maxCoeff()))
                             : polynomial_quantum(basis, m.quantum_potential);
  return build_generic(m.n, polynomial_classical(m.n, m.classical_potential), std::move(H), m.interaction, basis);
}

HybridPoint build_initial(const RunConfig& c, const ModelSpec& model) {
  const InitialConfig& in = c.initial;
  ClassicalPoint cl(in.x, in.p);
  if (in.amplitudes) return HybridPoint(std::move(cl), encode_state(*in.amplitudes));
  if (in.X) return HybridPoint(std::move(cl), QuantumPhasePoint::physical(*in.X, *in.P));
  const std::array<double, 2> xp = *in.coherent;
  const Complex alpha = coherent_amplitude(xp[0], xp[1], model.basis.mass, model.basis.frequency);
  return HybridPoint(std::move(cl), encode_state(coherent_state(model.N, alpha)));
}

}  // namespace hybridflow::cli
