// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/cli/commands.hpp"
#include "hybridflow/cli/config.hpp"
#include "hybridflow/serialization.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hybridflow;
using namespace hybridflow::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = HYBRIDFLOW_CONFIG_DIR;

const char* kBilinear = R"(
command = "simulate"
[model]
kind = "bilinear"
N = 6
m = [1.0]
omega = [1.0]
lambda = [0.1]
[initial]
x = [1.0]
p = [0.0]
coherent = [0.5, 0.0]
[numerics]
dt = 0.01
T = 0.2
[output]
prefix = "unit"
)";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hybridflow_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<Diagnostic> diagnose(const std::string& text, Command c = Command::Simulate) {
  auto r = parse_config(text, c);
  if (!r.diagnostics.empty()) return r.diagnostics;
  return validate(r.config);
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

int quiet_run(Command c, const fs::path& cfg, const fs::path& out, std::optional<std::uint64_t> seed = {}) {
  std::ostringstream o, e;
  RunOptions opts;
  opts.out_dir = out.string();
  opts.seed = seed;
  opts.out = &o;
  opts.err = &e;
  return run_file(c, cfg.string(), opts);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("command names round trip") {
    for (auto c : {Command::Simulate, Command::Ensemble, Command::BracketCheck, Command::PeresTerno,
                   Command::Tangibility, Command::ClosureCheck}) {
      CHECK(parse_command(command_name(c)) == c);
    }
    CHECK(parse_command("benchmark-peres-terno") == Command::PeresTerno);
    CHECK_FALSE(parse_command("bogus").has_value());
  }

  TEST_CASE("a valid config has no diagnostics") { CHECK(diagnose(kBilinear).empty()); }

  TEST_CASE("zero time step gives one diagnostic naming numerics.dt") {
    const auto d = diagnose(replace(kBilinear, "dt = 0.01", "dt = 0.0"));
    REQUIRE(d.size() == 1);
    CHECK(d[0].key == "numerics.dt");
  }

  TEST_CASE("unnormalized amplitudes report the measured norm") {
    const auto d = diagnose(replace(kBilinear, "coherent = [0.5, 0.0]", "amplitudes = [0.9, 0, 0, 0, 0, 0]"));
    REQUIRE(d.size() == 1);
    CHECK(d[0].key == "initial.amplitudes");
    CHECK(d[0].message.find("0.9") != std::string::npos);
  }

  TEST_CASE("unknown keys and type errors are diagnosed") {
    auto d = diagnose(replace(kBilinear, "T = 0.2", "T = 0.2\ntypo = 3"));
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].key == "numerics.typo");
    d = diagnose(replace(kBilinear, "N = 6", "N = \"six\""));
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].key == "model.N");
    CHECK_FALSE(diagnose("[model\nN = 3").empty());
  }

  TEST_CASE("stochastic commands require a seed") {
    const auto d = diagnose("command = \"bracket-check\"\n", Command::BracketCheck);
    REQUIRE(d.size() == 1);
    CHECK(d[0].key == "numerics.seed");
  }

  TEST_CASE("bundled configs validate") {
    const std::vector<std::pair<std::string, Command>> configs{
        {"bilinear_simulate.toml", Command::Simulate},     {"localized_simulate.toml", Command::Simulate},
        {"generic_simulate.toml", Command::Simulate},      {"peres_terno.toml", Command::PeresTerno},
        {"bracket_check.toml", Command::BracketCheck},     {"closure_check.toml", Command::ClosureCheck},
        {"tangibility.toml", Command::Tangibility},        {"ensemble.toml", Command::Ensemble}};
    for (const auto& [file, cmd] : configs) {
      CAPTURE(file);
      const auto r = load_config((kConfigDir / file).string(), cmd);
      CHECK(r.diagnostics.empty());
      CHECK(validate(r.config).empty());
    }
  }

  TEST_CASE("simulate writes the documented CSV header and summary") {
    const auto dir = scratch("simulate");
    const auto cfg = dir / "run.toml";
    std::ofstream(cfg) << kBilinear;
    REQUIRE(quiet_run(Command::Simulate, cfg, dir) == kSuccess);
    const std::string csv = slurp(dir / "unit_trajectory.csv");
    std::string header = "t,x_1,p_1";
    for (int i = 1; i <= 6; ++i) header += ",X_" + std::to_string(i);
    for (int i = 1; i <= 6; ++i) header += ",P_" + std::to_string(i);
    header += ",H_sigma,C\n";
    CHECK(csv.substr(0, header.size()) == header);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
    const auto summary = nlohmann::json::parse(slurp(dir / "unit_summary.json"));
    CHECK(summary.contains("metadata"));
  }

  TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    const auto bad = dir / "bad.toml";
    std::ofstream(bad) << replace(kBilinear, "dt = 0.01", "dt = -1.0");
    CHECK(quiet_run(Command::Simulate, bad, dir) == kValidationError);
    CHECK(quiet_run(Command::Simulate, dir / "missing.toml", dir) == kValidationError);

    const auto fails = dir / "fails.toml";
    std::ofstream(fails) << replace(replace(kBilinear, "dt = 0.01", "dt = 2.0"), "T = 0.2",
                                    "T = 4.0\nmax_iterations = 1");
    CHECK(quiet_run(Command::Simulate, fails, dir) == kNumericalFailure);

    const auto strict = dir / "strict.toml";
    std::ofstream(strict) << replace(kBilinear, "T = 0.2", "T = 0.2\nenergy_tolerance = 1e-30");
    CHECK(quiet_run(Command::Simulate, strict, dir) == kPropertyFailure);
  }

  TEST_CASE("same seed gives byte-identical outputs") {
    const auto a = scratch("seed_a"), b = scratch("seed_b");
    REQUIRE(quiet_run(Command::BracketCheck, kConfigDir / "bracket_check.toml", a, 9) == kSuccess);
    REQUIRE(quiet_run(Command::BracketCheck, kConfigDir / "bracket_check.toml", b, 9) == kSuccess);
    for (const auto& e : fs::directory_iterator(a)) {
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }

    const auto cfg = a / "ens.toml";
    std::string text = slurp(kConfigDir / "ensemble.toml");
    text = replace(text, "samples = 400", "samples = 24");
    text = replace(text, "T = 5.0", "T = 0.5");
    std::ofstream(cfg) << text;
    const auto e1 = scratch("ens_a"), e2 = scratch("ens_b");
    REQUIRE(quiet_run(Command::Ensemble, cfg, e1) == kSuccess);
    REQUIRE(quiet_run(Command::Ensemble, cfg, e2) == kSuccess);
    CHECK(slurp(e1 / "ensemble_ensemble.json") == slurp(e2 / "ensemble_ensemble.json"));
  }

  TEST_CASE("json state round trip") {
    ComplexVector c(2);
    c << 0.6, Complex(0.0, 0.8);
    RealVector x(1), p(1);
    x << 0.125;
    p << -3.0;
    const HybridPoint h(ClassicalPoint(x, p), encode_state(c));
    CHECK(hybrid_point_from_json(nlohmann::json::parse(to_json(h).dump())) == h);
    const ComplexMatrix m = ComplexMatrix::Random(3, 3);
    CHECK(complex_matrix_from_json(nlohmann::json::parse(to_json(m).dump())) == m);
  }
}
