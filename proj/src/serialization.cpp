// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridflow/serialization.hpp"

#include "hybridflow/errors.hpp"

#include <cstdio>
#include <fstream>
#include <system_error>

namespace hybridflow {

namespace {

RealVector real_vector(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw Error(std::string("state JSON: missing array '") + key + "'");
  const auto& a = j.at(key);
  RealVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw Error(std::string("state JSON: non-numeric entry in '") + key + "'");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

nlohmann::json array_of(const RealVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Complex complex_from(const nlohmann::json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
    throw Error("complex JSON: expected a number or an [re, im] pair");
  }
  return {e[0].get<double>(), e[1].get<double>()};
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json to_json(const HybridPoint& h) {
  return {{"x", array_of(h.cl().x())}, {"p", array_of(h.cl().p())}, {"X", array_of(h.qm().X())},
          {"P", array_of(h.qm().P())}};
}

HybridPoint hybrid_point_from_json(const nlohmann::json& j) {
  return HybridPoint(ClassicalPoint(real_vector(j, "x"), real_vector(j, "p")),
                     QuantumPhasePoint(real_vector(j, "X"), real_vector(j, "P")));
}

nlohmann::json to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw Error("matrix JSON: expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw DimensionError("matrix JSON: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from(j[i][k]);
    }
  }
  return m;
}

nlohmann::json to_json(const ComplexVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

ComplexVector complex_vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("vector JSON: expected an array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from(j[i]);
  return v;
}

std::string trajectory_csv(const Trajectory& tr) {
  if (tr.states.empty()) throw Error("trajectory_csv: empty trajectory");
  const std::size_t n = tr.states.front().classical_dim();
  const std::size_t N = tr.states.front().quantum_dim();
  std::string out = "t";
  auto cols = [&](const char* name, std::size_t count) {
    for (std::size_t k = 1; k <= count; ++k) out += "," + std::string(name) + "_" + std::to_string(k);
  };
  cols("x", n);
  cols("p", n);
  cols("X", N);
  cols("P", N);
  out += ",H_sigma,C\n";
  for (std::size_t r = 0; r < tr.states.size(); ++r) {
    out += format_number(tr.times[r]);
    const RealVector y = tr.states[r].flatten();
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      out += ',';
      out += format_number(y[k]);
    }
    out += ',' + format_number(tr.energy[r]) + ',' + format_number(tr.constraint[r]) + '\n';
  }
  return out;
}

nlohmann::json to_json(const TrajectoryMetadata& m) {
  return {{"integrator", m.integrator},
          {"dt", m.dt},
          {"newton_tolerance", m.newton_tolerance},
          {"steps", m.steps},
          {"newton_fallbacks", m.newton_fallbacks},
          {"renormalizations", m.renormalizations},
          {"max_energy_drift", m.max_energy_drift},
          {"max_constraint_drift", m.max_constraint_drift}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace hybridflow
