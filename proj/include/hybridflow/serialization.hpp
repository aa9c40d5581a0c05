// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

/// @file serialization.hpp
/// @brief JSON and CSV encodings of states, matrices and trajectories.
///
/// Complex numbers are [re, im] pairs. CSV numbers use 17 significant digits.

#pragma once

#include "hybridflow/dynamics.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace hybridflow {

std::string format_number(double v);

nlohmann::json to_json(const HybridPoint& h);
/// Expects {"x": [...], "p": [...], "X": [...], "P": [...]}.
HybridPoint hybrid_point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComplexVector& v);
ComplexVector complex_vector_from_json(const nlohmann::json& j);

/// Header t,x_1..x_n,p_1..p_n,X_1..X_N,P_1..P_N,H_sigma,C.
std::string trajectory_csv(const Trajectory& tr);
nlohmann::json to_json(const TrajectoryMetadata& m);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace hybridflow
