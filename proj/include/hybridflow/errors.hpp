// Copyright 2026 The hybridflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Amplitude vector or phase point off the unit sphere.
class NormalizationError : public Error {
 public:
  NormalizationError(const std::string& what, double measured)
      : Error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

/// A value that the type invariants say cannot occur (non-Hermitian matrix,
/// negative weight, complex residual of a real observable).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// The implicit midpoint solve did not converge.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double residual, std::size_t step_index = 0)
      : Error(what), residual_(residual), step_index_(step_index) {}
  double residual() const noexcept { return residual_; }
  std::size_t step_index() const noexcept { return step_index_; }

 private:
  double residual_;
  std::size_t step_index_;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridflow
