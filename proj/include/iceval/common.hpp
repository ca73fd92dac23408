// Copyright 2026 The iceval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iceval {

using Vec = std::vector<double>;

/// Dense row-major matrix with a fixed shape. Small worlds only; no BLAS.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from nested vectors; every row must have the same length.
  static Mat from_rows(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  const Vec& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

// Error taxonomy. Estimator code throws these instead of generic logic errors
// so callers (CLI, tests) can distinguish contract violations from bugs.

/// The evaluated policy puts mass where the logging side has none.
struct SupportViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Weight-scheme construction with missing or out-of-range hyperparameters.
struct InvalidScheme : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scheme that needs the full logging probability row met a record without one.
struct MissingLoggingRow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation received an empty sample.
struct EmptyData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gradient requested for a scheme with indicator weights.
struct NonDifferentiableScheme : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ranking estimator whose correction term needs unobserved examination bits.
struct NotIdentifiableInLTR : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pairwise ranking objective received a negative per-document coefficient.
struct InvalidCoefficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace iceval
