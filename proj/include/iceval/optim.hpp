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

#include <functional>

#include "iceval/common.hpp"

namespace iceval {

// First-order minimizers used by the learning code. Objectives are callables
// f(x, grad_out) -> value; grad_out always has x's size and must be filled.

using ObjectiveFn = std::function<double(std::span<const double>, std::span<double>)>;

struct OptimOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  int memory = 8;          // L-BFGS history pairs
  double armijo_c1 = 1e-4; // sufficient-decrease constant
  int max_backtracks = 40;
};

struct OptimResult {
  Vec x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false; // gradient tolerance reached within budget
};

/// Limited-memory BFGS with Armijo backtracking. Accepts only monotone
/// decreases, so it is safe on the piecewise-smooth objectives the clipped
/// estimators produce (the line search simply shortens across kinks).
OptimResult minimize_lbfgs(const ObjectiveFn& f, Vec x0, const OptimOptions& opts);

/// Plain gradient descent with the same line search; fallback path.
OptimResult minimize_gd(const ObjectiveFn& f, Vec x0, const OptimOptions& opts);

}  // namespace iceval
