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

#include <optional>

#include "iceval/data_types.hpp"
#include "iceval/estimators.hpp"
#include "iceval/optim.hpp"
#include "iceval/rng.hpp"

namespace iceval {

enum class OptimizerKind { kLbfgs, kGradientDescent };

/// Configuration of one counterfactual-risk-minimization run. The objective
/// minimized is -estimate(policy) + penalty * ||w||_2 (or the squared norm
/// when squared_penalty). Restart 0 starts at w = 0; restarts 1..restarts-1
/// draw every coordinate from N(0, 0.1^2) on streams derived from `seed`,
/// and the best final objective wins.
struct LearnConfig {
  WeightScheme scheme;
  double penalty = 1e-3;
  bool squared_penalty = false;
  int restarts = 10;
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kLbfgs;
};

struct LearnResult {
  SoftmaxLinearPolicy policy;
  double objective = 0.0;   // penalized negative estimate at the winner
  double estimate = 0.0;    // raw estimate at the winner
  int restarts_run = 0;
};

/// Learns a softmax policy by maximizing the counterfactual estimate minus
/// the norm penalty on the given log. `model` may be null for schemes that
/// never touch it (IPS, cIPS) and is required otherwise. Throws
/// NonDifferentiableScheme for SWITCH, EmptyData on an empty log, and
/// std::invalid_argument when a non-finite objective is traced to a record.
LearnResult erm_learn(const BanditLog& log, const LearnConfig& config,
                      const RewardModel* model);

/// Exact expected error of a policy on a dataset split:
/// mean over examples of (1 - pi(correct label | x)).
double expected_error(const Policy& policy, const SupervisedDataset& dataset,
                      Split split);

/// Multinomial logistic regression via the same optimizer: minimizes mean
/// cross-entropy + l2 * ||w||_2^2. Convex, so a single w = 0 start suffices.
SoftmaxLinearPolicy fit_multinomial_logistic(const SupervisedDataset& dataset,
                                             std::span<const std::size_t> indices,
                                             double l2 = 1e-4,
                                             int max_iterations = 300,
                                             double tolerance = 1e-7);

enum class ValidationSelector {
  kClippedIps90,  // cIPS with the clip set to the 90th-percentile weight
  kIps,
};

/// Validation score of a candidate policy on a held-out log. For the default
/// selector the clip is the nearest-rank 90th percentile of the empirical
/// importance weights pi(y_i|x_i)/p_i on that log.
double validation_value(const Policy& policy,
                        std::span<const LoggedInteraction> validation,
                        ValidationSelector selector = ValidationSelector::kClippedIps90);

struct LearnCandidate {
  LearnConfig config;
  SoftmaxLinearPolicy policy;
};

/// Picks the candidate with the highest validation score. Ties break toward
/// the smaller penalty, then the smaller clip. Returns the winning index.
std::size_t select_hyperparams(std::span<const LearnCandidate> candidates,
                               std::span<const LoggedInteraction> validation,
                               ValidationSelector selector = ValidationSelector::kClippedIps90);

/// Nearest-rank percentile (q in (0, 1]): the ceil(q * N)-th smallest value.
double percentile_nearest_rank(Vec values, double q);

}  // namespace iceval
