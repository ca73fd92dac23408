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

#include <string>

#include "iceval/common.hpp"
#include "iceval/policy.hpp"
#include "iceval/scheme.hpp"

namespace iceval {

/// Fully specified finite contextual-bandit environment: context marginal
/// P(x); true and estimated logging policies pi0, pi0_hat; evaluated policy
/// pi; mean reward delta(x, y) with per-arm reward variance sigma2(x, y); and
/// a reward model delta_hat(x, y). Everything downstream (closed-form bias
/// and variance, Monte Carlo harnesses) enumerates these tables.
struct EnumerableWorld {
  Vec context_prob;         // P(x), sums to 1
  std::vector<std::string> action_labels;
  Mat pi0;                  // true logging policy, rows sum to 1
  Mat pi0_hat;              // estimated logging policy, rows sum to 1
  Mat pi;                   // evaluated (target) policy, rows sum to 1
  Mat delta;                // mean reward
  Mat sigma2;               // reward variance, >= 0
  Mat delta_hat;            // reward-model prediction
  bool full_support = true; // pi > 0 implies pi0 > 0 everywhere

  std::size_t num_contexts() const { return context_prob.size(); }
  std::size_t num_actions() const { return pi0.cols(); }

  /// Relative logging-estimate error zeta = 1 - pi0/pi0_hat. Only defined
  /// where pi0_hat > 0; the constructor guarantees that wherever pi0 > 0.
  double zeta(std::size_t i, std::size_t j) const {
    return 1.0 - pi0(i, j) / pi0_hat(i, j);
  }

  /// Reward-model residual delta_hat - delta.
  double residual(std::size_t i, std::size_t j) const {
    return delta_hat(i, j) - delta(i, j);
  }

  /// Validates shapes, row sums (1e-12), nonnegativity, sigma2 >= 0, and
  /// that pi0_hat > 0 wherever pi0 > 0; computes the support flag. Throws
  /// std::invalid_argument on malformed input. An empty pi0_hat means
  /// "logging probabilities known exactly" and copies pi0.
  static EnumerableWorld create(Vec context_prob,
                                std::vector<std::string> action_labels, Mat pi0,
                                Mat pi0_hat, Mat pi, Mat delta, Mat sigma2,
                                Mat delta_hat);
};

/// Built-in fixture worlds: "small" (2 contexts x 2 actions, exact logging
/// probabilities), "medium" (10 x 5, estimated logging probabilities differ
/// from the truth, heteroscedastic reward noise), "heavy-tail" (importance
/// ratios up to 60 with a reward-model residual bounded away from zero).
EnumerableWorld builtin_world(const std::string& name);

/// Exact value of the evaluated policy, sum_x P(x) sum_y pi(y|x) delta(x,y).
double true_value(const EnumerableWorld& world);

/// Closed-form expectation gap E[estimate] - true value for any weight
/// scheme, by enumeration of the per-(x, y) weight triplet. Requires full
/// support (throws SupportViolation otherwise).
double exact_bias(const EnumerableWorld& world, const WeightScheme& scheme);

/// Closed-form variance of the estimate at sample size n: the variance of
/// the per-sample conditional mean across contexts, plus reward noise pushed
/// through the squared beta weight, plus action-sampling variance of the
/// logged-action terms, all divided by n.
double exact_variance(const EnumerableWorld& world, const WeightScheme& scheme,
                      std::size_t n);

// Specialized closed forms for the adaptive-blend schemes. They must agree
// with the generic expressions above to near machine precision; tests pin
// that down. Branch selection is on chat = pi/pi0_hat with the boundary
// chat == clip taken by the unclipped side.

double exact_bias_cab(const EnumerableWorld& world, double clip);
double exact_variance_cab(const EnumerableWorld& world, double clip, std::size_t n);
double exact_bias_cabdr(const EnumerableWorld& world, double clip);
double exact_variance_cabdr(const EnumerableWorld& world, double clip, std::size_t n);

/// Tabular adapters exposing the world's policies and models to the
/// estimator interface.
TabularPolicy target_policy_of(const EnumerableWorld& world);
TabularPolicy logging_policy_of(const EnumerableWorld& world);
TabularRewardModel reward_model_of(const EnumerableWorld& world);

}  // namespace iceval
