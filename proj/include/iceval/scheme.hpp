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

#include <limits>
#include <optional>
#include <string>

#include "iceval/common.hpp"

namespace iceval {

/// The estimator family is parameterized by a per-action weight triplet
/// (w_alpha, w_beta, w_gamma) multiplying, respectively, the reward-model
/// term over all actions, the inverse-propensity reward term at the logged
/// action, and the inverse-propensity reward-model correction at the logged
/// action. Every member below is one choice of triplet.
enum class SchemeKind {
  kDirect,          // model only
  kIps,             // inverse propensity scoring
  kClippedIps,      // IPS with the weight clipped at M
  kDoublyRobust,    // model + IPS correction
  kStaticBlend,     // fixed tau blend of model and IPS
  kSwitch,          // hard threshold between model and IPS at M
  kCab,             // continuous adaptive blend at M
  kCabDr,           // doubly-robust variant of the adaptive blend
};

struct WeightTriplet {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// A scheme plus its hyperparameter. `clip` (M) lives in (0, +inf] and is
/// required for kClippedIps, kSwitch, kCab, kCabDr; `blend` (tau) lives in
/// [0, 1] and is required for kStaticBlend. Construction through the named
/// factories validates; anything malformed throws InvalidScheme.
struct WeightScheme {
  SchemeKind kind = SchemeKind::kDirect;
  double clip = std::numeric_limits<double>::infinity();
  double blend = 0.0;

  static WeightScheme direct();
  static WeightScheme ips();
  static WeightScheme clipped_ips(double clip);
  static WeightScheme doubly_robust();
  static WeightScheme static_blend(double blend);
  static WeightScheme hard_switch(double clip);
  static WeightScheme cab(double clip);
  static WeightScheme cab_dr(double clip);

  /// Parses the CSV/CLI label ("DM", "IPS", "cIPS", "DR", "SB", "SWITCH",
  /// "CAB", "CAB-DR") plus its hyperparameter into a validated scheme.
  static WeightScheme from_label(const std::string& label,
                                 std::optional<double> param);

  /// Display label used in reports.
  std::string label() const;

  /// The scheme's hyperparameter value, if it has one.
  std::optional<double> param() const;

  /// True when w_alpha depends on the logging probability of each candidate
  /// action, so evaluation needs the full logging row per record.
  bool needs_logging_row() const {
    return kind == SchemeKind::kSwitch || kind == SchemeKind::kCab;
  }

  /// True when the reward model enters the estimate (alpha or gamma path).
  bool uses_reward_model() const {
    return !(kind == SchemeKind::kIps || kind == SchemeKind::kClippedIps);
  }

  /// Indicator weights make the estimate piecewise constant in the policy.
  bool differentiable() const { return kind != SchemeKind::kSwitch; }
};

/// min{clip * logging_prob / target_prob, 1} with the limiting conventions:
/// 1 when target_prob == 0, and 0 when only the logging side is 0 (so the
/// blend falls back entirely onto the model there).
double clipped_ratio(double clip, double logging_prob, double target_prob);

/// The weight triplet evaluated at one action, given the evaluated policy's
/// probability and the (estimated) logging probability for that action.
WeightTriplet scheme_weights(const WeightScheme& scheme, double target_prob,
                             double logging_prob);

}  // namespace iceval
