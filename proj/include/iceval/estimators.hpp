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

#include <span>

#include "iceval/data_types.hpp"
#include "iceval/policy.hpp"
#include "iceval/scheme.hpp"

namespace iceval {

/// Estimators never hard-fail on support problems (the data is what it is);
/// they count them instead. A pair (record, action) is counted when the
/// evaluated policy puts mass on an action whose estimated logging
/// probability is zero. Pairs are only observable for schemes that scan the
/// logging row; `scanned_pairs` says how many were looked at.
struct EstimateDiagnostics {
  std::size_t zero_support_pairs = 0;
  std::size_t scanned_pairs = 0;
};

/// The weight-triplet estimate of the value of `policy` on a logged sample:
/// the per-record sum of (a) policy-weighted model values times w_alpha over
/// all actions, (b) the importance-weighted logged reward times w_beta, and
/// (c) the importance-weighted model value at the logged action times
/// w_gamma, averaged over records.
///
/// Throws EmptyData on an empty sample, MissingLoggingRow when the scheme
/// thresholds on per-action logging probabilities and a record has no row,
/// and std::invalid_argument on a nonpositive logged propensity.
double evaluate(const WeightScheme& scheme,
                std::span<const LoggedInteraction> data, const Policy& policy,
                const RewardModel& model, EstimateDiagnostics* diag = nullptr);

/// Overload for schemes whose triplet never touches the reward model
/// (IPS, cIPS). Throws std::invalid_argument for any other scheme.
double evaluate(const WeightScheme& scheme,
                std::span<const LoggedInteraction> data, const Policy& policy,
                EstimateDiagnostics* diag = nullptr);

/// Gradient of evaluate() with respect to the softmax policy parameters.
/// Piecewise-linear clip weights contribute their active branch's gradient;
/// at a clip boundary the unclipped branch is used. Throws
/// NonDifferentiableScheme for indicator-weight schemes (SWITCH).
Vec evaluate_gradient(const WeightScheme& scheme,
                      std::span<const LoggedInteraction> data,
                      const SoftmaxLinearPolicy& policy, const RewardModel& model);

/// Reward-model-free overload, valid for IPS and cIPS only.
Vec evaluate_gradient(const WeightScheme& scheme,
                      std::span<const LoggedInteraction> data,
                      const SoftmaxLinearPolicy& policy);

}  // namespace iceval
