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

#include "iceval/estimators.hpp"

#include <cmath>
#include <string>

namespace iceval {
namespace {

void check_propensity(const LoggedInteraction& rec, std::size_t index) {
  if (!(rec.propensity > 0.0)) {
    throw std::invalid_argument("record " + std::to_string(index) +
                                ": logged propensity must be positive");
  }
}

const Vec& require_row(const LoggedInteraction& rec, std::size_t index,
                       std::size_t k, const WeightScheme& scheme) {
  if (rec.logging_row.size() != k) {
    throw MissingLoggingRow(scheme.label() + " needs the full logging row; record " +
                            std::to_string(index) +
                            (rec.logging_row.empty() ? " has none" : " has a short one"));
  }
  return rec.logging_row;
}

}  // namespace

double evaluate(const WeightScheme& scheme,
                std::span<const LoggedInteraction> data, const Policy& policy,
                const RewardModel& model, EstimateDiagnostics* diag) {
  if (data.empty()) throw EmptyData("evaluate: empty logged sample");
  const std::size_t k = policy.num_actions();
  Vec prob_scratch(k), value_scratch(k);

  // Model-side weight per action: constant for most schemes, row-dependent
  // for the threshold family.
  const bool alpha_from_row = scheme.needs_logging_row();
  double alpha_const = 0.0;
  switch (scheme.kind) {
    case SchemeKind::kDirect:
    case SchemeKind::kDoublyRobust:
    case SchemeKind::kCabDr:
      alpha_const = 1.0;
      break;
    case SchemeKind::kStaticBlend:
      alpha_const = 1.0 - scheme.blend;
      break;
    default:
      break;
  }
  const bool alpha_active = alpha_from_row || alpha_const != 0.0;
  const bool wants_model = scheme.uses_reward_model();

  double acc = 0.0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const LoggedInteraction& rec = data[idx];
    check_propensity(rec, idx);
    const auto probs = policy.action_probs(rec, prob_scratch);
    if (rec.action >= k) {
      throw std::invalid_argument("record " + std::to_string(idx) +
                                  ": action out of range");
    }
    std::span<const double> values;
    if (wants_model) values = model.action_values(rec, value_scratch);

    if (alpha_active) {
      const Vec* row = nullptr;
      if (alpha_from_row) row = &require_row(rec, idx, k, scheme);
      if (diag != nullptr && row != nullptr) {
        for (std::size_t y = 0; y < k; ++y) {
          if (probs[y] > 0.0 && (*row)[y] <= 0.0) ++diag->zero_support_pairs;
        }
        diag->scanned_pairs += k;
      }
      for (std::size_t y = 0; y < k; ++y) {
        if (probs[y] <= 0.0) continue;
        double w_alpha = alpha_const;
        if (alpha_from_row) {
          w_alpha = scheme_weights(scheme, probs[y], (*row)[y]).alpha;
        }
        if (w_alpha != 0.0) acc += probs[y] * w_alpha * values[y];
      }
    }

    const WeightTriplet t = scheme_weights(scheme, probs[rec.action], rec.propensity);
    const double scaled = probs[rec.action] / rec.propensity;
    if (t.beta != 0.0) acc += scaled * t.beta * rec.reward;
    if (t.gamma != 0.0) acc += scaled * t.gamma * values[rec.action];
  }
  return acc / static_cast<double>(data.size());
}

double evaluate(const WeightScheme& scheme,
                std::span<const LoggedInteraction> data, const Policy& policy,
                EstimateDiagnostics* diag) {
  if (scheme.uses_reward_model()) {
    throw std::invalid_argument(scheme.label() +
                                " needs a reward model; use the full overload");
  }
  // The model is never consulted on this path; a throwing stub keeps that honest.
  class NoModel final : public RewardModel {
   public:
    std::size_t num_actions() const override { return 0; }
    std::span<const double> action_values(const LoggedInteraction&,
                                          std::span<double>) const override {
      throw std::logic_error("reward model consulted on a model-free path");
    }
  } stub;
  return evaluate(scheme, data, policy, stub, diag);
}

Vec evaluate_gradient(const WeightScheme& scheme,
                      std::span<const LoggedInteraction> data,
                      const SoftmaxLinearPolicy& policy, const RewardModel& model) {
  if (!scheme.differentiable()) {
    throw NonDifferentiableScheme(scheme.label() +
                                  " has indicator weights; no gradient exists");
  }
  if (data.empty()) throw EmptyData("evaluate_gradient: empty logged sample");
  const std::size_t k = policy.num_actions();
  const std::size_t d = policy.feature_dim();
  const double clip = scheme.clip;

  // Floored policies stay differentiable: pi' = keep * softmax + eps, so the
  // chain rule just scales the softmax Jacobian by `keep`.
  const double keep = 1.0 - policy.uniform_floor() * static_cast<double>(k);

  Vec grad(policy.num_params(), 0.0);
  Vec soft(k), floored(k), values_scratch(k), coef(k);

  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    const LoggedInteraction& rec = data[idx];
    check_propensity(rec, idx);
    if (rec.features.size() != d) {
      throw std::invalid_argument("record " + std::to_string(idx) +
                                  ": feature dimension mismatch");
    }
    policy.probs_into(rec.features, soft, /*apply_floor=*/false);
    for (std::size_t y = 0; y < k; ++y) {
      floored[y] = keep * soft[y] + policy.uniform_floor();
    }
    std::span<const double> values;
    if (scheme.uses_reward_model()) values = model.action_values(rec, values_scratch);

    // coef[y] multiplies d pi'(y|x) / dw. Branch tests use the floored
    // probabilities, which are the ones the estimate itself sees.
    std::fill(coef.begin(), coef.end(), 0.0);
    const std::size_t a = rec.action;
    const double inv_p = 1.0 / rec.propensity;
    const double chat_logged = floored[a] * inv_p;

    switch (scheme.kind) {
      case SchemeKind::kDirect:
        for (std::size_t y = 0; y < k; ++y) coef[y] += values[y];
        break;
      case SchemeKind::kIps:
        coef[a] += rec.reward * inv_p;
        break;
      case SchemeKind::kClippedIps:
        if (chat_logged <= clip) coef[a] += rec.reward * inv_p;
        break;
      case SchemeKind::kDoublyRobust:
        for (std::size_t y = 0; y < k; ++y) coef[y] += values[y];
        coef[a] += (rec.reward - values[a]) * inv_p;
        break;
      case SchemeKind::kStaticBlend:
        for (std::size_t y = 0; y < k; ++y) coef[y] += (1.0 - scheme.blend) * values[y];
        coef[a] += scheme.blend * rec.reward * inv_p;
        break;
      case SchemeKind::kCab: {
        const Vec& row = require_row(rec, idx, k, scheme);
        for (std::size_t y = 0; y < k; ++y) {
          if (floored[y] <= 0.0) continue;
          // Model side is active only on the clipped branch, where the term
          // is pi(y) - clip * row(y) and its gradient is d pi(y)/dw.
          const double chat = row[y] > 0.0
                                  ? floored[y] / row[y]
                                  : std::numeric_limits<double>::infinity();
          if (chat > clip) coef[y] += values[y];
        }
        if (chat_logged <= clip) coef[a] += rec.reward * inv_p;
        break;
      }
      case SchemeKind::kCabDr:
        for (std::size_t y = 0; y < k; ++y) coef[y] += values[y];
        if (chat_logged <= clip) coef[a] += (rec.reward - values[a]) * inv_p;
        break;
      case SchemeKind::kSwitch:
        throw NonDifferentiableScheme("unreachable");
    }

    // Fold through the softmax Jacobian: sum_y coef[y] * keep * pi(y) *
    // (phi(x, y) - sum_z pi(z) phi(x, z)), with block features phi.
    double total_b = 0.0;
    for (std::size_t y = 0; y < k; ++y) {
      const double b = coef[y] * keep * soft[y];
      if (b == 0.0) continue;
      total_b += b;
      double* block = grad.data() + y * d;
      for (std::size_t j = 0; j < d; ++j) block[j] += b * rec.features[j];
    }
    if (total_b != 0.0) {
      for (std::size_t y = 0; y < k; ++y) {
        const double shrink = total_b * soft[y];
        if (shrink == 0.0) continue;
        double* block = grad.data() + y * d;
        for (std::size_t j = 0; j < d; ++j) block[j] -= shrink * rec.features[j];
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (double& g : grad) g *= inv_n;
  return grad;
}

Vec evaluate_gradient(const WeightScheme& scheme,
                      std::span<const LoggedInteraction> data,
                      const SoftmaxLinearPolicy& policy) {
  if (scheme.uses_reward_model()) {
    throw std::invalid_argument(scheme.label() +
                                " needs a reward model; use the full overload");
  }
  class NoModel final : public RewardModel {
   public:
    std::size_t num_actions() const override { return 0; }
    std::span<const double> action_values(const LoggedInteraction&,
                                          std::span<double>) const override {
      throw std::logic_error("reward model consulted on a model-free path");
    }
  } stub;
  return evaluate_gradient(scheme, data, policy, stub);
}

}  // namespace iceval
