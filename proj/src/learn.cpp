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

#include "iceval/learn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iceval {
namespace {

double norm2(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

// Locates the record whose contribution is non-finite so the error message
// points at data, not at the optimizer.
[[noreturn]] void trace_nonfinite(const WeightScheme& scheme,
                                  std::span<const LoggedInteraction> records,
                                  const SoftmaxLinearPolicy& policy,
                                  const RewardModel* model) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto one = records.subspan(i, 1);
    const double v = model != nullptr ? evaluate(scheme, one, policy, *model)
                                      : evaluate(scheme, one, policy);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite objective contribution at record " +
                                  std::to_string(i));
    }
  }
  throw std::invalid_argument("non-finite objective with no single offending record");
}

}  // namespace

LearnResult erm_learn(const BanditLog& log, const LearnConfig& config,
                      const RewardModel* model) {
  if (!config.scheme.differentiable()) {
    throw NonDifferentiableScheme(config.scheme.label() +
                                  " cannot be used as a learning objective here");
  }
  if (log.records.empty()) throw EmptyData("erm_learn: empty bandit log");
  if (config.scheme.uses_reward_model() && model == nullptr) {
    throw std::invalid_argument(config.scheme.label() + " requires a reward model");
  }
  if (config.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const std::size_t k = log.num_actions;
  const std::size_t d = log.feature_dim;
  if (k == 0 || d == 0) {
    throw std::invalid_argument("bandit log does not describe a feature problem");
  }
  const std::span<const LoggedInteraction> records(log.records);

  SoftmaxLinearPolicy work(k, d);
  const ObjectiveFn objective = [&](std::span<const double> w,
                                    std::span<double> grad) -> double {
    std::copy(w.begin(), w.end(), work.mutable_params().begin());
    const double est = config.scheme.uses_reward_model()
                           ? evaluate(config.scheme, records, work, *model)
                           : evaluate(config.scheme, records, work);
    Vec g = config.scheme.uses_reward_model()
                ? evaluate_gradient(config.scheme, records, work, *model)
                : evaluate_gradient(config.scheme, records, work);
    double value = -est;
    for (std::size_t i = 0; i < w.size(); ++i) grad[i] = -g[i];
    if (config.squared_penalty) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        value += config.penalty * w[i] * w[i];
        grad[i] += 2.0 * config.penalty * w[i];
      }
    } else {
      const double nw = norm2(w);
      value += config.penalty * nw;
      if (nw > 0.0) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          grad[i] += config.penalty * w[i] / nw;
        }
      }
      // At w == 0 the norm's subdifferential contains 0; use it.
    }
    return value;
  };

  OptimOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.gradient_tolerance = config.gradient_tolerance;

  const RngStream root(config.seed);
  std::optional<OptimResult> best;
  int runs = 0;
  for (int r = 0; r < config.restarts; ++r) {
    Vec x0(k * d, 0.0);
    if (r > 0) {
      RngStream stream = root.derive(static_cast<std::uint64_t>(r));
      for (double& v : x0) v = 0.1 * stream.normal();
    }
    {
      // Fail fast on corrupt data before burning the optimizer budget.
      Vec g(x0.size());
      const double f0 = objective(x0, g);
      if (!std::isfinite(f0)) {
        std::copy(x0.begin(), x0.end(), work.mutable_params().begin());
        trace_nonfinite(config.scheme, records, work, model);
      }
    }
    OptimResult res = config.optimizer == OptimizerKind::kLbfgs
                          ? minimize_lbfgs(objective, std::move(x0), opts)
                          : minimize_gd(objective, std::move(x0), opts);
    ++runs;
    if (!best || res.value < best->value) best = std::move(res);
  }

  LearnResult out{SoftmaxLinearPolicy(k, d, best->x), best->value, 0.0, runs};
  out.estimate = config.scheme.uses_reward_model()
                     ? evaluate(config.scheme, records, out.policy, *model)
                     : evaluate(config.scheme, records, out.policy);
  return out;
}

double expected_error(const Policy& policy, const SupervisedDataset& dataset,
                      Split split) {
  Vec scratch(policy.num_actions());
  double acc = 0.0;
  std::size_t count = 0;
  LoggedInteraction probe;
  for (const SupervisedExample& ex : dataset.examples) {
    if (ex.split != split) continue;
    probe.features = ex.features;
    const auto probs = policy.action_probs(probe, scratch);
    acc += 1.0 - probs[ex.label];
    ++count;
  }
  if (count == 0) throw EmptyData("expected_error: empty split");
  return acc / static_cast<double>(count);
}

SoftmaxLinearPolicy fit_multinomial_logistic(const SupervisedDataset& dataset,
                                             std::span<const std::size_t> indices,
                                             double l2, int max_iterations,
                                             double tolerance) {
  if (indices.empty()) throw EmptyData("logistic fit: no training examples");
  const std::size_t k = dataset.num_classes;
  const std::size_t d = dataset.feature_dim;
  SoftmaxLinearPolicy work(k, d);
  Vec probs(k);

  const ObjectiveFn objective = [&](std::span<const double> w,
                                    std::span<double> grad) -> double {
    std::copy(w.begin(), w.end(), work.mutable_params().begin());
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (const std::size_t idx : indices) {
      const SupervisedExample& ex = dataset.examples[idx];
      work.probs_into(ex.features, probs, /*apply_floor=*/false);
      loss -= std::log(std::max(probs[ex.label], 1e-300));
      for (std::size_t y = 0; y < k; ++y) {
        const double coef = probs[y] - (y == ex.label ? 1.0 : 0.0);
        double* block = grad.data() + y * d;
        for (std::size_t j = 0; j < d; ++j) block[j] += coef * ex.features[j];
      }
    }
    const double inv_m = 1.0 / static_cast<double>(indices.size());
    loss *= inv_m;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] = grad[i] * inv_m + 2.0 * l2 * w[i];
      loss += l2 * w[i] * w[i];
    }
    return loss;
  };

  OptimOptions opts;
  opts.max_iterations = max_iterations;
  opts.gradient_tolerance = tolerance;
  OptimResult res = minimize_lbfgs(objective, Vec(k * d, 0.0), opts);
  return SoftmaxLinearPolicy(k, d, std::move(res.x));
}

double percentile_nearest_rank(Vec values, double q) {
  if (values.empty()) throw EmptyData("percentile of an empty set");
  if (!(q > 0.0) || q > 1.0) {
    throw std::invalid_argument("percentile rank must lie in (0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double raw = std::ceil(q * static_cast<double>(values.size()));
  const std::size_t rank = std::max<std::size_t>(1, static_cast<std::size_t>(raw));
  return values[std::min(rank, values.size()) - 1];
}

double validation_value(const Policy& policy,
                        std::span<const LoggedInteraction> validation,
                        ValidationSelector selector) {
  if (validation.empty()) throw EmptyData("validation_value: empty log");
  Vec scratch(policy.num_actions());
  Vec weights(validation.size());
  for (std::size_t i = 0; i < validation.size(); ++i) {
    const LoggedInteraction& rec = validation[i];
    if (!(rec.propensity > 0.0)) {
      throw std::invalid_argument("validation record " + std::to_string(i) +
                                  ": nonpositive propensity");
    }
    const auto probs = policy.action_probs(rec, scratch);
    weights[i] = probs[rec.action] / rec.propensity;
  }
  double acc = 0.0;
  if (selector == ValidationSelector::kIps) {
    for (std::size_t i = 0; i < validation.size(); ++i) {
      acc += weights[i] * validation[i].reward;
    }
  } else {
    const double clip = percentile_nearest_rank(weights, 0.9);
    for (std::size_t i = 0; i < validation.size(); ++i) {
      acc += std::min(weights[i], clip) * validation[i].reward;
    }
  }
  return acc / static_cast<double>(validation.size());
}

std::size_t select_hyperparams(std::span<const LearnCandidate> candidates,
                               std::span<const LoggedInteraction> validation,
                               ValidationSelector selector) {
  if (candidates.empty()) throw EmptyData("select_hyperparams: no candidates");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = validation_value(candidates[i].policy, validation, selector);
    bool better = score > best_score;
    if (score == best_score) {
      const LearnConfig& cur = candidates[i].config;
      const LearnConfig& inc = candidates[best].config;
      better = cur.penalty < inc.penalty ||
               (cur.penalty == inc.penalty && cur.scheme.clip < inc.scheme.clip);
    }
    if (better) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

}  // namespace iceval
