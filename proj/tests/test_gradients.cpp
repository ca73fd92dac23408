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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "iceval/estimators.hpp"
#include "iceval/policy.hpp"
#include "iceval/rng.hpp"

namespace {

using iceval::ClassifierRewardModel;
using iceval::EmptyData;
using iceval::evaluate;
using iceval::evaluate_gradient;
using iceval::LoggedInteraction;
using iceval::NonDifferentiableScheme;
using iceval::RewardModel;
using iceval::RngStream;
using iceval::SoftmaxLinearPolicy;
using iceval::Vec;
using iceval::WeightScheme;

constexpr std::size_t kActions = 3;
constexpr std::size_t kDim = 4;

struct Problem {
  std::vector<LoggedInteraction> data;
  SoftmaxLinearPolicy policy;
  ClassifierRewardModel model;
};

Problem make_problem(std::uint64_t seed, std::size_t n, double floor) {
  RngStream rng(seed);

  Vec policy_params(kActions * kDim);
  for (double& p : policy_params) p = 0.5 * rng.normal();
  SoftmaxLinearPolicy policy(kActions, kDim, policy_params, floor);

  Vec model_params(kActions * kDim);
  for (double& p : model_params) p = 0.7 * rng.normal();
  ClassifierRewardModel model(SoftmaxLinearPolicy(kActions, kDim, model_params));

  // An arbitrary softened logging policy generates actions and rows.
  Vec logger_params(kActions * kDim);
  for (double& p : logger_params) p = 0.6 * rng.normal();
  SoftmaxLinearPolicy logger(kActions, kDim, logger_params, 0.05);

  std::vector<LoggedInteraction> data(n);
  for (LoggedInteraction& rec : data) {
    rec.features.resize(kDim);
    for (double& f : rec.features) f = rng.normal();
    const Vec row = logger.probs(rec.features);
    rec.action = rng.categorical(row);
    rec.propensity = row[rec.action];
    rec.logging_row = row;
    rec.reward = rng.normal();
  }
  return Problem{std::move(data), std::move(policy), std::move(model)};
}

double estimate_at(const WeightScheme& scheme, const Problem& prob, const Vec& params) {
  const SoftmaxLinearPolicy p(kActions, kDim, params, prob.policy.uniform_floor());
  return evaluate(scheme, prob.data, p, prob.model);
}

/// Central finite differences of the estimate in every coordinate.
Vec fd_gradient(const WeightScheme& scheme, const Problem& prob, double h = 1e-5) {
  Vec params = prob.policy.params();
  Vec grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = estimate_at(scheme, prob, params);
    params[i] = keep - h;
    const double down = estimate_at(scheme, prob, params);
    params[i] = keep;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double rel_gap(const Vec& a, const Vec& b) {
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff2 += (a[i] - b[i]) * (a[i] - b[i]);
    ref2 += b[i] * b[i];
  }
  return std::sqrt(diff2) / std::max(1.0, std::sqrt(ref2));
}

/// The clip thresholds below must stay away from every estimated importance
/// ratio in the sample, or finite differences would straddle a kink.
void require_clear_of_boundary(const Problem& prob, double clip) {
  Vec scratch(kActions);
  for (const LoggedInteraction& rec : prob.data) {
    const auto probs = prob.policy.action_probs(rec, scratch);
    for (std::size_t y = 0; y < kActions; ++y) {
      const double chat = probs[y] / rec.logging_row[y];
      REQUIRE(std::abs(chat - clip) > 1e-3);
    }
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  const double clip = 0.8;
  const Problem prob = make_problem(2024, 25, 0.0);
  require_clear_of_boundary(prob, clip);

  const WeightScheme schemes[] = {
      WeightScheme::direct(),
      WeightScheme::ips(),
      WeightScheme::clipped_ips(clip),
      WeightScheme::doubly_robust(),
      WeightScheme::static_blend(0.3),
      WeightScheme::cab(clip),
      WeightScheme::cab_dr(clip),
  };
  for (const WeightScheme& s : schemes) {
    CAPTURE(s.label());
    const Vec analytic = evaluate_gradient(s, prob.data, prob.policy, prob.model);
    const Vec fd = fd_gradient(s, prob);
    CHECK(rel_gap(fd, analytic) <= 1e-5);
  }
}

TEST_CASE("gradients remain correct across instances and thresholds") {
  const double clips[] = {0.5, 1.3, 2.7};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Problem prob = make_problem(seed, 20, 0.0);
    for (double clip : clips) {
      CAPTURE(seed);
      CAPTURE(clip);
      require_clear_of_boundary(prob, clip);
      for (const WeightScheme& s :
           {WeightScheme::clipped_ips(clip), WeightScheme::cab(clip),
            WeightScheme::cab_dr(clip)}) {
        const Vec analytic = evaluate_gradient(s, prob.data, prob.policy, prob.model);
        const Vec fd = fd_gradient(s, prob);
        CHECK(rel_gap(fd, analytic) <= 1e-5);
      }
    }
  }
}

TEST_CASE("gradients chain through a uniform floor") {
  const Problem prob = make_problem(77, 20, 0.02);
  require_clear_of_boundary(prob, 0.9);
  for (const WeightScheme& s :
       {WeightScheme::direct(), WeightScheme::ips(), WeightScheme::cab(0.9)}) {
    CAPTURE(s.label());
    const Vec analytic = evaluate_gradient(s, prob.data, prob.policy, prob.model);
    const Vec fd = fd_gradient(s, prob);
    CHECK(rel_gap(fd, analytic) <= 1e-5);
  }
}

TEST_CASE("model-free gradient overload") {
  const Problem prob = make_problem(5, 10, 0.0);
  const Vec with_model =
      evaluate_gradient(WeightScheme::ips(), prob.data, prob.policy, prob.model);
  const Vec without = evaluate_gradient(WeightScheme::ips(), prob.data, prob.policy);
  CHECK(rel_gap(without, with_model) == 0.0);
  CHECK_THROWS_AS(
      (void)evaluate_gradient(WeightScheme::direct(), prob.data, prob.policy),
      std::invalid_argument);
}

TEST_CASE("indicator weights have no gradient") {
  const Problem prob = make_problem(6, 10, 0.0);
  CHECK_THROWS_AS((void)evaluate_gradient(WeightScheme::hard_switch(1.0),
                                          prob.data, prob.policy, prob.model),
                  NonDifferentiableScheme);
}

TEST_CASE("gradient of an empty sample is rejected") {
  const Problem prob = make_problem(7, 5, 0.0);
  const std::vector<LoggedInteraction> empty;
  CHECK_THROWS_AS(
      (void)evaluate_gradient(WeightScheme::ips(), empty, prob.policy, prob.model),
      EmptyData);
}

}  // namespace
