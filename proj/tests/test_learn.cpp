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
#include "iceval/datasets.hpp"
#include "iceval/learn.hpp"

namespace {

using iceval::BanditActors;
using iceval::BanditLog;
using iceval::EmptyData;
using iceval::erm_learn;
using iceval::expected_error;
using iceval::fit_multinomial_logistic;
using iceval::LearnCandidate;
using iceval::LearnConfig;
using iceval::LearnResult;
using iceval::LoggedInteraction;
using iceval::make_synthetic_multiclass;
using iceval::NonDifferentiableScheme;
using iceval::percentile_nearest_rank;
using iceval::select_hyperparams;
using iceval::SoftmaxLinearPolicy;
using iceval::Split;
using iceval::SupervisedDataset;
using iceval::supervised_to_bandit;
using iceval::SyntheticSpec;
using iceval::train_logger_and_models;
using iceval::validation_value;
using iceval::ValidationSelector;
using iceval::Vec;
using iceval::WeightScheme;

struct Setup {
  SupervisedDataset dataset;
  BanditActors actors;
  BanditLog train_log;
  BanditLog validation_log;
};

Setup make_setup() {
  SyntheticSpec spec;
  spec.num_examples = 600;
  spec.feature_dim = 5;
  spec.num_classes = 3;
  spec.separation = 2.5;
  spec.seed = 31;
  SupervisedDataset ds = make_synthetic_multiclass(spec);
  BanditActors actors = train_logger_and_models(ds, 0.15, 0.25, 7);
  BanditLog train = supervised_to_bandit(ds, Split::kTrain, actors.logger, 71);
  BanditLog validation =
      supervised_to_bandit(ds, Split::kValidation, actors.logger, 72);
  return Setup{std::move(ds), std::move(actors), std::move(train),
               std::move(validation)};
}

TEST_CASE("nearest-rank percentile") {
  Vec v = {10, 3, 7, 1, 9, 4, 8, 2, 6, 5};  // 1..10 shuffled
  CHECK(percentile_nearest_rank(v, 0.9) == 9.0);
  CHECK(percentile_nearest_rank(v, 1.0) == 10.0);
  CHECK(percentile_nearest_rank(v, 0.05) == 1.0);
  CHECK(percentile_nearest_rank(v, 0.55) == 6.0);
  CHECK(percentile_nearest_rank({42.0}, 0.9) == 42.0);
  CHECK_THROWS_AS((void)percentile_nearest_rank({}, 0.9), EmptyData);
  CHECK_THROWS_AS((void)percentile_nearest_rank(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)percentile_nearest_rank(v, 1.2), std::invalid_argument);
}

TEST_CASE("validating the logging policy itself recovers the mean reward") {
  const Setup s = make_setup();

  double mean_reward = 0.0;
  for (const auto& rec : s.validation_log.records) mean_reward += rec.reward;
  mean_reward /= static_cast<double>(s.validation_log.records.size());

  // All importance weights are exactly one, so both selectors reduce to the
  // plain average of the logged rewards.
  const double clipped = validation_value(s.actors.logger,
                                          s.validation_log.records,
                                          ValidationSelector::kClippedIps90);
  const double plain = validation_value(s.actors.logger,
                                        s.validation_log.records,
                                        ValidationSelector::kIps);
  CHECK(clipped == mean_reward);
  CHECK(plain == mean_reward);
}

TEST_CASE("validation scoring prefers the better policy") {
  const Setup s = make_setup();

  // Invert the target's scores to get a policy that concentrates mass on
  // wrong actions.
  Vec bad_params = s.actors.target.params();
  for (double& p : bad_params) p = -p;
  const SoftmaxLinearPolicy bad(3, 5, bad_params);

  const double good_score = validation_value(s.actors.target,
                                             s.validation_log.records);
  const double bad_score = validation_value(bad, s.validation_log.records);
  CHECK(good_score > bad_score);

  LearnConfig cfg;
  cfg.scheme = WeightScheme::ips();
  std::vector<LearnCandidate> candidates;
  candidates.push_back({cfg, bad});
  candidates.push_back({cfg, s.actors.target});
  CHECK(select_hyperparams(candidates, s.validation_log.records) == 1);
  std::swap(candidates[0], candidates[1]);
  CHECK(select_hyperparams(candidates, s.validation_log.records) == 0);
}

TEST_CASE("selection ties break toward smaller penalty, then smaller clip") {
  const Setup s = make_setup();

  LearnConfig base;
  base.scheme = WeightScheme::clipped_ips(2.0);
  base.penalty = 1e-2;

  LearnConfig smaller_penalty = base;
  smaller_penalty.penalty = 1e-3;

  LearnConfig smaller_clip = base;
  smaller_clip.scheme = WeightScheme::clipped_ips(1.0);

  // Identical policies score identically; only the config differs.
  std::vector<LearnCandidate> candidates;
  candidates.push_back({base, s.actors.target});
  candidates.push_back({smaller_penalty, s.actors.target});
  CHECK(select_hyperparams(candidates, s.validation_log.records) == 1);

  candidates.clear();
  candidates.push_back({base, s.actors.target});
  candidates.push_back({smaller_clip, s.actors.target});
  CHECK(select_hyperparams(candidates, s.validation_log.records) == 1);

  const std::vector<LearnCandidate> empty;
  CHECK_THROWS_AS((void)select_hyperparams(empty, s.validation_log.records),
                  EmptyData);
}

TEST_CASE("learning with the model-backed objective beats the logger") {
  const Setup s = make_setup();

  LearnConfig cfg;
  cfg.scheme = WeightScheme::doubly_robust();
  cfg.penalty = 1e-3;
  cfg.restarts = 2;
  cfg.max_iterations = 150;
  cfg.seed = 123;

  const LearnResult res = erm_learn(s.train_log, cfg, &s.actors.model);
  CHECK(res.restarts_run == 2);
  CHECK(std::isfinite(res.objective));
  // objective = penalty * ||w|| - estimate at the winner.
  double norm = 0.0;
  for (double p : res.policy.params()) norm += p * p;
  norm = std::sqrt(norm);
  CHECK(res.objective == doctest::Approx(cfg.penalty * norm - res.estimate)
                             .epsilon(1e-12));

  const double learned_err = expected_error(res.policy, s.dataset, Split::kTest);
  const double logger_err =
      expected_error(s.actors.logger, s.dataset, Split::kTest);
  const double uniform_err = expected_error(SoftmaxLinearPolicy(3, 5), s.dataset,
                                            Split::kTest);
  CHECK(uniform_err == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(learned_err < uniform_err);
  CHECK(learned_err < logger_err + 0.05);
}

TEST_CASE("a crushing penalty keeps the policy at uniform") {
  const Setup s = make_setup();

  LearnConfig cfg;
  cfg.scheme = WeightScheme::ips();
  cfg.penalty = 1e4;
  cfg.restarts = 2;
  cfg.max_iterations = 100;
  cfg.seed = 5;

  const LearnResult res = erm_learn(s.train_log, cfg, nullptr);
  for (double p : res.policy.params()) CHECK(std::abs(p) < 1e-3);
  const double err = expected_error(res.policy, s.dataset, Split::kTest);
  CHECK(err == doctest::Approx(2.0 / 3.0).epsilon(1e-2));
}

TEST_CASE("squared-penalty objective is also accepted") {
  const Setup s = make_setup();
  LearnConfig cfg;
  cfg.scheme = WeightScheme::cab(2.0);
  cfg.penalty = 1e-3;
  cfg.squared_penalty = true;
  cfg.restarts = 1;
  cfg.max_iterations = 80;
  const LearnResult res = erm_learn(s.train_log, cfg, &s.actors.model);
  double norm2 = 0.0;
  for (double p : res.policy.params()) norm2 += p * p;
  CHECK(res.objective == doctest::Approx(cfg.penalty * norm2 - res.estimate)
                             .epsilon(1e-12));
}

TEST_CASE("learning rejects contract violations") {
  const Setup s = make_setup();

  LearnConfig cfg;
  cfg.scheme = WeightScheme::hard_switch(1.0);
  CHECK_THROWS_AS((void)erm_learn(s.train_log, cfg, &s.actors.model),
                  NonDifferentiableScheme);

  cfg.scheme = WeightScheme::doubly_robust();
  CHECK_THROWS_AS((void)erm_learn(s.train_log, cfg, nullptr),
                  std::invalid_argument);

  cfg.scheme = WeightScheme::ips();
  cfg.restarts = 0;
  CHECK_THROWS_AS((void)erm_learn(s.train_log, cfg, nullptr),
                  std::invalid_argument);

  cfg.restarts = 1;
  BanditLog empty = s.train_log;
  empty.records.clear();
  CHECK_THROWS_AS((void)erm_learn(empty, cfg, nullptr), EmptyData);
}

TEST_CASE("a non-finite objective is traced to the offending record") {
  Setup s = make_setup();
  s.train_log.records.resize(8);
  s.train_log.records[5].propensity = 1e-320;  // r/p overflows to -inf
  s.train_log.records[5].reward = -1.0;

  LearnConfig cfg;
  cfg.scheme = WeightScheme::ips();
  cfg.restarts = 1;
  CHECK_THROWS_WITH_AS((void)erm_learn(s.train_log, cfg, nullptr),
                       "non-finite objective contribution at record 5",
                       std::invalid_argument);
}

TEST_CASE("multinomial logistic regression separates an easy problem") {
  SyntheticSpec spec;
  spec.num_examples = 300;
  spec.feature_dim = 4;
  spec.num_classes = 3;
  spec.separation = 3.0;
  spec.seed = 77;
  const SupervisedDataset ds = make_synthetic_multiclass(spec);

  const SoftmaxLinearPolicy fit =
      fit_multinomial_logistic(ds, ds.split_indices(Split::kTrain));
  CHECK(expected_error(fit, ds, Split::kTrain) < 0.1);
  CHECK(expected_error(fit, ds, Split::kTest) < 0.15);

  // Heavier regularization pulls the fit toward uniform.
  const SoftmaxLinearPolicy shrunk =
      fit_multinomial_logistic(ds, ds.split_indices(Split::kTrain), 10.0);
  double norm_fit = 0.0, norm_shrunk = 0.0;
  for (double p : fit.params()) norm_fit += p * p;
  for (double p : shrunk.params()) norm_shrunk += p * p;
  CHECK(norm_shrunk < 0.1 * norm_fit);
}

TEST_CASE("expected error of an empty split is rejected") {
  SyntheticSpec spec;
  spec.num_examples = 50;
  spec.feature_dim = 3;
  spec.num_classes = 2;
  spec.seed = 1;
  spec.train_fraction = 1.0;
  spec.validation_fraction = 0.0;
  const SupervisedDataset ds = make_synthetic_multiclass(spec);
  CHECK_THROWS_AS(
      (void)expected_error(SoftmaxLinearPolicy(2, 3), ds, Split::kTest),
      EmptyData);
}

}  // namespace
