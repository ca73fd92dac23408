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

// Fixture estimates were computed by tools/reference/closed_form_reference.py
// by direct enumeration of the weight-triplet sum over the same three records.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "iceval/estimators.hpp"
#include "iceval/world.hpp"

namespace {

using iceval::builtin_world;
using iceval::EmptyData;
using iceval::EstimateDiagnostics;
using iceval::evaluate;
using iceval::LoggedInteraction;
using iceval::Mat;
using iceval::MissingLoggingRow;
using iceval::reward_model_of;
using iceval::TabularPolicy;
using iceval::TabularRewardModel;
using iceval::target_policy_of;
using iceval::Vec;
using iceval::WeightScheme;

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

std::vector<LoggedInteraction> fixture_records() {
  std::vector<LoggedInteraction> recs(3);
  recs[0].context_id = 0;
  recs[0].action = 0;
  recs[0].reward = 1.0;
  recs[1].context_id = 0;
  recs[1].action = 1;
  recs[1].reward = 0.5;
  recs[2].context_id = 1;
  recs[2].action = 0;
  recs[2].reward = -1.0;
  for (LoggedInteraction& r : recs) {
    r.propensity = 0.5;
    r.logging_row = {0.5, 0.5};
  }
  return recs;
}

TEST_CASE("fixture sample matches the independent reference") {
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  const TabularRewardModel model = reward_model_of(w);
  const auto recs = fixture_records();

  CHECK(near(evaluate(WeightScheme::direct(), recs, target, model),
             0.62333333333333341));
  CHECK(near(evaluate(WeightScheme::ips(), recs, target),
             0.033333333333333361));
  CHECK(near(evaluate(WeightScheme::clipped_ips(1.0), recs, target),
             0.033333333333333361));
  CHECK(near(evaluate(WeightScheme::doubly_robust(), recs, target, model),
             -0.070000000000000021));
  CHECK(near(evaluate(WeightScheme::static_blend(0.3), recs, target, model),
             0.4463333333333333));
  CHECK(near(evaluate(WeightScheme::hard_switch(1.0), recs, target, model),
             0.63333333333333341));
  CHECK(near(evaluate(WeightScheme::cab(1.0), recs, target, model),
             0.30000000000000004));
  CHECK(near(evaluate(WeightScheme::cab_dr(1.0), recs, target, model),
             0.24999999999999997));
}

TEST_CASE("static-blend fixture value interpolates the endpoints") {
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  const TabularRewardModel model = reward_model_of(w);
  const auto recs = fixture_records();

  const double dm = evaluate(WeightScheme::direct(), recs, target, model);
  const double ips = evaluate(WeightScheme::ips(), recs, target);
  const double sb = evaluate(WeightScheme::static_blend(0.3), recs, target, model);
  CHECK(near(sb, 0.7 * dm + 0.3 * ips));
}

TEST_CASE("empty samples and bad records are rejected") {
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  const TabularRewardModel model = reward_model_of(w);

  const std::vector<LoggedInteraction> empty;
  CHECK_THROWS_AS((void)evaluate(WeightScheme::ips(), empty, target), EmptyData);

  auto zero_prop = fixture_records();
  zero_prop[1].propensity = 0.0;
  CHECK_THROWS_AS((void)evaluate(WeightScheme::ips(), zero_prop, target),
                  std::invalid_argument);

  auto neg_prop = fixture_records();
  neg_prop[0].propensity = -0.2;
  CHECK_THROWS_AS((void)evaluate(WeightScheme::direct(), neg_prop, target, model),
                  std::invalid_argument);

  auto bad_action = fixture_records();
  bad_action[2].action = 7;
  CHECK_THROWS_AS((void)evaluate(WeightScheme::ips(), bad_action, target),
                  std::invalid_argument);
}

TEST_CASE("row-thresholding schemes demand the logging row") {
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  const TabularRewardModel model = reward_model_of(w);

  auto recs = fixture_records();
  recs[1].logging_row.clear();
  CHECK_THROWS_AS((void)evaluate(WeightScheme::cab(1.0), recs, target, model),
                  MissingLoggingRow);
  CHECK_THROWS_AS(
      (void)evaluate(WeightScheme::hard_switch(1.0), recs, target, model),
      MissingLoggingRow);

  // Schemes that only use the logged action's propensity do not.
  CHECK_NOTHROW((void)evaluate(WeightScheme::ips(), recs, target));
  CHECK_NOTHROW((void)evaluate(WeightScheme::cab_dr(1.0), recs, target, model));
  CHECK_NOTHROW((void)evaluate(WeightScheme::doubly_robust(), recs, target, model));
}

TEST_CASE("model-free overload refuses schemes that read the model") {
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  const auto recs = fixture_records();

  CHECK_NOTHROW((void)evaluate(WeightScheme::ips(), recs, target));
  CHECK_NOTHROW((void)evaluate(WeightScheme::clipped_ips(2.0), recs, target));
  CHECK_THROWS_AS((void)evaluate(WeightScheme::direct(), recs, target),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)evaluate(WeightScheme::doubly_robust(), recs, target),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)evaluate(WeightScheme::cab(1.0), recs, target),
                  std::invalid_argument);
}

TEST_CASE("clipping bounds the importance contribution at the threshold") {
  // One record with an importance ratio of 99; the clipped weight caps the
  // magnitude of the contribution at M.
  const TabularPolicy target(Mat::from_rows({{0.99, 0.01}}));
  const TabularRewardModel model(Mat::from_rows({{2.0, -3.0}}));

  LoggedInteraction rec;
  rec.context_id = 0;
  rec.action = 0;
  rec.reward = -1.0;
  rec.propensity = 0.01;
  rec.logging_row = {0.01, 0.99};
  const std::vector<LoggedInteraction> recs = {rec};

  const double ips = evaluate(WeightScheme::ips(), recs, target);
  CHECK(near(ips, -99.0, 1e-9));

  const double cips = evaluate(WeightScheme::clipped_ips(5.0), recs, target);
  CHECK(near(cips, -5.0, 1e-9));

  // The hard switch routes this record entirely to the model side:
  // only action 0 exceeds the threshold, so the estimate is
  // pi(0) * delta_hat(0) + pi(1) * 0-weighted terms at the unlogged action.
  const double sw = evaluate(WeightScheme::hard_switch(5.0), recs, target, model);
  CHECK(near(sw, 0.99 * 2.0, 1e-12));
}

TEST_CASE("support diagnostics count target mass without logging mass") {
  const TabularPolicy target(Mat::from_rows({{0.9, 0.1}}));
  const TabularRewardModel model(Mat::from_rows({{0.0, 0.0}}));

  LoggedInteraction rec;
  rec.context_id = 0;
  rec.action = 0;
  rec.reward = 0.0;
  rec.propensity = 1.0;
  rec.logging_row = {1.0, 0.0};
  const std::vector<LoggedInteraction> recs = {rec, rec};

  EstimateDiagnostics diag;
  (void)evaluate(WeightScheme::cab(1.0), recs, target, model, &diag);
  CHECK(diag.zero_support_pairs == 2);  // one uncovered action per record
  CHECK(diag.scanned_pairs == 4);

  // Schemes that never scan the row report nothing.
  EstimateDiagnostics none;
  (void)evaluate(WeightScheme::ips(), recs, target, &none);
  CHECK(none.zero_support_pairs == 0);
  CHECK(none.scanned_pairs == 0);
}

TEST_CASE("estimates scale linearly in the rewards where expected") {
  // Doubling every reward doubles the pure importance-weighted estimate.
  const auto w = builtin_world("small");
  const TabularPolicy target = target_policy_of(w);
  auto recs = fixture_records();
  const double base = evaluate(WeightScheme::ips(), recs, target);
  for (LoggedInteraction& r : recs) r.reward *= 2.0;
  CHECK(near(evaluate(WeightScheme::ips(), recs, target), 2.0 * base));
}

}  // namespace
