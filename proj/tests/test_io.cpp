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

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "iceval/datasets.hpp"
#include "iceval/io.hpp"
#include "iceval/ltr.hpp"
#include "iceval/rng.hpp"
#include "iceval/world.hpp"

namespace {

using iceval::BanditLog;
using iceval::builtin_world;
using iceval::ClickLog;
using iceval::EnumerableWorld;
using iceval::format_number;
using iceval::LinearRanker;
using iceval::load_bandit_log;
using iceval::load_click_log;
using iceval::load_policy;
using iceval::load_queries;
using iceval::load_ranker;
using iceval::load_relevance_model;
using iceval::load_world;
using iceval::LoggedInteraction;
using iceval::LogisticRelevanceModel;
using iceval::make_synthetic_queries;
using iceval::parse_world_text;
using iceval::QueryInstance;
using iceval::RngStream;
using iceval::sample_world_log;
using iceval::save_bandit_log;
using iceval::save_click_log;
using iceval::save_policy;
using iceval::save_queries;
using iceval::save_ranker;
using iceval::save_relevance_model;
using iceval::save_world;
using iceval::simulate_clicks;
using iceval::SoftmaxLinearPolicy;
using iceval::Vec;

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name) : path(temp_path(name)) {}
  ~TempFile() {
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());
  }
};

void check_equal(const iceval::Mat& a, const iceval::Mat& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      CHECK(a(i, j) == b(i, j));
    }
  }
}

TEST_CASE("number formatting is stable and compact") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(-1.25) == "-1.25");
  CHECK(format_number(0.0) == "0");
  // 12 significant digits.
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("world round trip preserves every table bit for bit") {
  for (const char* name : {"small", "medium", "heavy-tail"}) {
    CAPTURE(name);
    const EnumerableWorld w = builtin_world(name);
    TempFile f("iceval_test_world.json");
    save_world(f.path, w);
    const EnumerableWorld back = load_world(f.path);

    REQUIRE(back.num_contexts() == w.num_contexts());
    REQUIRE(back.num_actions() == w.num_actions());
    CHECK(back.context_prob == w.context_prob);
    CHECK(back.action_labels == w.action_labels);
    check_equal(back.pi0, w.pi0);
    check_equal(back.pi0_hat, w.pi0_hat);
    check_equal(back.pi, w.pi);
    check_equal(back.delta, w.delta);
    check_equal(back.sigma2, w.sigma2);
    check_equal(back.delta_hat, w.delta_hat);
    CHECK(back.full_support == w.full_support);
  }
}

TEST_CASE("builtin references resolve without touching the filesystem") {
  const EnumerableWorld w = load_world("builtin:small");
  CHECK(w.num_contexts() == 2);
  CHECK(w.num_actions() == 2);
  CHECK_THROWS((void)load_world("builtin:unknown"));
}

TEST_CASE("inline world documents parse and validate") {
  const std::string good = R"({
    "contexts": [{"id": 0, "p": 0.5}, {"id": 1, "p": 0.5}],
    "actions": ["a", "b"],
    "pi0": [[0.5, 0.5], [0.5, 0.5]],
    "pi": [[0.9, 0.1], [0.1, 0.9]],
    "delta": [[1.0, 0.0], [0.0, 1.0]],
    "sigma2": [[0.1, 0.1], [0.1, 0.1]],
    "delta_hat": [[0.9, 0.1], [0.1, 0.9]]
  })";
  const EnumerableWorld w = parse_world_text(good);
  CHECK(w.num_contexts() == 2);
  // Without an explicit estimate the logging policy is known exactly.
  check_equal(w.pi0_hat, w.pi0);

  // Context ids must enumerate 0..C-1.
  std::string bad = good;
  const auto pos = bad.find("\"id\": 1");
  bad.replace(pos, 7, "\"id\": 2");
  CHECK_THROWS((void)parse_world_text(bad));
}

TEST_CASE("bandit log round trip, enumerable world") {
  const EnumerableWorld w = builtin_world("medium");
  RngStream rng(8);
  const BanditLog log = sample_world_log(w, 50, rng);

  TempFile f("iceval_test_world_log.jsonl");
  save_bandit_log(f.path, log);
  const BanditLog back = load_bandit_log(f.path);

  CHECK(back.num_actions == log.num_actions);
  CHECK(back.feature_dim == log.feature_dim);
  CHECK(back.seed == log.seed);
  CHECK(back.logging_policy_id == log.logging_policy_id);
  CHECK(back.source_split == log.source_split);
  CHECK(back.prng_algorithm == log.prng_algorithm);
  REQUIRE(back.records.size() == log.records.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const LoggedInteraction& a = back.records[i];
    const LoggedInteraction& b = log.records[i];
    CHECK(a.context_id == b.context_id);
    CHECK(a.features == b.features);
    CHECK(a.action == b.action);
    CHECK(a.reward == b.reward);
    CHECK(a.propensity == b.propensity);
    CHECK(a.logging_row == b.logging_row);
  }
}

TEST_CASE("bandit log round trip, feature records without rows") {
  BanditLog log;
  log.num_actions = 3;
  log.feature_dim = 2;
  log.seed = 11;
  log.logging_policy_id = "unit-test";
  log.source_split = "train";
  log.prng_algorithm = RngStream::kAlgorithmId;
  for (int i = 0; i < 4; ++i) {
    LoggedInteraction rec;
    rec.features = {0.25 * i, -1.5 * i};
    rec.action = static_cast<std::size_t>(i % 3);
    rec.reward = i % 2 == 0 ? 0.0 : -1.0;
    rec.propensity = 0.25 + 0.1 * i;
    log.records.push_back(rec);
  }

  TempFile f("iceval_test_feature_log.jsonl");
  save_bandit_log(f.path, log);
  const BanditLog back = load_bandit_log(f.path);

  REQUIRE(back.records.size() == 4);
  CHECK(back.num_actions == 3);
  CHECK(back.feature_dim == 2);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.records[i].context_id == -1);
    CHECK(back.records[i].features == log.records[i].features);
    CHECK(back.records[i].propensity == log.records[i].propensity);
    CHECK(back.records[i].logging_row.empty());
  }
}

TEST_CASE("policy round trip") {
  Vec params(6);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] = 0.1 * static_cast<double>(i) - 0.3;
  }
  const SoftmaxLinearPolicy policy(2, 3, params, 0.01);

  TempFile f("iceval_test_policy.json");
  save_policy(f.path, policy, R"({"note":"unit test"})");
  const SoftmaxLinearPolicy back = load_policy(f.path);

  CHECK(back.num_actions() == 2);
  CHECK(back.feature_dim() == 3);
  CHECK(back.uniform_floor() == 0.01);
  CHECK(back.params() == params);
}

TEST_CASE("query corpus and click log round trip") {
  const auto queries = make_synthetic_queries(6, 4, 3, 13);
  TempFile qf("iceval_test_queries.jsonl");
  save_queries(qf.path, queries);
  const auto back = load_queries(qf.path);

  REQUIRE(back.size() == queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    CHECK(back[i].qid == queries[i].qid);
    CHECK(back[i].doc_features == queries[i].doc_features);
    CHECK(back[i].relevance == queries[i].relevance);
  }

  const LinearRanker logger{{0.2, -0.1, 0.4}};
  const ClickLog log = simulate_clicks(queries, logger, 2.5, 3);
  TempFile cf("iceval_test_clicks.jsonl");
  save_click_log(cf.path, log);
  const ClickLog clog = load_click_log(cf.path);

  CHECK(clog.seed == log.seed);
  CHECK(clog.sweeps == log.sweeps);
  CHECK(clog.prng_algorithm == log.prng_algorithm);
  REQUIRE(clog.records.size() == log.records.size());
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    CHECK(clog.records[i].query_index == log.records[i].query_index);
    REQUIRE(clog.records[i].entries.size() == log.records[i].entries.size());
    for (std::size_t j = 0; j < log.records[i].entries.size(); ++j) {
      const auto& a = clog.records[i].entries[j];
      const auto& b = log.records[i].entries[j];
      CHECK(a.doc == b.doc);
      CHECK(a.rank == b.rank);
      CHECK(a.propensity == b.propensity);
      CHECK(a.click == b.click);
    }
  }
}

TEST_CASE("ranker and relevance model round trips") {
  const LinearRanker ranker{{0.5, -2.0, 0.125}};
  TempFile rf("iceval_test_ranker.json");
  save_ranker(rf.path, ranker);
  CHECK(load_ranker(rf.path).weights == ranker.weights);

  const LogisticRelevanceModel model({1.5, -0.25}, 0.75);
  TempFile mf("iceval_test_relevance.json");
  save_relevance_model(mf.path, model);
  const LogisticRelevanceModel back = load_relevance_model(mf.path);
  CHECK(back.weights() == model.weights());
  CHECK(back.bias() == model.bias());
}

TEST_CASE("documents of the wrong kind are rejected by schema") {
  const LinearRanker ranker{{1.0, 2.0}};
  TempFile rf("iceval_test_schema.json");
  save_ranker(rf.path, ranker);

  CHECK_THROWS_AS((void)load_policy(rf.path), std::runtime_error);
  CHECK_THROWS_AS((void)load_relevance_model(rf.path), std::runtime_error);
  CHECK_NOTHROW((void)load_ranker(rf.path));
}

TEST_CASE("missing files fail loudly") {
  const std::string nope = temp_path("iceval_test_does_not_exist.json");
  CHECK_THROWS_AS((void)load_world(nope), std::runtime_error);
  CHECK_THROWS_AS((void)load_policy(nope), std::runtime_error);
  CHECK_THROWS_AS((void)load_bandit_log(nope), std::runtime_error);
  CHECK_THROWS_AS((void)load_queries(nope), std::runtime_error);
}

}  // namespace
