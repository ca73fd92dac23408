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

#include <cstdint>
#include <string>
#include <vector>

#include "iceval/common.hpp"
#include "iceval/rng.hpp"
#include "iceval/scheme.hpp"

namespace iceval {

/// One query with its candidate documents. Every document carries a joint
/// query-document feature vector and a binary relevance label.
struct QueryInstance {
  std::int64_t qid = 0;
  std::vector<Vec> doc_features;
  std::vector<int> relevance;  // 0 or 1, one per document

  std::size_t num_docs() const { return doc_features.size(); }
};

/// Per-document record of one presentation: the 1-based rank the logging
/// ranker gave the document, the examination propensity p = 1/rank, and
/// whether a click was observed.
struct ClickEntry {
  std::size_t doc = 0;
  std::size_t rank = 0;
  double propensity = 0.0;
  int click = 0;
};

/// One presentation of one query.
struct ClickRecord {
  std::size_t query_index = 0;
  std::vector<ClickEntry> entries;
};

struct ClickLog {
  std::vector<ClickRecord> records;
  std::uint64_t seed = 0;
  double sweeps = 0.0;
  std::string prng_algorithm;
};

/// Deterministic linear scoring ranker: score(d) = w . phi(x, d), documents
/// ordered by descending score with ties broken by ascending document index.
struct LinearRanker {
  Vec weights;

  double score(std::span<const double> features) const;

  /// 1-based rank of every document of `query` under this ranker.
  std::vector<std::size_t> ranks(const QueryInstance& query) const;
};

/// 1-based ranks from a score vector (descending score, ties by index).
std::vector<std::size_t> ranks_from_scores(std::span<const double> scores);

/// Calibrated relevance-probability predictor with output in [0, 1].
class RelevancePredictor {
 public:
  virtual ~RelevancePredictor() = default;
  virtual double predict(std::span<const double> features) const = 0;
};

/// Binary logistic model: predict = sigmoid(w . x + b).
class LogisticRelevanceModel final : public RelevancePredictor {
 public:
  LogisticRelevanceModel(Vec weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  double predict(std::span<const double> features) const override;

  const Vec& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Vec weights_;
  double bias_;
};

/// Synthetic query corpus: document features are unit Gaussians, relevance is
/// Bernoulli of a sigmoid in a hidden scoring direction, and every query is
/// guaranteed at least one relevant document.
std::vector<QueryInstance> make_synthetic_queries(std::size_t num_queries,
                                                  std::size_t docs_per_query,
                                                  std::size_t feature_dim,
                                                  std::uint64_t seed);

/// Position-biased click simulation. Every full sweep presents every query
/// once; a fractional remainder presents a seeded subset of round(frac * Q)
/// queries. Per presentation, document d at rank k is examined with
/// probability 1/k and clicked iff examined and relevant; the log records
/// p = 1/k for every document, clicked or not.
ClickLog simulate_clicks(const std::vector<QueryInstance>& queries,
                         const LinearRanker& logging_ranker, double sweeps,
                         std::uint64_t seed);

/// Exact value of the rank metric: mean over queries of the summed rank of
/// their relevant documents under `ranker`. Lower is better.
double true_average_rank(const std::vector<QueryInstance>& queries,
                         const LinearRanker& ranker);

/// Rank-metric weight pair (alpha, beta) for one document whose examination
/// propensity was p. The weights depend only on p, never on the ranker being
/// evaluated, which is what makes every scheme here usable as a learning
/// objective. DR and CAB-DR have no observable correction term in this
/// setting and are rejected with NotIdentifiableInLTR.
struct LtrWeights {
  double alpha = 0.0;
  double beta = 0.0;
};
LtrWeights ltr_weights(const WeightScheme& scheme, double propensity);

/// Counterfactual estimate of the rank metric of `target` from a click log:
/// (1/n) sum over presentations i, documents j of
/// [alpha_ij * delta_hat_ij + beta_ij * c_ij / p_ij] * rank(d_ij | target).
/// `model` may be null for IPS and cIPS, which never read it.
double ltr_evaluate(const WeightScheme& scheme, const ClickLog& log,
                    const std::vector<QueryInstance>& queries,
                    const LinearRanker& target, const RelevancePredictor* model);

/// Fits the relevance predictor on a seeded slice of the corpus (fraction of
/// queries, every document labeled), by regularized logistic regression.
LogisticRelevanceModel train_relevance_model(
    const std::vector<QueryInstance>& queries, double fraction,
    std::uint64_t seed, double l2 = 1e-3);

struct SvmRankConfig {
  double regularization = 1.0;  // C
  int iterations = 200;
  double eta0 = 0.1;
  double t0 = 100.0;
  std::uint64_t seed = 0;  // provenance only; the descent is deterministic
};

/// Per-document coefficients q_ij = alpha_ij * delta_hat_ij +
/// beta_ij * c_ij / p_ij of the hinge objective, flattened in log order.
/// Throws InvalidCoefficient if any is negative.
Vec svmrank_coefficients(const WeightScheme& scheme, const ClickLog& log,
                         const std::vector<QueryInstance>& queries,
                         const RelevancePredictor* model);

/// Data term of the hinge objective, unscaled:
/// sum_ij q_ij * sum_{k != j} max(1 - (s_ij - s_ik), 0) with s the per-doc
/// scores under w. Shares every intermediate with rank_lower_bound so the
/// dominance inequality holds exactly in floating point.
double svmrank_hinge_term(std::span<const double> w, const Vec& coefficients,
                          const ClickLog& log,
                          const std::vector<QueryInstance>& queries);

/// The bounded quantity: sum_ij q_ij * (rank(d_ij | w) - 1).
double svmrank_rank_term(std::span<const double> w, const Vec& coefficients,
                         const ClickLog& log,
                         const std::vector<QueryInstance>& queries);

/// Full objective: 0.5 ||w||^2 + (C/n) * hinge term, n = presentations.
double svmrank_objective(std::span<const double> w, const Vec& coefficients,
                         const ClickLog& log,
                         const std::vector<QueryInstance>& queries,
                         double regularization);

/// Generalized-propensity SVM-Rank by deterministic full-batch subgradient
/// descent with step eta_t = eta0 / (1 + t/t0), starting from w = 0 and
/// returning the iterate with the lowest objective seen.
LinearRanker svmrank_learn(const ClickLog& log,
                           const std::vector<QueryInstance>& queries,
                           const WeightScheme& scheme,
                           const RelevancePredictor* model,
                           const SvmRankConfig& config);

}  // namespace iceval
