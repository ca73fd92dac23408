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

#include "iceval/ltr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "iceval/optim.hpp"

namespace iceval {
namespace {

constexpr std::uint64_t kDirectionTag = 1;
constexpr std::uint64_t kQueryTag = 2;
constexpr std::uint64_t kSubsetTag = 1000003;
constexpr std::uint64_t kSliceTag = 7;

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("ranker dimension does not match document features");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

bool model_required(const WeightScheme& scheme) {
  return scheme.kind != SchemeKind::kIps && scheme.kind != SchemeKind::kClippedIps;
}

void check_ltr_scheme(const WeightScheme& scheme, const RelevancePredictor* model) {
  // Probing at p = 1 rejects DR/CABDR before any data is touched.
  ltr_weights(scheme, 1.0);
  if (model_required(scheme) && model == nullptr) {
    throw std::invalid_argument(scheme.label() + " requires a relevance model");
  }
}

void check_log_shape(const ClickLog& log,
                     const std::vector<QueryInstance>& queries) {
  if (log.records.empty()) throw EmptyData("click log is empty");
  for (const ClickRecord& rec : log.records) {
    if (rec.query_index >= queries.size()) {
      throw std::out_of_range("click record references a query outside the corpus");
    }
    const std::size_t m = queries[rec.query_index].num_docs();
    for (const ClickEntry& e : rec.entries) {
      if (e.doc >= m) {
        throw std::out_of_range("click entry references a document outside its query");
      }
      if (!(e.propensity > 0.0) || e.propensity > 1.0) {
        throw std::invalid_argument("click entry propensity outside (0, 1]");
      }
    }
  }
}

// Lazily computed per-query document scores under one weight vector. Both
// sides of the hinge-dominance inequality read the same cached values, which
// the exactness argument requires.
class ScoreCache {
 public:
  ScoreCache(std::span<const double> w, const std::vector<QueryInstance>& queries)
      : w_(w), queries_(queries), scores_(queries.size()) {}

  const Vec& at(std::size_t qi) {
    Vec& s = scores_[qi];
    if (s.empty() && queries_[qi].num_docs() > 0) {
      const QueryInstance& q = queries_[qi];
      s.resize(q.num_docs());
      for (std::size_t j = 0; j < q.num_docs(); ++j) {
        s[j] = dot(w_, q.doc_features[j]);
      }
    }
    return s;
  }

 private:
  std::span<const double> w_;
  const std::vector<QueryInstance>& queries_;
  std::vector<Vec> scores_;
};

// Hinge data term and, when grad is non-null, its subgradient (both unscaled
// by C/n). Accumulation order matches svmrank_rank_term pair for pair.
double hinge_pass(std::span<const double> w, const Vec& coefficients,
                  const ClickLog& log, const std::vector<QueryInstance>& queries,
                  Vec* grad) {
  ScoreCache cache(w, queries);
  double acc = 0.0;
  std::size_t flat = 0;
  for (const ClickRecord& rec : log.records) {
    const QueryInstance& q = queries[rec.query_index];
    const Vec& s = cache.at(rec.query_index);
    for (const ClickEntry& e : rec.entries) {
      const double coef = coefficients[flat++];
      if (coef == 0.0) continue;
      const double sj = s[e.doc];
      double hinge_sum = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k == e.doc) continue;
        const double margin = 1.0 - (sj - s[k]);
        if (margin > 0.0) {
          hinge_sum += margin;
          if (grad != nullptr) {
            const Vec& fj = q.doc_features[e.doc];
            const Vec& fk = q.doc_features[k];
            for (std::size_t t = 0; t < grad->size(); ++t) {
              (*grad)[t] += coef * (fk[t] - fj[t]);
            }
          }
        }
      }
      acc += coef * hinge_sum;
    }
  }
  return acc;
}

}  // namespace

double LinearRanker::score(std::span<const double> features) const {
  return dot(weights, features);
}

std::vector<std::size_t> ranks_from_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<std::size_t> ranks(scores.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
  return ranks;
}

std::vector<std::size_t> LinearRanker::ranks(const QueryInstance& query) const {
  Vec scores(query.num_docs());
  for (std::size_t j = 0; j < query.num_docs(); ++j) {
    scores[j] = score(query.doc_features[j]);
  }
  return ranks_from_scores(scores);
}

double LogisticRelevanceModel::predict(std::span<const double> features) const {
  return sigmoid(dot(weights_, features) + bias_);
}

std::vector<QueryInstance> make_synthetic_queries(std::size_t num_queries,
                                                  std::size_t docs_per_query,
                                                  std::size_t feature_dim,
                                                  std::uint64_t seed) {
  if (num_queries == 0 || docs_per_query == 0 || feature_dim == 0) {
    throw std::invalid_argument("query corpus dimensions must be positive");
  }
  const RngStream root(seed);
  RngStream dir_rng = root.derive(kDirectionTag);
  Vec direction(feature_dim);
  for (double& v : direction) v = dir_rng.normal();
  const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));

  std::vector<QueryInstance> out(num_queries);
  for (std::size_t qi = 0; qi < num_queries; ++qi) {
    QueryInstance& q = out[qi];
    q.qid = static_cast<std::int64_t>(qi);
    q.doc_features.resize(docs_per_query, Vec(feature_dim));
    q.relevance.resize(docs_per_query, 0);
    RngStream rng = root.derive(kQueryTag, qi);
    double best_prob = -1.0;
    std::size_t best_doc = 0;
    bool any_relevant = false;
    for (std::size_t j = 0; j < docs_per_query; ++j) {
      for (double& v : q.doc_features[j]) v = rng.normal();
      const double prob =
          sigmoid(1.5 * scale * dot(direction, q.doc_features[j]) - 0.5);
      if (prob > best_prob) {
        best_prob = prob;
        best_doc = j;
      }
      q.relevance[j] = rng.uniform() < prob ? 1 : 0;
      any_relevant = any_relevant || q.relevance[j] == 1;
    }
    if (!any_relevant) q.relevance[best_doc] = 1;
  }
  return out;
}

ClickLog simulate_clicks(const std::vector<QueryInstance>& queries,
                         const LinearRanker& logging_ranker, double sweeps,
                         std::uint64_t seed) {
  if (queries.empty()) throw EmptyData("simulate_clicks: empty query corpus");
  if (!(sweeps > 0.0)) throw std::invalid_argument("sweeps must be positive");

  std::vector<std::vector<std::size_t>> logger_ranks(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    logger_ranks[qi] = logging_ranker.ranks(queries[qi]);
  }

  const RngStream root(seed);
  ClickLog log;
  log.seed = seed;
  log.sweeps = sweeps;
  log.prng_algorithm = RngStream::kAlgorithmId;

  const auto full = static_cast<std::uint64_t>(std::floor(sweeps));
  const double frac = sweeps - static_cast<double>(full);

  const auto present = [&](std::uint64_t sweep, std::size_t qi) {
    RngStream rng = root.derive(sweep, qi);
    const QueryInstance& q = queries[qi];
    ClickRecord rec;
    rec.query_index = qi;
    rec.entries.resize(q.num_docs());
    for (std::size_t j = 0; j < q.num_docs(); ++j) {
      ClickEntry& e = rec.entries[j];
      e.doc = j;
      e.rank = logger_ranks[qi][j];
      e.propensity = 1.0 / static_cast<double>(e.rank);
      const bool observed = rng.uniform() < e.propensity;
      e.click = observed && q.relevance[j] == 1 ? 1 : 0;
    }
    log.records.push_back(std::move(rec));
  };

  for (std::uint64_t s = 0; s < full; ++s) {
    for (std::size_t qi = 0; qi < queries.size(); ++qi) present(s, qi);
  }
  const auto extra = static_cast<std::size_t>(
      std::llround(frac * static_cast<double>(queries.size())));
  if (extra > 0) {
    std::vector<std::size_t> order(queries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream subset_rng = root.derive(kSubsetTag);
    subset_rng.shuffle(order);
    for (std::size_t t = 0; t < extra; ++t) present(full, order[t]);
  }
  if (log.records.empty()) {
    throw EmptyData("simulate_clicks: sweeps rounded down to zero presentations");
  }
  return log;
}

double true_average_rank(const std::vector<QueryInstance>& queries,
                         const LinearRanker& ranker) {
  if (queries.empty()) throw EmptyData("true_average_rank: empty query corpus");
  double acc = 0.0;
  for (const QueryInstance& q : queries) {
    const std::vector<std::size_t> r = ranker.ranks(q);
    for (std::size_t j = 0; j < q.num_docs(); ++j) {
      if (q.relevance[j] == 1) acc += static_cast<double>(r[j]);
    }
  }
  return acc / static_cast<double>(queries.size());
}

LtrWeights ltr_weights(const WeightScheme& scheme, double propensity) {
  if (!(propensity > 0.0) || propensity > 1.0) {
    throw std::invalid_argument("examination propensity must lie in (0, 1]");
  }
  switch (scheme.kind) {
    case SchemeKind::kDirect:
      return {1.0, 0.0};
    case SchemeKind::kIps:
      return {0.0, 1.0};
    case SchemeKind::kClippedIps:
      return {0.0, std::min(scheme.clip * propensity, 1.0)};
    case SchemeKind::kStaticBlend:
      return {1.0 - scheme.blend, scheme.blend};
    case SchemeKind::kSwitch:
      return 1.0 / propensity <= scheme.clip ? LtrWeights{0.0, 1.0}
                                             : LtrWeights{1.0, 0.0};
    case SchemeKind::kCab: {
      const double b = std::min(scheme.clip * propensity, 1.0);
      return {1.0 - b, b};
    }
    case SchemeKind::kDoublyRobust:
    case SchemeKind::kCabDr:
      throw NotIdentifiableInLTR(
          scheme.label() +
          ": the correction term needs per-document observation indicators, "
          "which click logs do not contain");
  }
  throw InvalidScheme("unknown weight scheme kind");
}

double ltr_evaluate(const WeightScheme& scheme, const ClickLog& log,
                    const std::vector<QueryInstance>& queries,
                    const LinearRanker& target, const RelevancePredictor* model) {
  check_ltr_scheme(scheme, model);
  check_log_shape(log, queries);

  std::vector<std::vector<std::size_t>> target_ranks(queries.size());
  std::vector<Vec> delta_hat(queries.size());
  const auto prepare = [&](std::size_t qi) {
    if (!target_ranks[qi].empty()) return;
    target_ranks[qi] = target.ranks(queries[qi]);
    if (model != nullptr) {
      const QueryInstance& q = queries[qi];
      delta_hat[qi].resize(q.num_docs());
      for (std::size_t j = 0; j < q.num_docs(); ++j) {
        const double v = model->predict(q.doc_features[j]);
        if (!(v >= 0.0) || v > 1.0) {
          throw std::invalid_argument(
              "relevance model produced a value outside [0, 1]");
        }
        delta_hat[qi][j] = v;
      }
    }
  };

  double acc = 0.0;
  for (const ClickRecord& rec : log.records) {
    prepare(rec.query_index);
    const std::vector<std::size_t>& ranks = target_ranks[rec.query_index];
    for (const ClickEntry& e : rec.entries) {
      const LtrWeights w = ltr_weights(scheme, e.propensity);
      double value = 0.0;
      if (w.alpha != 0.0) value += w.alpha * delta_hat[rec.query_index][e.doc];
      if (w.beta != 0.0 && e.click != 0) {
        value += w.beta * static_cast<double>(e.click) / e.propensity;
      }
      acc += value * static_cast<double>(ranks[e.doc]);
    }
  }
  return acc / static_cast<double>(log.records.size());
}

LogisticRelevanceModel train_relevance_model(
    const std::vector<QueryInstance>& queries, double fraction,
    std::uint64_t seed, double l2) {
  if (queries.empty()) throw EmptyData("train_relevance_model: empty corpus");
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("labeled fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream slice_rng = RngStream(seed).derive(kSliceTag);
  slice_rng.shuffle(order);
  const auto take = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(fraction * static_cast<double>(queries.size()))));
  order.resize(std::min(take, order.size()));

  std::vector<std::span<const double>> xs;
  std::vector<double> ys;  // +1 relevant, -1 not
  for (const std::size_t qi : order) {
    const QueryInstance& q = queries[qi];
    for (std::size_t j = 0; j < q.num_docs(); ++j) {
      xs.push_back(q.doc_features[j]);
      ys.push_back(q.relevance[j] == 1 ? 1.0 : -1.0);
    }
  }
  const std::size_t d = xs.front().size();

  const ObjectiveFn objective = [&](std::span<const double> w,
                                    std::span<double> grad) -> double {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double z = dot(w.subspan(0, d), xs[i]) + w[d];
      const double m = -ys[i] * z;
      loss += m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
      const double coef = -ys[i] * sigmoid(m);
      for (std::size_t t = 0; t < d; ++t) grad[t] += coef * xs[i][t];
      grad[d] += coef;
    }
    const double inv_m = 1.0 / static_cast<double>(xs.size());
    loss *= inv_m;
    for (std::size_t t = 0; t < d; ++t) {
      grad[t] = grad[t] * inv_m + 2.0 * l2 * w[t];
      loss += l2 * w[t] * w[t];
    }
    grad[d] *= inv_m;
    return loss;
  };

  OptimOptions opts;
  opts.max_iterations = 300;
  opts.gradient_tolerance = 1e-7;
  OptimResult res = minimize_lbfgs(objective, Vec(d + 1, 0.0), opts);
  Vec weights(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(d));
  return LogisticRelevanceModel(std::move(weights), res.x[d]);
}

Vec svmrank_coefficients(const WeightScheme& scheme, const ClickLog& log,
                         const std::vector<QueryInstance>& queries,
                         const RelevancePredictor* model) {
  check_ltr_scheme(scheme, model);
  check_log_shape(log, queries);

  std::vector<Vec> delta_hat(queries.size());
  Vec out;
  for (const ClickRecord& rec : log.records) {
    const QueryInstance& q = queries[rec.query_index];
    if (model != nullptr && delta_hat[rec.query_index].empty() && q.num_docs() > 0) {
      Vec& dh = delta_hat[rec.query_index];
      dh.resize(q.num_docs());
      for (std::size_t j = 0; j < q.num_docs(); ++j) {
        dh[j] = model->predict(q.doc_features[j]);
      }
    }
    for (const ClickEntry& e : rec.entries) {
      const LtrWeights w = ltr_weights(scheme, e.propensity);
      double coef = 0.0;
      if (w.alpha != 0.0) coef += w.alpha * delta_hat[rec.query_index][e.doc];
      if (w.beta != 0.0 && e.click != 0) {
        coef += w.beta * static_cast<double>(e.click) / e.propensity;
      }
      if (coef < 0.0) {
        throw InvalidCoefficient(
            "hinge coefficient is negative; the relevance model must stay in "
            "[0, 1] and rewards must be clicks");
      }
      out.push_back(coef);
    }
  }
  return out;
}

double svmrank_hinge_term(std::span<const double> w, const Vec& coefficients,
                          const ClickLog& log,
                          const std::vector<QueryInstance>& queries) {
  return hinge_pass(w, coefficients, log, queries, nullptr);
}

double svmrank_rank_term(std::span<const double> w, const Vec& coefficients,
                         const ClickLog& log,
                         const std::vector<QueryInstance>& queries) {
  ScoreCache cache(w, queries);
  double acc = 0.0;
  std::size_t flat = 0;
  for (const ClickRecord& rec : log.records) {
    const Vec& s = cache.at(rec.query_index);
    for (const ClickEntry& e : rec.entries) {
      const double coef = coefficients[flat++];
      if (coef == 0.0) continue;
      const double sj = s[e.doc];
      std::size_t beaten_by = 0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        if (k == e.doc) continue;
        if (s[k] > sj || (s[k] == sj && k < e.doc)) ++beaten_by;
      }
      acc += coef * static_cast<double>(beaten_by);
    }
  }
  return acc;
}

double svmrank_objective(std::span<const double> w, const Vec& coefficients,
                         const ClickLog& log,
                         const std::vector<QueryInstance>& queries,
                         double regularization) {
  double value = 0.0;
  for (const double v : w) value += 0.5 * v * v;
  const double scale =
      regularization / static_cast<double>(log.records.size());
  return value + scale * svmrank_hinge_term(w, coefficients, log, queries);
}

LinearRanker svmrank_learn(const ClickLog& log,
                           const std::vector<QueryInstance>& queries,
                           const WeightScheme& scheme,
                           const RelevancePredictor* model,
                           const SvmRankConfig& config) {
  if (!(config.regularization > 0.0)) {
    throw std::invalid_argument("regularization C must be positive");
  }
  if (config.iterations < 1) throw std::invalid_argument("budget must be >= 1");
  if (!(config.eta0 > 0.0) || !(config.t0 > 0.0)) {
    throw std::invalid_argument("step schedule parameters must be positive");
  }
  const Vec coefficients = svmrank_coefficients(scheme, log, queries, model);
  const std::size_t d = queries[log.records.front().query_index]
                            .doc_features.front()
                            .size();
  const double scale =
      config.regularization / static_cast<double>(log.records.size());

  Vec w(d, 0.0);
  Vec best_w = w;
  double best_value = std::numeric_limits<double>::infinity();
  Vec grad_data(d);
  for (int t = 0; t <= config.iterations; ++t) {
    std::fill(grad_data.begin(), grad_data.end(), 0.0);
    const double data = hinge_pass(w, coefficients, log, queries, &grad_data);
    double value = scale * data;
    for (const double v : w) value += 0.5 * v * v;
    if (value < best_value) {
      best_value = value;
      best_w = w;
    }
    if (t == config.iterations) break;
    const double eta =
        config.eta0 / (1.0 + static_cast<double>(t) / config.t0);
    for (std::size_t i = 0; i < d; ++i) {
      w[i] -= eta * (w[i] + scale * grad_data[i]);
    }
  }
  return LinearRanker{std::move(best_w)};
}

}  // namespace iceval
