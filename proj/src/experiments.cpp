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

#include "iceval/experiments.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "iceval/estimators.hpp"
#include "iceval/io.hpp"

namespace iceval {
namespace {

// Replications per chunk. Partial sums are merged in chunk order, so the
// chunk size is part of the numeric contract; the worker count is not.
constexpr std::size_t kChunkSize = 256;

void parallel_for_ordered(std::size_t count, int workers,
                          const std::function<void(std::size_t)>& body) {
  const auto num_threads = static_cast<std::size_t>(std::max(1, workers));
  if (num_threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(std::min(num_threads, count));
  for (std::size_t t = 0; t < std::min(num_threads, count); ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Power sums of (estimate - true value) for one estimator.
struct MomentSums {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;

  void add(double d) {
    const double d2 = d * d;
    s1 += d;
    s2 += d2;
    s3 += d2 * d;
    s4 += d2 * d2;
  }

  void merge(const MomentSums& o) {
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
  }
};

struct McSummary {
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  double se_bias = 0.0;
  double se_var = 0.0;
};

McSummary summarize(const MomentSums& m, std::size_t r) {
  const auto rd = static_cast<double>(r);
  const double a1 = m.s1 / rd;
  const double a2 = m.s2 / rd;
  const double a3 = m.s3 / rd;
  const double a4 = m.s4 / rd;
  const double m2 = a2 - a1 * a1;
  const double m4 =
      a4 - 4.0 * a1 * a3 + 6.0 * a1 * a1 * a2 - 3.0 * a1 * a1 * a1 * a1;
  McSummary out;
  out.bias = a1;
  out.variance = r > 1 ? (m.s2 - rd * a1 * a1) / (rd - 1.0) : 0.0;
  out.mse = a2;
  out.se_bias = r > 1 ? std::sqrt(std::max(0.0, m2) / rd) : 0.0;
  out.se_var =
      r > 1 ? std::sqrt(std::max(0.0, m4 - m2 * m2) / rd) : 0.0;
  return out;
}

/// One Monte Carlo pass at a fixed sample size: returns the per-estimator
/// deviation moments. Replication `rep` of size index `size_index` always
/// draws from the stream derived from (seed; size_index; rep), so results
/// are invariant to scheduling.
std::vector<MomentSums> mc_pass(const EnumerableWorld& world,
                                const std::vector<WeightScheme>& estimators,
                                std::size_t n, std::size_t size_index,
                                std::size_t replications, std::uint64_t seed,
                                int workers) {
  const TabularPolicy target = target_policy_of(world);
  const TabularRewardModel model = reward_model_of(world);
  const double truth = true_value(world);
  const RngStream root(seed);

  const std::size_t num_chunks = (replications + kChunkSize - 1) / kChunkSize;
  std::vector<std::vector<MomentSums>> partials(
      num_chunks, std::vector<MomentSums>(estimators.size()));

  parallel_for_ordered(num_chunks, workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t end = std::min(begin + kChunkSize, replications);
    std::vector<MomentSums>& sums = partials[chunk];
    for (std::size_t rep = begin; rep < end; ++rep) {
      RngStream rng = root.derive(size_index, rep);
      const BanditLog log = sample_world_log(world, n, rng);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        const double est =
            evaluate(estimators[e], log.records, target, model);
        sums[e].add(est - truth);
      }
    }
  });

  std::vector<MomentSums> merged(estimators.size());
  for (const std::vector<MomentSums>& chunk : partials) {
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      merged[e].merge(chunk[e]);
    }
  }
  return merged;
}

void validate_sweep_config(const SweepConfig& config) {
  if (config.estimators.empty()) throw EmptyData("sweep: no estimators");
  if (config.sample_sizes.empty()) throw EmptyData("sweep: no sample sizes");
  if (config.replications < 1) {
    throw std::invalid_argument("sweep: replications must be >= 1");
  }
  for (const std::size_t n : config.sample_sizes) {
    if (n < 1) throw std::invalid_argument("sweep: sample sizes must be >= 1");
  }
}

std::string param_cell(double param) {
  return std::isnan(param) ? std::string() : format_number(param);
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  validate_sweep_config(config);
  std::vector<SweepRow> rows;
  for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
    const std::size_t n = config.sample_sizes[si];
    const std::vector<MomentSums> sums =
        mc_pass(config.world, config.estimators, n, si, config.replications,
                config.seed, config.workers);
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      const McSummary s = summarize(sums[e], config.replications);
      SweepRow row;
      row.estimator = config.estimators[e].label();
      row.param = config.estimators[e].param().value_or(
          std::numeric_limits<double>::quiet_NaN());
      row.n = n;
      row.bias = s.bias;
      row.variance = s.variance;
      row.mse = s.mse;
      row.se_bias = s.se_bias;
      row.se_var = s.se_var;
      row.replications = config.replications;
      row.seed = config.seed;
      row.prng = RngStream::kAlgorithmId;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

OracleCheckReport run_oracle_check(const SweepConfig& config) {
  validate_sweep_config(config);
  OracleCheckReport report;
  for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
    const std::size_t n = config.sample_sizes[si];
    const std::vector<MomentSums> sums =
        mc_pass(config.world, config.estimators, n, si, config.replications,
                config.seed, config.workers);
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      const WeightScheme& scheme = config.estimators[e];
      const McSummary s = summarize(sums[e], config.replications);
      OracleCheckRow row;
      row.estimator = scheme.label();
      row.param =
          scheme.param().value_or(std::numeric_limits<double>::quiet_NaN());
      row.n = n;
      row.mc_bias = s.bias;
      row.exact_bias = exact_bias(config.world, scheme);
      row.se_bias = s.se_bias;
      row.z_bias = s.se_bias > 0.0
                       ? (s.bias - row.exact_bias) / s.se_bias
                       : (s.bias == row.exact_bias
                              ? 0.0
                              : std::numeric_limits<double>::infinity());
      row.mc_variance = s.variance;
      row.exact_variance = exact_variance(config.world, scheme, n);
      row.var_rel_err =
          row.exact_variance != 0.0
              ? std::abs(row.mc_variance - row.exact_variance) /
                    std::abs(row.exact_variance)
              : std::abs(row.mc_variance);
      row.replications = config.replications;
      row.seed = config.seed;
      row.prng = RngStream::kAlgorithmId;
      report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z_bias));
      report.rows.push_back(std::move(row));
    }
  }
  report.pass = report.max_abs_z <= 5.0;
  return report;
}

std::vector<LearnCurveRow> run_learn_curve(const LearnCurveConfig& config) {
  if (config.families.empty()) throw EmptyData("learn curve: no families");
  if (config.sample_sizes.empty()) throw EmptyData("learn curve: no sizes");
  if (config.num_seeds < 1) {
    throw std::invalid_argument("learn curve: num_seeds must be >= 1");
  }
  for (const LearnFamily& family : config.families) {
    if (family.candidates.empty()) {
      throw EmptyData("learn curve: family '" + family.label +
                      "' has no candidates");
    }
  }

  // errors[seed][family][size]
  std::vector<std::vector<std::vector<double>>> errors(
      config.num_seeds,
      std::vector<std::vector<double>>(
          config.families.size(),
          std::vector<double>(config.sample_sizes.size(), 0.0)));

  const RngStream root(config.seed);
  parallel_for_ordered(config.num_seeds, config.workers, [&](std::size_t s) {
    RngStream seed_stream = root.derive(s);
    SyntheticSpec spec = config.dataset;
    spec.seed = seed_stream.derive(1).key();
    const SupervisedDataset dataset = make_synthetic_multiclass(spec);
    const BanditActors actors = train_logger_and_models(
        dataset, config.logger_fraction, config.model_fraction,
        seed_stream.derive(2).key());
    const BanditLog train_log = supervised_to_bandit(
        dataset, Split::kTrain, actors.logger, seed_stream.derive(3).key());
    const BanditLog validation_log =
        supervised_to_bandit(dataset, Split::kValidation, actors.logger,
                             seed_stream.derive(4).key());

    for (std::size_t f = 0; f < config.families.size(); ++f) {
      const LearnFamily& family = config.families[f];
      for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
        const std::size_t n =
            std::min(config.sample_sizes[si], train_log.records.size());
        BanditLog truncated;
        truncated.records.assign(train_log.records.begin(),
                                 train_log.records.begin() +
                                     static_cast<std::ptrdiff_t>(n));
        truncated.num_actions = train_log.num_actions;
        truncated.feature_dim = train_log.feature_dim;

        std::vector<LearnCandidate> candidates;
        candidates.reserve(family.candidates.size());
        for (const LearnConfig& base : family.candidates) {
          LearnConfig cfg = base;
          cfg.seed = seed_stream.derive(5, f, si).key() ^ cfg.seed;
          LearnResult result = erm_learn(
              truncated, cfg,
              cfg.scheme.uses_reward_model() ? &actors.model : nullptr);
          candidates.push_back(
              LearnCandidate{std::move(cfg), std::move(result.policy)});
        }
        const std::size_t winner = select_hyperparams(
            candidates, validation_log.records, config.selector);
        errors[s][f][si] = expected_error(candidates[winner].policy, dataset,
                                          Split::kTest);
      }
    }
  });

  std::vector<LearnCurveRow> rows;
  const auto seeds = static_cast<double>(config.num_seeds);
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    for (std::size_t si = 0; si < config.sample_sizes.size(); ++si) {
      LearnCurveRow row;
      row.estimator = config.families[f].label;
      row.n = config.sample_sizes[si];
      row.per_seed_errors.resize(config.num_seeds);
      double sum = 0.0;
      for (std::size_t s = 0; s < config.num_seeds; ++s) {
        row.per_seed_errors[s] = errors[s][f][si];
        sum += errors[s][f][si];
      }
      row.mean_test_error = sum / seeds;
      double ss = 0.0;
      for (const double v : row.per_seed_errors) {
        ss += (v - row.mean_test_error) * (v - row.mean_test_error);
      }
      row.se_test_error =
          config.num_seeds > 1
              ? std::sqrt(ss / (seeds - 1.0) / seeds)
              : 0.0;
      row.seeds = config.num_seeds;
      row.seed = config.seed;
      row.prng = RngStream::kAlgorithmId;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string sweep_csv_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "estimator,param,n,bias,var,mse,se_bias,se_var,R,seed,prng\n";
  for (const SweepRow& r : rows) {
    out << r.estimator << ',' << param_cell(r.param) << ',' << r.n << ','
        << format_number(r.bias) << ',' << format_number(r.variance) << ','
        << format_number(r.mse) << ',' << format_number(r.se_bias) << ','
        << format_number(r.se_var) << ',' << r.replications << ',' << r.seed
        << ',' << r.prng << '\n';
  }
  return out.str();
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << sweep_csv_text(rows);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_oracle_check_csv(const std::string& path,
                            const std::vector<OracleCheckRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "estimator,param,n,mc_bias,exact_bias,z_bias,se_bias,mc_var,"
         "exact_var,var_rel_err,R,seed,prng\n";
  for (const OracleCheckRow& r : rows) {
    out << r.estimator << ',' << param_cell(r.param) << ',' << r.n << ','
        << format_number(r.mc_bias) << ',' << format_number(r.exact_bias)
        << ',' << format_number(r.z_bias) << ',' << format_number(r.se_bias)
        << ',' << format_number(r.mc_variance) << ','
        << format_number(r.exact_variance) << ','
        << format_number(r.var_rel_err) << ',' << r.replications << ','
        << r.seed << ',' << r.prng << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_learn_curve_csv(const std::string& path,
                           const std::vector<LearnCurveRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "estimator,n,mean_test_error,se_test_error,seeds,seed,prng\n";
  for (const LearnCurveRow& r : rows) {
    out << r.estimator << ',' << r.n << ',' << format_number(r.mean_test_error)
        << ',' << format_number(r.se_test_error) << ',' << r.seeds << ','
        << r.seed << ',' << r.prng << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace iceval
