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

#include <string>
#include <vector>

#include "iceval/datasets.hpp"
#include "iceval/learn.hpp"
#include "iceval/world.hpp"

namespace iceval {

/// Monte Carlo bias/variance/MSE sweep over (estimator, sample size) on an
/// enumerable world. All estimators in one replication share the same
/// simulated log (common random numbers), so cross-estimator comparisons are
/// paired. Replications are processed in fixed-size chunks whose partial
/// sums are merged in chunk order, which makes every reported number
/// independent of the worker count.
struct SweepConfig {
  EnumerableWorld world;
  std::vector<WeightScheme> estimators;
  std::vector<std::size_t> sample_sizes;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct SweepRow {
  std::string estimator;
  double param = std::numeric_limits<double>::quiet_NaN();  // NaN: none
  std::size_t n = 0;
  double bias = 0.0;      // Monte Carlo mean minus true value
  double variance = 0.0;  // sample variance of the estimates
  double mse = 0.0;       // mean squared deviation from the true value
  double se_bias = 0.0;
  double se_var = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::string prng;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

/// Same Monte Carlo pass, but each row also carries the closed-form bias and
/// variance plus agreement diagnostics: z = (mc_bias - exact_bias)/se_bias
/// and the relative error of the sample variance.
struct OracleCheckRow {
  std::string estimator;
  double param = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  double mc_bias = 0.0;
  double exact_bias = 0.0;
  double z_bias = 0.0;
  double se_bias = 0.0;
  double mc_variance = 0.0;
  double exact_variance = 0.0;
  double var_rel_err = 0.0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::string prng;
};

struct OracleCheckReport {
  std::vector<OracleCheckRow> rows;
  double max_abs_z = 0.0;
  bool pass = false;  // every |z| <= 5
};

OracleCheckReport run_oracle_check(const SweepConfig& config);

/// Learning-curve experiment: for every seed, generate a fresh supervised
/// problem, train the logger/model/target actors, convert the training split
/// to a bandit log, and for every (estimator family, log size) train all of
/// the family's candidates, select one on the validation log, and score its
/// exact test error. Rows aggregate over seeds and keep the per-seed errors
/// so downstream comparisons can be paired.
struct LearnFamily {
  std::string label;
  std::vector<LearnConfig> candidates;
};

struct LearnCurveConfig {
  SyntheticSpec dataset;
  double logger_fraction = 0.05;
  double model_fraction = 0.1;
  std::vector<LearnFamily> families;
  std::vector<std::size_t> sample_sizes;  // bandit-log truncation sizes
  std::size_t num_seeds = 10;
  std::uint64_t seed = 0;
  ValidationSelector selector = ValidationSelector::kClippedIps90;
  int workers = 1;
};

struct LearnCurveRow {
  std::string estimator;
  std::size_t n = 0;
  double mean_test_error = 0.0;
  double se_test_error = 0.0;
  std::vector<double> per_seed_errors;  // indexed by seed slot
  std::size_t seeds = 0;
  std::uint64_t seed = 0;
  std::string prng;
};

std::vector<LearnCurveRow> run_learn_curve(const LearnCurveConfig& config);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);
void write_oracle_check_csv(const std::string& path,
                            const std::vector<OracleCheckRow>& rows);
void write_learn_curve_csv(const std::string& path,
                           const std::vector<LearnCurveRow>& rows);

/// Renders a sweep report to CSV text (the exact bytes write_sweep_csv
/// writes), exposed for determinism tests.
std::string sweep_csv_text(const std::vector<SweepRow>& rows);

}  // namespace iceval
