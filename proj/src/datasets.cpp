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

#include "iceval/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "iceval/learn.hpp"

namespace iceval {
namespace {

// Stream tags keep the derived substreams of one seed from colliding.
constexpr std::uint64_t kCentersTag = 1;
constexpr std::uint64_t kNoiseTag = 2;
constexpr std::uint64_t kShuffleTag = 3;
constexpr std::uint64_t kLoggerTag = 11;
constexpr std::uint64_t kModelTag = 12;

std::vector<std::size_t> seeded_subset(const std::vector<std::size_t>& pool,
                                       double fraction, std::uint64_t seed,
                                       std::uint64_t tag, std::size_t min_size,
                                       const char* what) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument(std::string(what) + " fraction must lie in (0, 1]");
  }
  const auto take = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(pool.size())));
  if (take < min_size) {
    throw std::invalid_argument(std::string(what) + " fraction leaves " +
                                std::to_string(take) + " examples, fewer than the " +
                                std::to_string(min_size) + " classes");
  }
  std::vector<std::size_t> shuffled = pool;
  RngStream stream = RngStream(seed).derive(tag);
  stream.shuffle(shuffled);
  shuffled.resize(take);
  return shuffled;
}

}  // namespace

SupervisedDataset make_synthetic_multiclass(const SyntheticSpec& spec) {
  if (spec.num_classes < 2) throw std::invalid_argument("need at least 2 classes");
  if (spec.feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  if (spec.num_examples == 0) throw EmptyData("num_examples must be positive");
  if (spec.train_fraction < 0.0 || spec.validation_fraction < 0.0 ||
      spec.train_fraction + spec.validation_fraction > 1.0) {
    throw std::invalid_argument("split fractions must be nonnegative and sum to <= 1");
  }

  const RngStream root(spec.seed);
  RngStream centers_rng = root.derive(kCentersTag);
  Mat centers(spec.num_classes, spec.feature_dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    for (std::size_t j = 0; j < spec.feature_dim; ++j) {
      centers(c, j) = spec.separation * centers_rng.normal();
    }
  }

  SupervisedDataset out;
  out.num_classes = spec.num_classes;
  out.feature_dim = spec.feature_dim;
  out.examples.resize(spec.num_examples);
  RngStream noise_rng = root.derive(kNoiseTag);
  for (std::size_t i = 0; i < spec.num_examples; ++i) {
    SupervisedExample& ex = out.examples[i];
    ex.label = i % spec.num_classes;
    ex.features.resize(spec.feature_dim);
    for (std::size_t j = 0; j < spec.feature_dim; ++j) {
      ex.features[j] = centers(ex.label, j) + noise_rng.normal();
    }
  }

  RngStream shuffle_rng = root.derive(kShuffleTag);
  shuffle_rng.shuffle(out.examples);

  const auto n = spec.num_examples;
  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(n)));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(
                       spec.validation_fraction * static_cast<double>(n))));
  for (std::size_t i = 0; i < n; ++i) {
    out.examples[i].split = i < n_train            ? Split::kTrain
                            : i < n_train + n_val  ? Split::kValidation
                                                   : Split::kTest;
  }
  return out;
}

BanditLog supervised_to_bandit(const SupervisedDataset& dataset, Split split,
                               const SoftmaxLinearPolicy& logger,
                               std::uint64_t seed) {
  if (logger.num_actions() != dataset.num_classes ||
      logger.feature_dim() != dataset.feature_dim) {
    throw std::invalid_argument("logger shape does not match the dataset");
  }
  BanditLog log;
  log.num_actions = dataset.num_classes;
  log.feature_dim = dataset.feature_dim;
  log.seed = seed;
  log.logging_policy_id = std::string("softmax-linear floor=") +
                          std::to_string(logger.uniform_floor());
  log.source_split = split_name(split);
  log.prng_algorithm = RngStream::kAlgorithmId;

  RngStream rng(seed);
  for (const SupervisedExample& ex : dataset.examples) {
    if (ex.split != split) continue;
    Vec row = logger.probs(ex.features);
    LoggedInteraction rec;
    rec.features = ex.features;
    rec.action = rng.categorical(row);
    rec.reward = rec.action == ex.label ? 0.0 : -1.0;
    rec.propensity = row[rec.action];
    rec.logging_row = std::move(row);
    log.records.push_back(std::move(rec));
  }
  if (log.records.empty()) {
    throw EmptyData(std::string("supervised_to_bandit: split '") +
                    split_name(split) + "' is empty");
  }
  return log;
}

BanditActors train_logger_and_models(const SupervisedDataset& dataset,
                                     double logger_fraction,
                                     double model_fraction, std::uint64_t seed,
                                     double logger_floor) {
  const std::vector<std::size_t> train = dataset.split_indices(Split::kTrain);
  if (train.empty()) throw EmptyData("training split is empty");

  const std::vector<std::size_t> logger_idx =
      seeded_subset(train, logger_fraction, seed, kLoggerTag,
                    dataset.num_classes, "logger");
  const std::vector<std::size_t> model_idx = seeded_subset(
      train, model_fraction, seed, kModelTag, dataset.num_classes, "model");

  const double floor = logger_floor < 0.0
                           ? 1e-3 / static_cast<double>(dataset.num_classes)
                           : logger_floor;
  SoftmaxLinearPolicy logger =
      fit_multinomial_logistic(dataset, logger_idx).with_floor(floor);
  ClassifierRewardModel model(fit_multinomial_logistic(dataset, model_idx));
  SoftmaxLinearPolicy target = fit_multinomial_logistic(dataset, train);
  return BanditActors{std::move(logger), std::move(model), std::move(target)};
}

BanditLog sample_world_log(const EnumerableWorld& world, std::size_t n,
                           RngStream& rng) {
  if (n == 0) throw EmptyData("sample_world_log: n must be positive");
  BanditLog log;
  log.num_actions = world.num_actions();
  log.feature_dim = 0;
  log.logging_policy_id = "world-pi0";
  log.prng_algorithm = RngStream::kAlgorithmId;
  log.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = rng.categorical(world.context_prob);
    const std::size_t y = rng.categorical(world.pi0.row(x));
    const double noise = rng.normal();
    LoggedInteraction& rec = log.records[i];
    rec.context_id = static_cast<std::int64_t>(x);
    rec.action = y;
    rec.reward = world.delta(x, y) + std::sqrt(world.sigma2(x, y)) * noise;
    rec.propensity = world.pi0_hat(x, y);
    const auto row = world.pi0_hat.row(x);
    rec.logging_row.assign(row.begin(), row.end());
  }
  return log;
}

SupervisedDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyData("dataset file has no header: " + path);

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  bool with_split = !header.empty() && header.back() == "split";
  const std::size_t label_col = header.size() - (with_split ? 2 : 1);
  if (label_col >= header.size() || header[label_col] != "label") {
    throw std::runtime_error("dataset header must end with label[,split]: " + path);
  }
  const std::size_t d = label_col;

  SupervisedDataset out;
  out.feature_dim = d;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    SupervisedExample ex;
    ex.features.reserve(d);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": truncated row");
      }
      if (c < d) {
        ex.features.push_back(std::stod(cell));
      } else if (c == label_col) {
        ex.label = static_cast<std::size_t>(std::stoul(cell));
      } else {
        if (cell == "train") ex.split = Split::kTrain;
        else if (cell == "validation") ex.split = Split::kValidation;
        else if (cell == "test") ex.split = Split::kTest;
        else throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                      ": unknown split '" + cell + "'");
      }
    }
    out.num_classes = std::max(out.num_classes, ex.label + 1);
    out.examples.push_back(std::move(ex));
  }
  if (out.examples.empty()) throw EmptyData("dataset file has no rows: " + path);
  return out;
}

void write_dataset_csv(const std::string& path, const SupervisedDataset& dataset,
                       bool with_split) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (std::size_t j = 0; j < dataset.feature_dim; ++j) out << "f" << j << ",";
  out << "label";
  if (with_split) out << ",split";
  out << "\n";
  char buf[32];
  for (const SupervisedExample& ex : dataset.examples) {
    for (const double v : ex.features) {
      std::snprintf(buf, sizeof(buf), "%.12g", v);
      out << buf << ",";
    }
    out << ex.label;
    if (with_split) out << "," << split_name(ex.split);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace iceval
