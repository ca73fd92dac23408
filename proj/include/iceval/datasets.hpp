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

#include "iceval/data_types.hpp"
#include "iceval/policy.hpp"
#include "iceval/rng.hpp"
#include "iceval/world.hpp"

namespace iceval {

/// Parameters of the built-in Gaussian-cluster multiclass generator.
/// Class c gets a center drawn once from N(0, separation^2 I); examples are
/// the center plus unit Gaussian noise. Labels cycle 0..k-1 so classes stay
/// balanced, and the train/validation/test split is assigned by position
/// after a seeded shuffle.
struct SyntheticSpec {
  std::size_t num_examples = 1000;
  std::size_t feature_dim = 8;
  std::size_t num_classes = 4;
  double separation = 2.0;
  std::uint64_t seed = 0;
  double train_fraction = 0.48;
  double validation_fraction = 0.32;
};

SupervisedDataset make_synthetic_multiclass(const SyntheticSpec& spec);

/// Supervised-to-bandit conversion. For every example in `split`, the logging
/// policy samples one action, observes reward 0 if the action equals the
/// label and -1 otherwise, and logs the true sampling probability plus the
/// full probability row. Throws EmptyData when the split is empty.
BanditLog supervised_to_bandit(const SupervisedDataset& dataset, Split split,
                               const SoftmaxLinearPolicy& logger,
                               std::uint64_t seed);

/// The three policies a bandit-conversion experiment needs, each fit on its
/// own seeded subsample of the training split so their quality can be dialed
/// independently: a floored softmax logger (fraction `logger_fraction`), a
/// direct-method reward model (fraction `model_fraction`), and a target
/// policy fit on the full training split.
struct BanditActors {
  SoftmaxLinearPolicy logger;
  ClassifierRewardModel model;
  SoftmaxLinearPolicy target;
};

/// `logger_floor` mixes the logger with the uniform distribution so every
/// action keeps at least that probability; pass 0 to disable. A fraction that
/// yields fewer examples than classes throws std::invalid_argument.
BanditActors train_logger_and_models(const SupervisedDataset& dataset,
                                     double logger_fraction,
                                     double model_fraction, std::uint64_t seed,
                                     double logger_floor = -1.0);

/// Draws n interactions from an enumerable world: context from its context
/// distribution, action from the TRUE logging policy, reward from
/// N(delta, sigma^2), while the logged propensity and row come from the
/// ESTIMATED logging policy (they are what an estimator would see).
BanditLog sample_world_log(const EnumerableWorld& world, std::size_t n,
                           RngStream& rng);

/// CSV with header f0,...,f{d-1},label[,split]; split column optional on
/// load and written when `with_split`.
SupervisedDataset load_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const SupervisedDataset& dataset,
                       bool with_split = true);

}  // namespace iceval
