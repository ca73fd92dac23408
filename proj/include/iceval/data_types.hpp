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

namespace iceval {

/// One logged bandit interaction. The context is either an id into an
/// enumerable world (context_id >= 0, features empty) or a feature vector
/// (context_id == -1). `propensity` is the estimated logging probability of
/// the logged action; `logging_row` optionally carries the full estimated
/// logging distribution over actions, which threshold-style weight schemes
/// need for their model-side weights.
struct LoggedInteraction {
  std::int64_t context_id = -1;
  Vec features;
  std::size_t action = 0;
  double reward = 0.0;
  double propensity = 0.0;
  Vec logging_row;
};

/// A bandit log plus the provenance needed to interpret and reproduce it.
struct BanditLog {
  std::vector<LoggedInteraction> records;
  std::size_t num_actions = 0;
  std::size_t feature_dim = 0;  // 0 for enumerable-world logs
  std::uint64_t seed = 0;
  std::string logging_policy_id;
  std::string source_split;
  std::string prng_algorithm;
};

enum class Split : int { kTrain = 0, kValidation = 1, kTest = 2 };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

struct SupervisedExample {
  Vec features;
  std::size_t label = 0;
  Split split = Split::kTrain;
};

/// Multiclass dataset with disjoint split tags carried per example.
struct SupervisedDataset {
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  std::vector<SupervisedExample> examples;

  std::vector<std::size_t> split_indices(Split s) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].split == s) out.push_back(i);
    }
    return out;
  }
};

}  // namespace iceval
