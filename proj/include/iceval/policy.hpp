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

#include <span>
#include <string>

#include "iceval/common.hpp"
#include "iceval/data_types.hpp"

namespace iceval {

/// A stochastic policy over a finite action set. Implementations either look
/// the row up (tabular, by context id) or compute it (softmax over features).
/// action_probs may return a view into internal storage or fill `scratch`
/// (which must have num_actions() capacity) and return a view of it.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::size_t num_actions() const = 0;
  virtual std::span<const double> action_probs(const LoggedInteraction& rec,
                                               std::span<double> scratch) const = 0;
};

/// Row-per-context policy for enumerable worlds.
class TabularPolicy final : public Policy {
 public:
  explicit TabularPolicy(Mat table) : table_(std::move(table)) {}

  std::size_t num_actions() const override { return table_.cols(); }

  std::span<const double> action_probs(const LoggedInteraction& rec,
                                       std::span<double>) const override {
    if (rec.context_id < 0 ||
        static_cast<std::size_t>(rec.context_id) >= table_.rows()) {
      throw std::out_of_range("tabular policy: record has no valid context id");
    }
    return table_.row(static_cast<std::size_t>(rec.context_id));
  }

  const Mat& table() const { return table_; }

 private:
  Mat table_;
};

/// Linear softmax policy with the block feature map phi(x, y) = e_y (x) x:
/// score(y) = w[y*d .. y*d+d) . x, pi(y|x) = softmax(score)(y). An optional
/// uniform floor mixes the softmax with the uniform distribution,
/// pi'(y|x) = (1 - k*eps) pi(y|x) + eps, guaranteeing min_y pi'(y|x) >= eps;
/// loggers are softened this way so importance weights stay finite.
class SoftmaxLinearPolicy final : public Policy {
 public:
  static constexpr const char* kFeatureMapId = "onehot-action-x-context/1";

  SoftmaxLinearPolicy(std::size_t num_actions, std::size_t feature_dim);
  SoftmaxLinearPolicy(std::size_t num_actions, std::size_t feature_dim, Vec params,
                      double uniform_floor = 0.0);

  std::size_t num_actions() const override { return num_actions_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_params() const { return params_.size(); }

  const Vec& params() const { return params_; }
  Vec& mutable_params() { return params_; }

  double uniform_floor() const { return uniform_floor_; }

  /// Copy of this policy with the given floor (0 disables).
  SoftmaxLinearPolicy with_floor(double eps) const;

  /// Floored probabilities for a raw feature vector.
  Vec probs(std::span<const double> features) const;

  /// Fills `out` with the un-floored softmax row; returns the floored row in
  /// `out` when apply_floor. Used by the gradient path, which needs both.
  void probs_into(std::span<const double> features, std::span<double> out,
                  bool apply_floor) const;

  std::span<const double> action_probs(const LoggedInteraction& rec,
                                       std::span<double> scratch) const override;

 private:
  std::size_t num_actions_;
  std::size_t feature_dim_;
  Vec params_;
  double uniform_floor_ = 0.0;
};

/// Predicts the mean reward of every action in a context.
class RewardModel {
 public:
  virtual ~RewardModel() = default;
  virtual std::size_t num_actions() const = 0;
  virtual std::span<const double> action_values(const LoggedInteraction& rec,
                                                std::span<double> scratch) const = 0;
};

/// Row-per-context reward model for enumerable worlds.
class TabularRewardModel final : public RewardModel {
 public:
  explicit TabularRewardModel(Mat table) : table_(std::move(table)) {}

  std::size_t num_actions() const override { return table_.cols(); }

  std::span<const double> action_values(const LoggedInteraction& rec,
                                        std::span<double>) const override {
    if (rec.context_id < 0 ||
        static_cast<std::size_t>(rec.context_id) >= table_.rows()) {
      throw std::out_of_range("tabular reward model: record has no valid context id");
    }
    return table_.row(static_cast<std::size_t>(rec.context_id));
  }

 private:
  Mat table_;
};

/// Reward model induced by a hard classifier under the {-1, 0} reward
/// encoding: predicted reward is 0 for the class the classifier picks and -1
/// for every other action.
class ClassifierRewardModel final : public RewardModel {
 public:
  ClassifierRewardModel(SoftmaxLinearPolicy classifier);

  std::size_t num_actions() const override { return classifier_.num_actions(); }

  const SoftmaxLinearPolicy& classifier() const { return classifier_; }

  std::span<const double> action_values(const LoggedInteraction& rec,
                                        std::span<double> scratch) const override;

 private:
  SoftmaxLinearPolicy classifier_;
};

}  // namespace iceval
