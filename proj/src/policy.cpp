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

#include "iceval/policy.hpp"

#include <algorithm>
#include <cmath>

namespace iceval {

Mat Mat::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw std::invalid_argument("ragged rows in matrix literal");
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(std::size_t num_actions,
                                         std::size_t feature_dim)
    : num_actions_(num_actions),
      feature_dim_(feature_dim),
      params_(num_actions * feature_dim, 0.0) {}

SoftmaxLinearPolicy::SoftmaxLinearPolicy(std::size_t num_actions,
                                         std::size_t feature_dim, Vec params,
                                         double uniform_floor)
    : num_actions_(num_actions),
      feature_dim_(feature_dim),
      params_(std::move(params)),
      uniform_floor_(uniform_floor) {
  if (params_.size() != num_actions_ * feature_dim_) {
    throw std::invalid_argument("softmax policy: parameter size mismatch");
  }
  if (uniform_floor_ < 0.0 ||
      uniform_floor_ * static_cast<double>(num_actions_) > 1.0) {
    throw std::invalid_argument("softmax policy: floor must satisfy k*eps <= 1");
  }
}

SoftmaxLinearPolicy SoftmaxLinearPolicy::with_floor(double eps) const {
  return SoftmaxLinearPolicy(num_actions_, feature_dim_, params_, eps);
}

void SoftmaxLinearPolicy::probs_into(std::span<const double> features,
                                     std::span<double> out,
                                     bool apply_floor) const {
  if (features.size() != feature_dim_) {
    throw std::invalid_argument("softmax policy: feature dimension mismatch");
  }
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < num_actions_; ++y) {
    double s = 0.0;
    const double* w = params_.data() + y * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) s += w[j] * features[j];
    out[y] = s;
    max_score = std::max(max_score, s);
  }
  double total = 0.0;
  for (std::size_t y = 0; y < num_actions_; ++y) {
    out[y] = std::exp(out[y] - max_score);
    total += out[y];
  }
  for (std::size_t y = 0; y < num_actions_; ++y) out[y] /= total;
  if (apply_floor && uniform_floor_ > 0.0) {
    const double keep = 1.0 - uniform_floor_ * static_cast<double>(num_actions_);
    for (std::size_t y = 0; y < num_actions_; ++y) {
      out[y] = keep * out[y] + uniform_floor_;
    }
  }
}

Vec SoftmaxLinearPolicy::probs(std::span<const double> features) const {
  Vec out(num_actions_);
  probs_into(features, out, /*apply_floor=*/true);
  return out;
}

std::span<const double> SoftmaxLinearPolicy::action_probs(
    const LoggedInteraction& rec, std::span<double> scratch) const {
  probs_into(rec.features, scratch.subspan(0, num_actions_), /*apply_floor=*/true);
  return scratch.subspan(0, num_actions_);
}

ClassifierRewardModel::ClassifierRewardModel(SoftmaxLinearPolicy classifier)
    : classifier_(std::move(classifier)) {}

std::span<const double> ClassifierRewardModel::action_values(
    const LoggedInteraction& rec, std::span<double> scratch) const {
  const std::size_t k = classifier_.num_actions();
  auto out = scratch.subspan(0, k);
  classifier_.probs_into(rec.features, out, /*apply_floor=*/false);
  std::size_t best = 0;
  for (std::size_t y = 1; y < k; ++y) {
    if (out[y] > out[best]) best = y;
  }
  for (std::size_t y = 0; y < k; ++y) out[y] = (y == best) ? 0.0 : -1.0;
  return out;
}

}  // namespace iceval
