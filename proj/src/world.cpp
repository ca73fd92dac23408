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

#include "iceval/world.hpp"

#include <cmath>

namespace iceval {
namespace {

constexpr double kRowSumTol = 1e-12;

void check_stochastic(const Mat& m, std::size_t rows, std::size_t cols,
                      const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(std::string(name) + ": shape mismatch");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (m(i, j) < 0.0 || std::isnan(m(i, j))) {
        throw std::invalid_argument(std::string(name) + ": negative probability");
      }
      s += m(i, j);
    }
    if (std::abs(s - 1.0) > kRowSumTol) {
      throw std::invalid_argument(std::string(name) + ": row " +
                                  std::to_string(i) + " sums to " +
                                  std::to_string(s));
    }
  }
}

void check_shape(const Mat& m, std::size_t rows, std::size_t cols,
                 const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(std::string(name) + ": shape mismatch");
  }
}

void require_support(const EnumerableWorld& w) {
  if (!w.full_support) {
    throw SupportViolation(
        "closed forms require pi0 > 0 wherever the evaluated policy has mass");
  }
}

Vec softmax(const Vec& scores) {
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  Vec out(scores.size());
  double total = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    out[j] = std::exp(scores[j] - mx);
    total += out[j];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

EnumerableWorld EnumerableWorld::create(Vec context_prob,
                                        std::vector<std::string> action_labels,
                                        Mat pi0, Mat pi0_hat, Mat pi, Mat delta,
                                        Mat sigma2, Mat delta_hat) {
  const std::size_t C = context_prob.size();
  const std::size_t K = action_labels.size();
  if (C == 0 || K == 0) {
    throw std::invalid_argument("world needs at least one context and action");
  }
  double p_total = 0.0;
  for (double p : context_prob) {
    if (p < 0.0 || std::isnan(p)) {
      throw std::invalid_argument("context probabilities must be nonnegative");
    }
    p_total += p;
  }
  if (std::abs(p_total - 1.0) > kRowSumTol) {
    throw std::invalid_argument("context probabilities sum to " +
                                std::to_string(p_total));
  }
  check_stochastic(pi0, C, K, "pi0");
  if (pi0_hat.rows() == 0) pi0_hat = pi0;
  check_stochastic(pi0_hat, C, K, "pi0_hat");
  check_stochastic(pi, C, K, "pi");
  check_shape(delta, C, K, "delta");
  check_shape(delta_hat, C, K, "delta_hat");
  check_shape(sigma2, C, K, "sigma2");
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      if (sigma2(i, j) < 0.0) {
        throw std::invalid_argument("sigma2 must be nonnegative");
      }
      if (pi0(i, j) > 0.0 && pi0_hat(i, j) <= 0.0) {
        throw std::invalid_argument(
            "pi0_hat must be positive wherever pi0 is positive");
      }
    }
  }
  EnumerableWorld w;
  w.context_prob = std::move(context_prob);
  w.action_labels = std::move(action_labels);
  w.pi0 = std::move(pi0);
  w.pi0_hat = std::move(pi0_hat);
  w.pi = std::move(pi);
  w.delta = std::move(delta);
  w.sigma2 = std::move(sigma2);
  w.delta_hat = std::move(delta_hat);
  w.full_support = true;
  for (std::size_t i = 0; i < C && w.full_support; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      if (w.pi(i, j) > 0.0 && w.pi0(i, j) <= 0.0) {
        w.full_support = false;
        break;
      }
    }
  }
  return w;
}

double true_value(const EnumerableWorld& w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      s += w.pi(i, j) * w.delta(i, j);
    }
    acc += w.context_prob[i] * s;
  }
  return acc;
}

double exact_bias(const EnumerableWorld& w, const WeightScheme& scheme) {
  require_support(w);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const WeightTriplet t = scheme_weights(scheme, p, w.pi0_hat(i, j));
      const double z = w.zeta(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      s += p * (t.alpha * D - t.beta * z * d + t.gamma * (D - z * (d + D)) +
                (t.alpha + t.beta + t.gamma) * d - d);
    }
    acc += w.context_prob[i] * s;
  }
  return acc;
}

double exact_variance(const EnumerableWorld& w, const WeightScheme& scheme,
                      std::size_t n) {
  require_support(w);
  if (n == 0) throw std::invalid_argument("variance requires n >= 1");

  // Across-context variance of the per-sample conditional mean.
  double mean = 0.0, mean_sq = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double g = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const WeightTriplet t = scheme_weights(scheme, p, w.pi0_hat(i, j));
      const double z = w.zeta(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      g += p * (t.alpha * D - t.beta * z * d + t.gamma * (D - z * (d + D)) +
                (t.alpha + t.beta + t.gamma) * d);
    }
    mean += w.context_prob[i] * g;
    mean_sq += w.context_prob[i] * g * g;
  }
  double acc = mean_sq - mean * mean;

  // Reward noise through the squared inverse-propensity weight.
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const WeightTriplet t = scheme_weights(scheme, p, w.pi0_hat(i, j));
      const double c = p / w.pi0(i, j);
      const double one_minus_z = 1.0 - w.zeta(i, j);
      s += p * t.beta * t.beta * c * one_minus_z * one_minus_z * w.sigma2(i, j);
    }
    acc += w.context_prob[i] * s;
  }

  // Action-sampling variance of the logged-action terms under pi0. Note
  // c(1 - zeta) == pi/pi0_hat, which stays finite when pi == 0.
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double ez = 0.0, ez2 = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double q = w.pi0(i, j);
      if (q <= 0.0) continue;
      const double p = w.pi(i, j);
      const WeightTriplet t = scheme_weights(scheme, p, w.pi0_hat(i, j));
      const double chat = p / w.pi0_hat(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      const double zval = t.beta * chat * d + t.gamma * chat * (d + D);
      ez += q * zval;
      ez2 += q * zval * zval;
    }
    acc += w.context_prob[i] * (ez2 - ez * ez);
  }

  return acc / static_cast<double>(n);
}

double exact_bias_cab(const EnumerableWorld& w, double clip) {
  require_support(w);
  if (!(clip > 0.0)) throw InvalidScheme("clip threshold must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double z = w.zeta(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      const double chat = p / w.pi0_hat(i, j);
      s += p * (chat <= clip
                    ? -d * z
                    : D * (1.0 - clip / chat) - (clip / chat) * d * z);
    }
    acc += w.context_prob[i] * s;
  }
  return acc;
}

double exact_variance_cab(const EnumerableWorld& w, double clip, std::size_t n) {
  require_support(w);
  if (!(clip > 0.0)) throw InvalidScheme("clip threshold must be positive");
  if (n == 0) throw std::invalid_argument("variance requires n >= 1");

  double mean = 0.0, mean_sq = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double g = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double z = w.zeta(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      const double chat = p / w.pi0_hat(i, j);
      g += p * (chat <= clip
                    ? d - d * z
                    : d + D * (1.0 - clip / chat) - (clip / chat) * d * z);
    }
    mean += w.context_prob[i] * g;
    mean_sq += w.context_prob[i] * g * g;
  }
  double acc = mean_sq - mean * mean;

  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double c = p / w.pi0(i, j);
      const double one_minus_z = 1.0 - w.zeta(i, j);
      const double chat = p / w.pi0_hat(i, j);
      s += p * (chat <= clip ? c * one_minus_z * one_minus_z
                             : clip * clip / c) *
           w.sigma2(i, j);
    }
    acc += w.context_prob[i] * s;
  }

  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double ez = 0.0, ez2 = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double q = w.pi0(i, j);
      if (q <= 0.0) continue;
      const double chat = w.pi(i, j) / w.pi0_hat(i, j);
      const double d = w.delta(i, j);
      const double zval = (chat <= clip ? chat : clip) * d;
      ez += q * zval;
      ez2 += q * zval * zval;
    }
    acc += w.context_prob[i] * (ez2 - ez * ez);
  }

  return acc / static_cast<double>(n);
}

double exact_bias_cabdr(const EnumerableWorld& w, double clip) {
  require_support(w);
  if (!(clip > 0.0)) throw InvalidScheme("clip threshold must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double z = w.zeta(i, j);
      const double D = w.residual(i, j);
      const double chat = p / w.pi0_hat(i, j);
      const double c = p / w.pi0(i, j);
      s += p * (chat <= clip ? z * D : D * (1.0 - clip / c));
    }
    acc += w.context_prob[i] * s;
  }
  return acc;
}

double exact_variance_cabdr(const EnumerableWorld& w, double clip,
                            std::size_t n) {
  require_support(w);
  if (!(clip > 0.0)) throw InvalidScheme("clip threshold must be positive");
  if (n == 0) throw std::invalid_argument("variance requires n >= 1");

  double mean = 0.0, mean_sq = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double g = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double z = w.zeta(i, j);
      const double d = w.delta(i, j);
      const double D = w.residual(i, j);
      const double chat = p / w.pi0_hat(i, j);
      const double c = p / w.pi0(i, j);
      g += p * (d + (chat <= clip ? z * D : D * (1.0 - clip / c)));
    }
    mean += w.context_prob[i] * g;
    mean_sq += w.context_prob[i] * g * g;
  }
  double acc = mean_sq - mean * mean;

  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double p = w.pi(i, j);
      if (p <= 0.0) continue;
      const double c = p / w.pi0(i, j);
      const double one_minus_z = 1.0 - w.zeta(i, j);
      const double chat = p / w.pi0_hat(i, j);
      s += p * (chat <= clip ? c * one_minus_z * one_minus_z
                             : clip * clip / c) *
           w.sigma2(i, j);
    }
    acc += w.context_prob[i] * s;
  }

  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    double ez = 0.0, ez2 = 0.0;
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      const double q = w.pi0(i, j);
      if (q <= 0.0) continue;
      const double chat = w.pi(i, j) / w.pi0_hat(i, j);
      const double D = w.residual(i, j);
      const double zval = -(chat <= clip ? chat : clip) * D;
      ez += q * zval;
      ez2 += q * zval * zval;
    }
    acc += w.context_prob[i] * (ez2 - ez * ez);
  }

  return acc / static_cast<double>(n);
}

TabularPolicy target_policy_of(const EnumerableWorld& w) {
  return TabularPolicy(w.pi);
}

TabularPolicy logging_policy_of(const EnumerableWorld& w) {
  return TabularPolicy(w.pi0);
}

TabularRewardModel reward_model_of(const EnumerableWorld& w) {
  return TabularRewardModel(w.delta_hat);
}

namespace {

EnumerableWorld small_world() {
  const Vec px = {0.5, 0.5};
  const Mat pi0 = Mat::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const Mat pi = Mat::from_rows({{0.9, 0.1}, {0.9, 0.1}});
  const Mat delta = Mat::from_rows({{1.0, 0.0}, {0.2, 0.7}});
  const Mat sigma2 = Mat::from_rows({{0.25, 0.25}, {0.25, 0.25}});
  const Mat delta_hat = Mat::from_rows({{0.8, 0.1}, {0.4, 0.5}});
  return EnumerableWorld::create(px, {"a0", "a1"}, pi0, Mat{}, pi, delta,
                                 sigma2, delta_hat);
}

EnumerableWorld medium_world() {
  constexpr std::size_t C = 10, K = 5;
  Vec px(C);
  for (std::size_t i = 0; i < C; ++i) px[i] = static_cast<double>(i + 1) / 55.0;
  Mat pi0(C, K), pi0_hat(C, K), pi(C, K), delta(C, K), sigma2(C, K),
      delta_hat(C, K);
  for (std::size_t i = 0; i < C; ++i) {
    Vec s0(K), s1(K);
    for (std::size_t j = 0; j < K; ++j) {
      s0[j] = std::sin(0.7 * static_cast<double>((i + 1) * (j + 1)));
      s1[j] = 1.3 * std::cos(0.4 * static_cast<double>((i + 2) * (j + 1))) +
              0.5 * std::sin(0.9 * static_cast<double>(j + 1));
    }
    const Vec r0 = softmax(s0);
    const Vec r1 = softmax(s1);
    Vec raw(K);
    double raw_total = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      raw[j] = r0[j] * std::exp(0.3 * std::sin(1.1 * static_cast<double>(i + 1) +
                                               0.8 * static_cast<double>(j + 1)));
      raw_total += raw[j];
    }
    for (std::size_t j = 0; j < K; ++j) {
      pi0(i, j) = r0[j];
      pi(i, j) = r1[j];
      pi0_hat(i, j) = raw[j] / raw_total;
      delta(i, j) = std::sin(static_cast<double>((i + 1) * (j + 2)) * 0.35);
      sigma2(i, j) = 0.05 + 0.2 * (0.5 + 0.5 * std::cos(static_cast<double>(
                                                    (i + 1) + (j + 1))));
      delta_hat(i, j) =
          delta(i, j) + 0.25 * std::cos(0.6 * static_cast<double>((i + 1) * (j + 1)));
    }
  }
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < K; ++j) labels.push_back("a" + std::to_string(j));
  return EnumerableWorld::create(std::move(px), std::move(labels), std::move(pi0),
                                 std::move(pi0_hat), std::move(pi),
                                 std::move(delta), std::move(sigma2),
                                 std::move(delta_hat));
}

EnumerableWorld heavy_tail_world() {
  const Vec px = {0.4, 0.3, 0.2, 0.1};
  const Mat pi0 = Mat::from_rows({{0.01, 0.59, 0.20, 0.20},
                                  {0.02, 0.48, 0.25, 0.25},
                                  {0.30, 0.30, 0.20, 0.20},
                                  {0.25, 0.25, 0.25, 0.25}});
  const Mat pi = Mat::from_rows({{0.60, 0.20, 0.10, 0.10},
                                 {0.50, 0.30, 0.10, 0.10},
                                 {0.25, 0.25, 0.25, 0.25},
                                 {0.10, 0.20, 0.30, 0.40}});
  constexpr std::size_t C = 4, K = 4;
  Mat delta(C, K), sigma2(C, K), delta_hat(C, K);
  for (std::size_t i = 0; i < C; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      delta(i, j) =
          1.0 + 0.5 * std::sin(static_cast<double>(i) + 2.0 * static_cast<double>(j));
      // Residual kept positive and away from zero so the model-only end of
      // the blend has visible bias.
      delta_hat(i, j) =
          delta(i, j) + 0.12 +
          0.06 * (0.5 + 0.5 * std::sin(static_cast<double>(i + j)));
      sigma2(i, j) = 0.5;
    }
  }
  return EnumerableWorld::create(px, {"a0", "a1", "a2", "a3"}, pi0, Mat{}, pi,
                                 delta, sigma2, delta_hat);
}

}  // namespace

EnumerableWorld builtin_world(const std::string& name) {
  if (name == "small") return small_world();
  if (name == "medium") return medium_world();
  if (name == "heavy-tail") return heavy_tail_world();
  throw std::invalid_argument("unknown builtin world: " + name);
}

}  // namespace iceval
