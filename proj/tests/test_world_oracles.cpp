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

// Reference values in this file were computed by
// tools/reference/closed_form_reference.py, an independent plain-Python
// enumeration of the same definitions. Rerun it if a fixture world changes.

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "iceval/world.hpp"

namespace {

using iceval::builtin_world;
using iceval::EnumerableWorld;
using iceval::exact_bias;
using iceval::exact_bias_cab;
using iceval::exact_bias_cabdr;
using iceval::exact_variance;
using iceval::exact_variance_cab;
using iceval::exact_variance_cabdr;
using iceval::Mat;
using iceval::SupportViolation;
using iceval::true_value;
using iceval::Vec;
using iceval::WeightScheme;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

struct Frozen {
  WeightScheme scheme;
  double bias;
  double variance50;
};

TEST_CASE("small world matches the independent reference") {
  const EnumerableWorld w = builtin_world("small");
  CHECK(near(true_value(w), 0.57499999999999996));

  const Frozen rows[] = {
      {WeightScheme::direct(), -0.0049999999999999663, 0.00051200000000000019},
      {WeightScheme::ips(), 0.0, 0.018533500000000001},
      {WeightScheme::clipped_ips(1.0), -0.23999999999999999, 0.0056535000000000005},
      {WeightScheme::doubly_robust(), 0.0, 0.011073500000000003},
      {WeightScheme::static_blend(0.3), -0.0034999999999999649, 0.0023556949999999984},
      {WeightScheme::hard_switch(1.0), 0.0, 0.00056950000000000034},
      {WeightScheme::cab(1.0), 0.0, 0.0063095},
      {WeightScheme::cab_dr(1.0), 0.0, 0.0040654999999999997},
  };
  for (const Frozen& f : rows) {
    CAPTURE(f.scheme.label());
    CHECK(near(exact_bias(w, f.scheme), f.bias));
    CHECK(near(exact_variance(w, f.scheme, 50), f.variance50));
  }
}

TEST_CASE("medium world matches the independent reference") {
  const EnumerableWorld w = builtin_world("medium");
  CHECK(near(true_value(w), 0.095174723444648668));

  const Frozen rows[] = {
      {WeightScheme::direct(), -0.0051756448866699294, 0.0019957881154513113},
      {WeightScheme::ips(), -0.0087836059075267255, 0.029194556366978781},
      {WeightScheme::doubly_robust(), 0.0072632447239517938, 0.0085859412189710251},
      {WeightScheme::clipped_ips(2.0), -0.079944847106603503, 0.014706670120242231},
      {WeightScheme::static_blend(0.5), -0.006979625397098321, 0.0085895955014804719},
      {WeightScheme::hard_switch(2.0), -0.055963060882079807, 0.011055151024540461},
      {WeightScheme::cab(2.0), -0.035046810744674244, 0.014999352679515656},
      {WeightScheme::cab_dr(2.0), -0.024729926716503824, 0.0058025509607823834},
  };
  for (const Frozen& f : rows) {
    CAPTURE(f.scheme.label());
    CHECK(near(exact_bias(w, f.scheme), f.bias));
    CHECK(near(exact_variance(w, f.scheme, 50), f.variance50));
  }
}

TEST_CASE("heavy-tail world matches the independent reference") {
  const EnumerableWorld w = builtin_world("heavy-tail");
  CHECK(near(true_value(w), 1.1113536642648514));

  // Largest importance ratio in the design: pi/pi0 = 0.6/0.01.
  double max_ratio = 0.0;
  for (std::size_t i = 0; i < w.num_contexts(); ++i) {
    for (std::size_t j = 0; j < w.num_actions(); ++j) {
      if (w.pi0(i, j) > 0.0) max_ratio = std::max(max_ratio, w.pi(i, j) / w.pi0(i, j));
    }
  }
  CHECK(near(max_ratio, 60.0, 1e-9));
}

TEST_CASE("specialized adaptive-blend forms agree with the generic enumeration") {
  // 20 log-spaced thresholds spanning the clipped-to-unclipped transition.
  std::vector<double> grid;
  for (int j = 0; j < 20; ++j) {
    grid.push_back(0.05 * std::pow(8.0 / 0.05, j / 19.0));
  }
  for (const char* name : {"small", "medium", "heavy-tail"}) {
    const EnumerableWorld w = builtin_world(name);
    for (double M : grid) {
      CAPTURE(name);
      CAPTURE(M);
      CHECK(near(exact_bias_cab(w, M), exact_bias(w, WeightScheme::cab(M))));
      CHECK(near(exact_variance_cab(w, M, 50),
                 exact_variance(w, WeightScheme::cab(M), 50)));
      CHECK(near(exact_bias_cabdr(w, M), exact_bias(w, WeightScheme::cab_dr(M))));
      CHECK(near(exact_variance_cabdr(w, M, 50),
                 exact_variance(w, WeightScheme::cab_dr(M), 50)));
    }
  }
}

TEST_CASE("limit identities collapse the blend onto its endpoints") {
  for (const char* name : {"small", "medium"}) {
    const EnumerableWorld w = builtin_world(name);
    CAPTURE(name);

    // Vanishing threshold: pure model. Unbounded threshold: pure inverse
    // propensity; with the correction term, the doubly-robust estimator.
    CHECK(near(exact_bias(w, WeightScheme::cab(1e-300)),
               exact_bias(w, WeightScheme::direct())));
    CHECK(near(exact_variance(w, WeightScheme::cab(1e-300), 50),
               exact_variance(w, WeightScheme::direct(), 50)));
    CHECK(near(exact_bias(w, WeightScheme::cab(kInf)),
               exact_bias(w, WeightScheme::ips())));
    CHECK(near(exact_variance(w, WeightScheme::cab(kInf), 50),
               exact_variance(w, WeightScheme::ips(), 50)));
    CHECK(near(exact_bias(w, WeightScheme::cab_dr(kInf)),
               exact_bias(w, WeightScheme::doubly_robust())));
    CHECK(near(exact_variance(w, WeightScheme::cab_dr(kInf), 50),
               exact_variance(w, WeightScheme::doubly_robust(), 50)));

    CHECK(near(exact_bias(w, WeightScheme::static_blend(0.0)),
               exact_bias(w, WeightScheme::direct())));
    CHECK(near(exact_variance(w, WeightScheme::static_blend(0.0), 50),
               exact_variance(w, WeightScheme::direct(), 50)));
    CHECK(near(exact_bias(w, WeightScheme::static_blend(1.0)),
               exact_bias(w, WeightScheme::ips())));
    CHECK(near(exact_variance(w, WeightScheme::static_blend(1.0), 50),
               exact_variance(w, WeightScheme::ips(), 50)));

    CHECK(near(exact_bias(w, WeightScheme::clipped_ips(kInf)),
               exact_bias(w, WeightScheme::ips())));
    CHECK(near(exact_variance(w, WeightScheme::clipped_ips(kInf), 50),
               exact_variance(w, WeightScheme::ips(), 50)));
  }
}

TEST_CASE("switch collapses onto its endpoints outside the ratio range") {
  // Small world ratios pi/pi0_hat are 1.8 and 0.2 everywhere.
  const EnumerableWorld w = builtin_world("small");
  CHECK(near(exact_bias(w, WeightScheme::hard_switch(2.0)),
             exact_bias(w, WeightScheme::ips())));
  CHECK(near(exact_variance(w, WeightScheme::hard_switch(2.0), 50),
             exact_variance(w, WeightScheme::ips(), 50)));
  CHECK(near(exact_bias(w, WeightScheme::hard_switch(0.1)),
             exact_bias(w, WeightScheme::direct())));
  CHECK(near(exact_variance(w, WeightScheme::hard_switch(0.1), 50),
             exact_variance(w, WeightScheme::direct(), 50)));
}

TEST_CASE("adaptive blend equals clipped inverse propensity when the model is zero") {
  EnumerableWorld w = builtin_world("medium");
  w.delta_hat = Mat(w.num_contexts(), w.num_actions(), 0.0);
  for (double M : {0.5, 1.0, 2.0, 4.0}) {
    CAPTURE(M);
    CHECK(near(exact_bias(w, WeightScheme::cab(M)),
               exact_bias(w, WeightScheme::clipped_ips(M))));
    CHECK(near(exact_variance(w, WeightScheme::cab(M), 50),
               exact_variance(w, WeightScheme::clipped_ips(M), 50)));
  }
}

TEST_CASE("weight triplets summing to one are unbiased on a fully known world") {
  // Exact logging probabilities and a perfect reward model: every scheme
  // whose triplet sums to one has zero expectation gap.
  EnumerableWorld w = builtin_world("medium");
  w.pi0_hat = w.pi0;
  w.delta_hat = w.delta;
  const WeightScheme sum_to_one[] = {
      WeightScheme::direct(),        WeightScheme::ips(),
      WeightScheme::doubly_robust(), WeightScheme::static_blend(0.5),
      WeightScheme::hard_switch(2.0), WeightScheme::cab(2.0),
      WeightScheme::cab_dr(2.0),
  };
  for (const WeightScheme& s : sum_to_one) {
    CAPTURE(s.label());
    CHECK(near(exact_bias(w, s), 0.0, 1e-14));
  }
  // The clipped scheme stays biased: its weight falls short of one wherever
  // the ratio exceeds the threshold.
  CHECK(exact_bias(w, WeightScheme::clipped_ips(0.5)) < -1e-3);
}

TEST_CASE("a perfect reward model cancels logging-estimate error in the DR family") {
  // Medium world has pi0_hat != pi0; set delta_hat = delta and check which
  // schemes survive the misestimated propensities.
  EnumerableWorld w = builtin_world("medium");
  w.delta_hat = w.delta;
  CHECK(near(exact_bias(w, WeightScheme::direct()), 0.0, 1e-14));
  CHECK(near(exact_bias(w, WeightScheme::doubly_robust()), 0.0, 1e-14));
  CHECK(near(exact_bias(w, WeightScheme::cab_dr(2.0)), 0.0, 1e-14));
  CHECK(std::abs(exact_bias(w, WeightScheme::ips())) > 1e-3);
  CHECK(std::abs(exact_bias(w, WeightScheme::cab(2.0))) > 1e-4);
}

TEST_CASE("blend threshold trades bias down against variance up") {
  // Heavy-tail world: exact logging probabilities, model residual bounded
  // away from zero, importance ratios up to 60.
  const EnumerableWorld w = builtin_world("heavy-tail");
  const double grid[] = {0.5, 1, 2, 4, 8, 16, 32, 64, 128};
  double prev_bias = kInf;
  double prev_var = 0.0;
  for (double M : grid) {
    CAPTURE(M);
    const double b = exact_bias_cab(w, M);
    const double v = exact_variance_cab(w, M, 200);
    CHECK(b >= 0.0);
    CHECK(b <= prev_bias + 1e-15);
    CHECK(v >= prev_var - 1e-15);
    prev_bias = b;
    prev_var = v;
  }
  // Beyond the largest importance ratio the blend is pure inverse
  // propensity, which is exactly unbiased here.
  CHECK(near(exact_bias_cab(w, 64.0), 0.0, 1e-14));
  CHECK(near(exact_bias_cab(w, 128.0), 0.0, 1e-14));
}

TEST_CASE("blend threshold has an interior mean-squared-error minimum") {
  const EnumerableWorld w = builtin_world("heavy-tail");
  const std::vector<double> grid = {0.5, 1, 2, 4, 8, 16, 32, 64, 128};
  std::vector<double> mse_cab, mse_cips;
  for (double M : grid) {
    const double b = exact_bias_cab(w, M);
    mse_cab.push_back(b * b + exact_variance_cab(w, M, 200));
    const double bc = exact_bias(w, WeightScheme::clipped_ips(M));
    mse_cips.push_back(bc * bc +
                       exact_variance(w, WeightScheme::clipped_ips(M), 200));
  }
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (mse_cab[i] < mse_cab[argmin]) argmin = i;
  }
  CHECK(grid[argmin] == 2.0);
  CHECK(mse_cab[argmin] < mse_cab.front());
  CHECK(mse_cab[argmin] < mse_cab.back());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CAPTURE(grid[i]);
    CHECK(mse_cab[i] <= mse_cips[i] + 1e-15);
  }
}

TEST_CASE("closed forms refuse worlds without support") {
  const Vec px = {0.5, 0.5};
  const Mat no_support = Mat::from_rows({{1.0, 0.0}, {1.0, 0.0}});
  const Mat target = Mat::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const Mat zeros = Mat(2, 2, 0.0);
  const EnumerableWorld w =
      EnumerableWorld::create(px, {"a", "b"}, no_support, Mat(), target, zeros,
                              zeros, zeros);
  CHECK_FALSE(w.full_support);
  CHECK_THROWS_AS((void)exact_bias(w, WeightScheme::ips()), SupportViolation);
  CHECK_THROWS_AS((void)exact_variance(w, WeightScheme::ips(), 50), SupportViolation);
  CHECK_THROWS_AS((void)exact_bias_cab(w, 1.0), SupportViolation);
  CHECK_THROWS_AS((void)exact_variance_cabdr(w, 1.0, 50), SupportViolation);
}

TEST_CASE("world construction validates its tables") {
  const Vec px = {0.5, 0.5};
  const Mat ok = Mat::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const Mat zeros = Mat(2, 2, 0.0);

  // Probability rows must sum to one.
  const Mat bad_rows = Mat::from_rows({{0.6, 0.3}, {0.5, 0.5}});
  CHECK_THROWS_AS((void)EnumerableWorld::create(px, {"a", "b"}, bad_rows, Mat(),
                                                ok, zeros, zeros, zeros),
                  std::invalid_argument);

  // The context marginal must sum to one.
  CHECK_THROWS_AS((void)EnumerableWorld::create({0.5, 0.4}, {"a", "b"}, ok,
                                                Mat(), ok, zeros, zeros, zeros),
                  std::invalid_argument);

  // Reward variances must be nonnegative.
  const Mat neg_var = Mat::from_rows({{0.1, -0.1}, {0.1, 0.1}});
  CHECK_THROWS_AS((void)EnumerableWorld::create(px, {"a", "b"}, ok, Mat(), ok,
                                                zeros, neg_var, zeros),
                  std::invalid_argument);

  // The estimated logging policy must cover the true one.
  const Mat half_cover = Mat::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  CHECK_THROWS_AS((void)EnumerableWorld::create(px, {"a", "b"}, ok, half_cover,
                                                ok, zeros, zeros, zeros),
                  std::invalid_argument);

  // Shape mismatches are rejected.
  const Mat wide = Mat(2, 3, 0.25);
  CHECK_THROWS_AS((void)EnumerableWorld::create(px, {"a", "b"}, ok, Mat(), ok,
                                                zeros, zeros, wide),
                  std::invalid_argument);

  // An empty estimate means "known exactly" and copies the truth.
  const EnumerableWorld w = EnumerableWorld::create(
      px, {"a", "b"}, ok, Mat(), ok, zeros, zeros, zeros);
  CHECK(w.pi0_hat(0, 0) == 0.5);
  CHECK(w.zeta(0, 0) == 0.0);
  CHECK(w.full_support);

  CHECK_THROWS_AS((void)builtin_world("nope"), std::invalid_argument);
}

}  // namespace
