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

#include "iceval/optim.hpp"

#include <cmath>
#include <deque>

namespace iceval {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Backtracking line search from t = 1. Returns the accepted step (0 when no
// decrease was found within the backtrack budget).
double line_search(const ObjectiveFn& f, const Vec& x, const Vec& dir,
                   double fx, double slope, const OptimOptions& opts, Vec& x_new,
                   Vec& g_new, double& f_new) {
  double t = 1.0;
  for (int b = 0; b <= opts.max_backtracks; ++b) {
    for (std::size_t i = 0; i < x.size(); ++i) x_new[i] = x[i] + t * dir[i];
    f_new = f(x_new, g_new);
    if (std::isfinite(f_new) && f_new <= fx + opts.armijo_c1 * t * slope) return t;
    t *= 0.5;
  }
  return 0.0;
}

}  // namespace

OptimResult minimize_lbfgs(const ObjectiveFn& f, Vec x0, const OptimOptions& opts) {
  const std::size_t dim = x0.size();
  OptimResult res;
  res.x = std::move(x0);
  Vec grad(dim), x_new(dim), g_new(dim), dir(dim);
  res.value = f(res.x, grad);

  struct Pair {
    Vec s, y;
    double rho;
  };
  std::deque<Pair> history;
  Vec alpha_buf;

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm_inf(grad) <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion for dir = -H * grad.
    dir.assign(grad.begin(), grad.end());
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t h = history.size(); h-- > 0;) {
      const Pair& p = history[h];
      alpha_buf[h] = p.rho * dot(p.s, dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] -= alpha_buf[h] * p.y[i];
    }
    if (!history.empty()) {
      const Pair& last = history.back();
      const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
      for (double& v : dir) v *= gamma;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const Pair& p = history[h];
      const double beta = p.rho * dot(p.y, dir);
      for (std::size_t i = 0; i < dim; ++i) dir[i] += (alpha_buf[h] - beta) * p.s[i];
    }
    for (double& v : dir) v = -v;

    double slope = dot(grad, dir);
    if (slope >= 0.0) {
      // Curvature information went stale (possible across kinks); restart
      // from steepest descent.
      history.clear();
      for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
      if (slope >= 0.0) break;  // zero gradient
    }

    double f_new = res.value;
    const double t = line_search(f, res.x, dir, res.value, slope, opts, x_new, g_new, f_new);
    res.iterations = it + 1;
    if (t == 0.0) break;  // no admissible decrease left

    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      p.s[i] = x_new[i] - res.x[i];
      p.y[i] = g_new[i] - grad[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-10) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > static_cast<std::size_t>(opts.memory)) {
        history.pop_front();
      }
    }
    res.x.swap(x_new);
    grad.swap(g_new);
    res.value = f_new;
  }
  if (!res.converged && norm_inf(grad) <= opts.gradient_tolerance) {
    res.converged = true;
  }
  return res;
}

OptimResult minimize_gd(const ObjectiveFn& f, Vec x0, const OptimOptions& opts) {
  const std::size_t dim = x0.size();
  OptimResult res;
  res.x = std::move(x0);
  Vec grad(dim), x_new(dim), g_new(dim), dir(dim);
  res.value = f(res.x, grad);

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (norm_inf(grad) <= opts.gradient_tolerance) {
      res.converged = true;
      break;
    }
    for (std::size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
    const double slope = dot(grad, dir);
    if (slope >= 0.0) break;
    double f_new = res.value;
    const double t = line_search(f, res.x, dir, res.value, slope, opts, x_new, g_new, f_new);
    res.iterations = it + 1;
    if (t == 0.0) break;
    res.x.swap(x_new);
    grad.swap(g_new);
    res.value = f_new;
  }
  if (!res.converged && norm_inf(grad) <= opts.gradient_tolerance) {
    res.converged = true;
  }
  return res;
}

}  // namespace iceval
