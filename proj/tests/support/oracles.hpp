// Copyright 2026 The SFS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent reference computations for tests. Nothing here calls into
// the library's evaluation paths.

#ifndef SFS_TESTS_ORACLES_HPP_
#define SFS_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace sfs::oracle {

// f(x) = sum_i w_i exp(m_i x - m_i^2 / 2) for a 1-D location mixture, with
// its first two derivatives, evaluated directly.
struct Mixture1d {
  std::vector<double> w;
  std::vector<double> m;

  double f(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::exp(m[i] * x - 0.5 * m[i] * m[i]);
    return s;
  }
  double df(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * m[i] * std::exp(m[i] * x - 0.5 * m[i] * m[i]);
    return s;
  }
  double d2f(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * m[i] * m[i] * std::exp(m[i] * x - 0.5 * m[i] * m[i]);
    return s;
  }
};

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

// Q_t f(x) = E f(x + sqrt(t) Z) by quadrature against the Gaussian density.
inline double heat_semigroup(const std::function<double(double)>& f, double x, double t) {
  if (t == 0.0) return f(x);
  const double sd = std::sqrt(t);
  return simpson([&](double z) {
    return f(x + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  }, -12.0, 12.0);
}

// b(x, t) = d/dx log Q_{1-t} f(x), by quadrature and a central difference.
inline double drift_by_quadrature(const std::function<double(double)>& f, double x, double t,
                                  double h = 1e-4) {
  const double up = std::log(heat_semigroup(f, x + h, 1.0 - t));
  const double down = std::log(heat_semigroup(f, x - h, 1.0 - t));
  return (up - down) / (2.0 * h);
}

// Maximum of g on [a, b]: dense scan, then golden-section refinement
// around the best grid point.
inline double maximize(const std::function<double(double)>& g, double a, double b, int grid = 20001) {
  double best_x = a, best = -std::numeric_limits<double>::infinity();
  const double h = (b - a) / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    const double x = a + i * h;
    const double v = g(x);
    if (v > best) { best = v; best_x = x; }
  }
  double lo = std::max(a, best_x - h), hi = std::min(b, best_x + h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
    if (g(c) > g(d)) hi = d; else lo = c;
  }
  return std::max(best, g(0.5 * (lo + hi)));
}

inline double minimize(const std::function<double(double)>& g, double a, double b) {
  return -maximize([&](double x) { return -g(x); }, a, b);
}

// (gamma, xi) for a 1-D mixture restricted to [a, b]: gamma bounds the
// Lipschitz constants of f and f' (max |f'|, max |f''|), xi = min f.
struct GammaXi { double gamma; double xi; };

inline GammaXi mixture_gamma_xi(const Mixture1d& mix, double a, double b) {
  const double lip_f = maximize([&](double x) { return std::abs(mix.df(x)); }, a, b);
  const double lip_df = maximize([&](double x) { return std::abs(mix.d2f(x)); }, a, b);
  const double xi = minimize([&](double x) { return mix.f(x); }, a, b);
  return {std::max(lip_f, lip_df), xi};
}

// Exact empirical W2 by enumerating every permutation (n <= 8).
inline double brute_force_w2(const std::vector<std::vector<double>>& xs,
                             const std::vector<std::vector<double>>& ys) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < xs[i].size(); ++c) {
        const double d = xs[i][c] - ys[perm[i]][c];
        s += d * d;
      }
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(best / static_cast<double>(n));
}

}  // namespace sfs::oracle

#endif  // SFS_TESTS_ORACLES_HPP_
