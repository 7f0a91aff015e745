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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sfs/error.hpp"
#include "sfs/target.hpp"
#include "support/oracles.hpp"

namespace sfs {
namespace {

GaussianMixture symmetric_mixture() { return {{0.5, 0.5}, {{-2.0}, {2.0}}}; }

// Direct log of (1 - |x|^2/r^2)^2 / Z divided by the standard Gaussian density.
double bump_log_ratio(const std::vector<double>& x, double r) {
  const double p = static_cast<double>(x.size());
  double sq = 0.0;
  for (double v : x) sq += v * v;
  if (sq >= r * r) return -INFINITY;
  const double z = 2.0 * std::pow(std::numbers::pi, p / 2.0) * std::pow(r, p) / std::tgamma(p / 2.0 + 3.0);
  const double u = 1.0 - sq / (r * r);
  return std::log(u * u / z) + 0.5 * sq + 0.5 * p * std::log(2.0 * std::numbers::pi);
}

TEST(Target, StandardGaussianHasZeroLogRatio) {
  const TargetSpec t = TargetSpec::standard_gaussian(3);
  const std::vector<double> x{0.3, -1.2, 4.0};
  const LogRatioValue v = eval_log_f(t, x);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_FALSE(v.relative);
  for (double g : eval_grad_log_f(t, x)) EXPECT_EQ(g, 0.0);
}

TEST(Target, MixtureLogRatioAtOrigin) {
  const TargetSpec t = TargetSpec::mixture(symmetric_mixture());
  const std::vector<double> x{0.0};
  EXPECT_NEAR(eval_log_f(t, x).value, -2.0, 1e-14);
}

TEST(Target, MixtureMatchesDirectFormula) {
  const oracle::Mixture1d mix{{0.3, 0.7}, {-1.5, 2.5}};
  const TargetSpec t = TargetSpec::mixture({{0.3, 0.7}, {{-1.5}, {2.5}}});
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    const std::vector<double> pt{x};
    EXPECT_NEAR(eval_log_f(t, pt).value, std::log(mix.f(x)), 1e-12) << x;
    EXPECT_NEAR(eval_grad_log_f(t, pt)[0], mix.df(x) / mix.f(x), 1e-12) << x;
  }
}

TEST(Target, MixtureAndPotentialFormsAgreeUpToConstant) {
  // log f = -V + |x|^2/2 + const for the same mixture given both ways.
  const GaussianMixture mix{{0.2, 0.5, 0.3}, {{1.0, -1.0}, {0.0, 2.0}, {-2.0, 0.5}}};
  const TargetSpec ratio = TargetSpec::mixture(mix);
  const TargetSpec pot = TargetSpec::mixture_potential(mix);
  EXPECT_TRUE(eval_log_f(pot, std::vector<double>{0.0, 0.0}).relative);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 2.0);
  const std::vector<double> origin{0.0, 0.0};
  const double offset = eval_log_f(ratio, origin).value - eval_log_f(pot, origin).value;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> x{normal(gen), normal(gen)};
    EXPECT_NEAR(eval_log_f(ratio, x).value - eval_log_f(pot, x).value, offset, 1e-10);
    const Vector ga = eval_grad_log_f(ratio, x);
    const Vector gb = eval_grad_log_f(pot, x);
    EXPECT_NEAR(ga[0], gb[0], 1e-10);
    EXPECT_NEAR(ga[1], gb[1], 1e-10);
  }
}

// Central differences of log f against the analytic gradient.
void check_gradient(const TargetSpec& t, double spread, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, spread);
  const double h = 1e-5;
  int checked = 0;
  while (checked < 100) {
    std::vector<double> x(t.dim());
    for (double& v : x) v = normal(gen);
    const double base = eval_log_f(t, x).value;
    if (!std::isfinite(base)) continue;
    const Vector g = eval_grad_log_f(t, x);
    for (std::size_t c = 0; c < t.dim(); ++c) {
      std::vector<double> up = x, down = x;
      up[c] += h;
      down[c] -= h;
      const double fd = (eval_log_f(t, up).value - eval_log_f(t, down).value) / (2.0 * h);
      EXPECT_NEAR(g[c], fd, 1e-5 * (1.0 + std::abs(fd)));
    }
    ++checked;
  }
}

TEST(Target, GradientMatchesFiniteDifferences) {
  check_gradient(TargetSpec::mixture({{0.25, 0.75}, {{-1.0, 2.0, 0.0}, {3.0, 0.0, -1.0}}}), 2.0, 1);
  check_gradient(TargetSpec::gaussian({1.0, -2.0}), 2.0, 2);
  check_gradient(TargetSpec::gaussian_potential({0.5, 0.5}, 1.7), 2.0, 3);
  check_gradient(TargetSpec::bump(2, 1.5), 0.6, 4);
  check_gradient(regularize(TargetSpec::bump(1), 0.2), 1.0, 5);
  check_gradient(TargetSpec::mixture_potential(symmetric_mixture()), 3.0, 6);
}

TEST(Target, BumpMatchesDirectFormula) {
  const TargetSpec t = TargetSpec::bump(1);
  // Z = 16/15 for p = 1, r = 1.
  const double expected = std::log(15.0 / 16.0) + 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(eval_log_f(t, std::vector<double>{0.0}).value, expected, 1e-12);
  for (std::size_t p : {1u, 2u, 5u}) {
    const TargetSpec b = TargetSpec::bump(p, 1.3);
    std::vector<double> x(p, 0.2);
    EXPECT_NEAR(eval_log_f(b, x).value, bump_log_ratio(x, 1.3), 1e-12);
  }
}

TEST(Target, BumpVanishesOutsideSupport) {
  const TargetSpec t = TargetSpec::bump(2);
  const std::vector<double> x{1.0, 0.5};
  EXPECT_EQ(eval_log_f(t, x).value, -INFINITY);
  for (double g : eval_grad_log_f(t, x)) EXPECT_EQ(g, 0.0);
}

TEST(Target, BumpGroundTruthMoments) {
  // Per-coordinate variance r^2 / (p + 6).
  const std::size_t p = 3;
  const double r = 2.0;
  const TargetSpec t = TargetSpec::bump(p, r);
  const std::size_t n = 100000;
  const Samples s = sample_ground_truth(t, n, 17);
  for (std::size_t c = 0; c < p; ++c) {
    const Vector col = s.column(c);
    double m = 0.0, q = 0.0;
    for (double v : col) { m += v; q += v * v; }
    m /= n;
    const double var = q / n - m * m;
    const double expected = r * r / (p + 6.0);
    EXPECT_NEAR(m, 0.0, 4.0 * std::sqrt(expected / n));
    EXPECT_NEAR(var, expected, 0.02 * expected);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : s.row(i)) sq += v * v;
    ASSERT_LT(sq, r * r);
  }
}

TEST(Target, RegularizedValueAtOrigin) {
  const TargetSpec t = regularize(TargetSpec::mixture(symmetric_mixture()), 0.1);
  const double value = std::exp(eval_log_f(t, std::vector<double>{0.0}).value);
  EXPECT_NEAR(value, 0.9 * std::exp(-2.0) + 0.1, 1e-12);
  EXPECT_NEAR(value, 0.22180, 1e-5);
  EXPECT_DOUBLE_EQ(t.epsilon(), 0.1);
}

TEST(Target, RegularizedBumpIsPositiveEverywhere) {
  const TargetSpec t = regularize(TargetSpec::bump(1), 0.25);
  const std::vector<double> out{3.0}, in{0.5};
  EXPECT_NEAR(eval_log_f(t, out).value, std::log(0.25), 1e-14);
  const double inner = 0.75 * std::exp(bump_log_ratio({0.5}, 1.0)) + 0.25;
  EXPECT_NEAR(eval_log_f(t, in).value, std::log(inner), 1e-12);
}

TEST(Target, RegularizationIsMonotoneInEpsilon) {
  // f_eps - 1 = (1 - eps)(f - 1): the distance from 1 shrinks as eps grows.
  const TargetSpec base = TargetSpec::mixture(symmetric_mixture());
  for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    const std::vector<double> pt{x};
    double prev = std::abs(std::exp(eval_log_f(base, pt).value) - 1.0);
    for (double eps : {0.1, 0.3, 0.6, 0.9}) {
      const double cur = std::abs(std::exp(eval_log_f(regularize(base, eps), pt).value) - 1.0);
      EXPECT_LE(cur, prev + 1e-12);
      prev = cur;
    }
  }
}

TEST(Target, RegularizedGroundTruthMean) {
  const TargetSpec t = regularize(TargetSpec::gaussian({2.0}), 0.3);
  const std::size_t n = 100000;
  const Samples s = sample_ground_truth(t, n, 5);
  double m = 0.0;
  for (double v : s.values) m += v;
  m /= n;
  ASSERT_TRUE(t.moments());
  EXPECT_NEAR(t.moments()->mean[0], 1.4, 1e-12);
  EXPECT_NEAR(m, 1.4, 4.0 * std::sqrt(t.moments()->variance[0] / n));
}

TEST(Target, LogScaleShiftsValueOnly) {
  const TargetSpec t = TargetSpec::mixture(symmetric_mixture());
  const TargetSpec scaled = t.with_log_scale(std::log(1e6));
  const std::vector<double> x{0.7};
  EXPECT_NEAR(eval_log_f(scaled, x).value - eval_log_f(t, x).value, std::log(1e6), 1e-12);
  EXPECT_TRUE(eval_log_f(scaled, x).relative);
  EXPECT_EQ(eval_grad_log_f(scaled, x), eval_grad_log_f(t, x));
}

TEST(Target, MixtureMomentsAndGroundTruth) {
  const TargetSpec t = TargetSpec::mixture(symmetric_mixture());
  ASSERT_TRUE(t.moments());
  EXPECT_DOUBLE_EQ(t.moments()->mean[0], 0.0);
  EXPECT_DOUBLE_EQ(t.moments()->variance[0], 5.0);
  const std::size_t n = 100000;
  const Samples s = sample_ground_truth(t, n, 23);
  double m = 0.0, q = 0.0;
  for (double v : s.values) { m += v; q += v * v; }
  m /= n;
  EXPECT_NEAR(m, 0.0, 4.0 * std::sqrt(5.0 / n));
  EXPECT_NEAR(q / n - m * m, 5.0, 4.0 * std::sqrt(2.0 * 25.0 / n) + 0.5);
}

TEST(Target, GroundTruthIndependentOfThreads) {
  const TargetSpec t = TargetSpec::bump(2);
  const Samples a = sample_ground_truth(t, 1000, 8, 1);
  const Samples b = sample_ground_truth(t, 1000, 8, 4);
  EXPECT_EQ(a.values, b.values);
}

TEST(Target, ValidationErrors) {
  EXPECT_THROW(TargetSpec::mixture({{0.5, 0.6}, {{0.0}, {1.0}}}), DomainError);
  EXPECT_THROW(TargetSpec::mixture({{1.5, -0.5}, {{0.0}, {1.0}}}), DomainError);
  EXPECT_THROW(TargetSpec::mixture({{0.5, 0.5}, {{0.0}, {1.0, 2.0}}}), DomainError);
  EXPECT_THROW(TargetSpec::standard_gaussian(0), DomainError);
  EXPECT_THROW(TargetSpec::bump(1, 0.0), DomainError);
  EXPECT_THROW(regularize(TargetSpec::standard_gaussian(1), 0.0), DomainError);
  EXPECT_THROW(regularize(TargetSpec::standard_gaussian(1), 1.0), DomainError);
  EXPECT_THROW(regularize(TargetSpec::gaussian_potential({0.0}, 1.0), 0.1), UnsupportedError);
  const TargetSpec t = TargetSpec::standard_gaussian(2);
  EXPECT_THROW(eval_log_f(t, std::vector<double>{0.0}), DomainError);
  EXPECT_THROW(eval_log_f(t, std::vector<double>{0.0, NAN}), DomainError);
  EXPECT_THROW((TargetRegularity{0.0, 1.0, std::nullopt}.validate()), DomainError);
  EXPECT_THROW((TargetRegularity{1.0, 2.0, 1.0}.validate()), DomainError);
}

TEST(Target, PotentialWithoutGradient) {
  const TargetSpec t = TargetSpec::potential(
      1, [](std::span<const double> x) { return 0.5 * x[0] * x[0]; }, nullptr);
  EXPECT_FALSE(t.has_gradient());
  EXPECT_THROW(eval_grad_log_f(t, std::vector<double>{0.0}), UnsupportedError);
  EXPECT_THROW(sample_ground_truth(t, 10, 0), UnsupportedError);
}

TEST(Target, RegularityBounds) {
  const TargetRegularity r{4.0, 0.5, std::nullopt};
  EXPECT_DOUBLE_EQ(r.drift_bound(), 8.0);
  EXPECT_DOUBLE_EQ(r.second_moment_bound(2), 6.0 * 64.0 + 6.0);
}

TEST(Target, LogAddExp) {
  EXPECT_NEAR(log_add_exp(0.0, 0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(log_add_exp(-INFINITY, 1.5), 1.5);
  EXPECT_NEAR(log_add_exp(1000.0, 1000.0), 1000.0 + std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace sfs
