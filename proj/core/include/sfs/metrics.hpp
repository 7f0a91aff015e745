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

#ifndef SFS_METRICS_HPP_
#define SFS_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfs/target.hpp"

namespace sfs {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Exact W2 between two equal-size empirical measures on the line: the
// root mean squared gap between order statistics.
double wasserstein2_1d(std::span<const double> xs, std::span<const double> ys);

struct SlicedW2 {
  double value = 0.0;  // mean over directions of the projected 1-D W2
  double se = 0.0;     // standard error across directions
  std::size_t projections = 0;
};

// Averages wasserstein2_1d over `n_proj` uniform random directions drawn
// from (seed, kProjection, 0, j). Directions are oriented so their first
// nonzero coordinate is positive; for p = 1 every direction is +1.
SlicedW2 sliced_w2(const Samples& xs, const Samples& ys, std::size_t n_proj,
                   std::uint64_t seed, unsigned threads = 1);

inline constexpr std::size_t kMaxAssignmentSize = 512;

// Minimum-cost perfect matching on a dense n x n cost matrix (row-major).
// Returns, for each row, its assigned column. O(n^3).
std::vector<std::size_t> solve_assignment(std::span<const double> cost,
                                          std::size_t n);

// Exact W2 between empirical measures by optimal assignment on squared
// Euclidean costs. n is capped at kMaxAssignmentSize.
double exact_w2_assignment(const Samples& xs, const Samples& ys);

// W2 estimate picking the exact 1-D formula for p = 1 and sliced W2 above.
Estimate w2_distance(const Samples& xs, const Samples& ys, std::size_t n_proj,
                     std::uint64_t seed);

struct CoordinateMoments {
  double mean_error = 0.0;      // sample mean - reference mean
  double mean_se = 0.0;
  double variance_error = 0.0;  // sample variance - reference variance
  double variance_se = 0.0;
};

struct MomentReport {
  std::vector<CoordinateMoments> coordinates;
  std::size_t n = 0;
  // False when n < 2: standard errors are NaN and carry no information.
  bool se_defined = false;
  std::string reference;  // "analytic" or "ground_truth"
};

// Per-coordinate mean and variance discrepancies against the target's
// analytic moments, or against `reference` when the target has none.
MomentReport moment_report(const Samples& samples, const TargetSpec& target,
                           const Samples* reference = nullptr);

struct RateFit {
  std::string parameter;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least squares of log(error) on log(parameter). Needs >= 3 points, all
// coordinates positive.
RateFit fit_rate(std::span<const std::pair<double, double>> points,
                 std::string parameter = "");

// W2 between two independent ground-truth batches of size n: the
// resolution limit of empirical W2 at that size.
Estimate noise_floor(const TargetSpec& target, std::size_t n,
                     std::uint64_t seed, std::size_t n_proj = 64);

// E|Y_k|^2 at every recorded step with its standard error.
std::vector<Estimate> trajectory_second_moments(
    std::span<const double> trajectories, std::size_t n, std::size_t steps,
    std::size_t dim);

struct MetricReport {
  std::optional<Estimate> w2_1d;
  std::optional<SlicedW2> sliced_w2;
  std::optional<double> exact_w2_small;
  std::optional<MomentReport> moments;
  std::vector<RateFit> rate_fits;
  std::optional<Estimate> noise_floor;
};

}  // namespace sfs

#endif  // SFS_METRICS_HPP_
