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

#ifndef SFS_DRIFT_HPP_
#define SFS_DRIFT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfs/target.hpp"

namespace sfs {

enum class DriftMode {
  kExact,    // closed form, Gaussian location mixtures only
  kMcGrad,   // ratio of m-sample means of grad f and f
  kMcStein,  // ratio of m-sample means of Z f and f, divided by sqrt(1-t)
};

const char* to_string(DriftMode mode);
// Accepts "exact", "mc_grad", "mc_stein". Throws ConfigError otherwise.
DriftMode parse_drift_mode(const std::string& text);

// Computes b(x, t) = grad log Q_{1-t} f(x) for one target.
//
// Monte-Carlo modes draw one batch Z_1..Z_m per call from the stream
// (seed, kDriftBatch, step, particle); the same batch feeds numerator and
// denominator. Evaluation is a pure function of its arguments.
class DriftEvaluator {
 public:
  DriftEvaluator(TargetSpec target, DriftMode mode, std::size_t mc_size = 1,
                 std::uint64_t seed = 0);

  // McGrad when the target has a gradient, McStein otherwise.
  static DriftEvaluator monte_carlo(TargetSpec target, std::size_t mc_size,
                                    std::uint64_t seed);

  DriftMode mode() const { return mode_; }
  std::size_t mc_size() const { return mc_size_; }
  std::uint64_t seed() const { return seed_; }
  const TargetSpec& target() const { return target_; }
  static const char* stream_policy();

  // Writes b(x, t) into `out`.
  void evaluate(std::span<const double> x, double t, std::uint32_t step,
                std::uint32_t particle, std::span<double> out) const;

  Vector operator()(std::span<const double> x, double t,
                    std::uint32_t step = 0, std::uint32_t particle = 0) const;

 private:
  TargetSpec target_;
  DriftMode mode_;
  std::size_t mc_size_;
  std::uint64_t seed_;
};

// m-sample estimate of Q_t f(x) = E f(x + sqrt(t) Z), averaged in log space.
double heat_semigroup_mc(const TargetSpec& target, std::span<const double> x,
                         double t, std::size_t m, std::uint64_t seed);

// Closed-form drift of a Gaussian location mixture:
//   b(x, t) = sum_i w_i m_i e^{m_i.x - t|m_i|^2/2} / sum_i w_i e^{m_i.x - t|m_i|^2/2}.
Vector drift_exact(const TargetSpec& target, std::span<const double> x,
                   double t);

Vector drift_mc_grad(const DriftEvaluator& ev, std::span<const double> x,
                     double t, std::uint32_t step, std::uint32_t particle);

Vector drift_mc_stein(const DriftEvaluator& ev, std::span<const double> x,
                      double t, std::uint32_t step, std::uint32_t particle);

// Probe grid for numerical regularity checks. For p <= 2 a tensor grid on
// [lo, hi]^p; for larger p, `directions` random unit vectors scaled by the
// 1-D grid. Each point is paired with every entry of `times`.
struct ProbeGrid {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points_per_axis = 21;
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 0.99};
  std::size_t directions = 16;
  // Inner sample size when the target has no closed-form drift.
  std::size_t mc_size = 10000;

  void validate() const;
  // Grid points, row-major; `seed` picks the directions when p > 2.
  Samples points(std::size_t dim, std::uint64_t seed) const;
};

struct DriftRegularityEstimate {
  double c0_hat = 0.0;     // max |b|^2 / (1 + |x|^2)
  double c1_hat = 0.0;     // max |b(x,t) - b(y,s)| / (|x-y| + |t-s|^{1/2})
  double b_sup_hat = 0.0;  // max |b|
  ProbeGrid grid;
  std::size_t dim = 0;
  std::size_t evaluations = 0;
  DriftMode mode = DriftMode::kExact;
  std::uint64_t seed = 0;
};

DriftRegularityEstimate estimate_regularity(const TargetSpec& target,
                                            const ProbeGrid& grid,
                                            std::uint64_t seed,
                                            unsigned threads = 1);

}  // namespace sfs

#endif  // SFS_DRIFT_HPP_
