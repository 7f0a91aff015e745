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

#ifndef SFS_SAMPLER_HPP_
#define SFS_SAMPLER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfs/drift.hpp"
#include "sfs/target.hpp"

namespace sfs {

// How the regularization weight eps is chosen from the inner sample size m.
// Bound once per run.
struct EpsSchedule {
  enum class Rule { kNone, kFixed, kLog, kPower };

  Rule rule = Rule::kNone;
  double value = 0.0;  // kFixed only

  static EpsSchedule none() { return {}; }
  static EpsSchedule fixed(double eps) { return {Rule::kFixed, eps}; }
  static EpsSchedule log_rule() { return {Rule::kLog, 0.0}; }
  static EpsSchedule power_rule() { return {Rule::kPower, 0.0}; }

  // "none", "fixed:<v>", "log", "power".
  static EpsSchedule parse(const std::string& text);
  std::string to_string() const;

  // kLog: (log m)^{-1/5}; kPower: m^{-1/5}. Throws DomainError unless the
  // result lies in (0, 1). Returns nullopt for kNone.
  std::optional<double> resolve(std::size_t m) const;
};

struct SamplerConfig {
  std::size_t steps = 100;       // K; step size s = 1/K
  std::size_t particles = 1000;  // n
  // nullopt: Monte-Carlo drift, gradient form when grad f exists.
  std::optional<DriftMode> drift;
  std::size_t mc_size = 100;  // m
  EpsSchedule eps;
  std::uint64_t seed = 0;
  bool record_trajectory = false;
  std::size_t trajectory_budget_bytes = std::size_t{512} << 20;
  // Worker threads; 0 uses every hardware thread. Results do not depend on it.
  unsigned threads = 0;

  void validate() const;
  // Canonical text of every field that influences the samples.
  std::string canonical() const;
};

struct SampleBatch {
  Samples samples;  // n x p terminal states
  std::string config_digest;
  std::uint64_t seed = 0;
  double wallclock_seconds = 0.0;
  double epsilon = 0.0;  // regularization actually applied
  DriftMode drift_mode = DriftMode::kExact;
  std::size_t steps = 0;
  // n x (K+1) x p when recorded; state k of particle i at ((i*(K+1))+k)*p.
  std::optional<std::vector<double>> trajectories;

  std::span<const double> state(std::size_t particle, std::size_t step) const;
};

// FNV-1a digest of the sampler configuration and target description.
std::string config_digest(const SamplerConfig& config, const TargetSpec& target);

// Euler-Maruyama discretization of the Schrodinger-Follmer diffusion:
//   Y_0 = 0,  Y_{k+1} = Y_k + s b(Y_k, t_k) + sqrt(s) eps_{k+1},  t_k = k s.
// Increments come from (seed, kIncrement, k, i); drift batches from
// (seed, kDriftBatch, k, i).
SampleBatch sfs_run(const SamplerConfig& config, const TargetSpec& target);

// sfs_run with every intermediate state recorded.
SampleBatch sfs_trajectory(SamplerConfig config, const TargetSpec& target);

// Unadjusted Langevin: x <- x + h grad log pi(x) + sqrt(2h) xi from x = 0,
// `iterations` times per chain, returning the final state of each chain.
SampleBatch ula_run(const SamplerConfig& config, const TargetSpec& target,
                    double step, std::size_t iterations);

}  // namespace sfs

#endif  // SFS_SAMPLER_HPP_
