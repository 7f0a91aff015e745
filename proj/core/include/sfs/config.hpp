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

#ifndef SFS_CONFIG_HPP_
#define SFS_CONFIG_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sfs/drift.hpp"
#include "sfs/sampler.hpp"
#include "sfs/target.hpp"

namespace sfs {

// Declarative target description, the `target:` section of a run config.
//
//   kind: standard | gaussian | mixture | bump | gaussian_potential |
//         mixture_potential
//   dim, weights, means, mean, sigma, radius, log_scale, regularity
struct TargetConfig {
  std::string kind = "standard";
  std::size_t dim = 1;
  std::vector<double> weights;   // mixture, mixture_potential
  std::vector<Vector> means;     // mixture, mixture_potential
  Vector mean;                   // gaussian, gaussian_potential
  double sigma = 1.0;            // gaussian_potential
  double radius = 1.0;           // bump
  double log_scale = 0.0;        // nonzero turns f into C f
  std::optional<TargetRegularity> regularity;
};

// Builds the target. Throws UnknownTargetError for an unknown kind and
// DomainError for inconsistent parameters.
TargetSpec build_target(const TargetConfig& config);

// Same target family in dimension p: means are zero-padded or truncated.
TargetConfig with_dim(TargetConfig config, std::size_t dim);

// Inner-sample probe of drift accuracy against the exact drift, used by
// m sweeps.
struct DriftErrorProbe {
  std::size_t points = 25;
  double lo = -3.0;
  double hi = 3.0;
  std::vector<double> times{0.0, 0.25, 0.5, 0.75, 0.99};
  std::size_t replications = 16;
};

struct LangevinSettings {
  double step = 0.01;
  // 0 matches the SFS budget K * m per chain.
  std::size_t iterations = 0;
};

struct ExperimentSettings {
  std::string axis;  // steps | mc_size | dim | eps
  std::vector<double> values;
  std::size_t replications = 3;
  DriftErrorProbe drift_probe;
};

struct RunConfig {
  TargetConfig target;
  SamplerConfig sampler;
  LangevinSettings langevin;
  ProbeGrid probe;
  std::size_t projections = 64;  // sliced W2 directions
  std::optional<ExperimentSettings> experiment;
};

// Parses YAML text. Throws ConfigError on malformed input, unknown keys,
// or a missing sampler.seed.
RunConfig parse_config(const std::string& text);

// Reads and parses a file. Throws IoError if it cannot be read.
RunConfig load_config(const std::string& path);

// Fully resolved YAML; parse_config(emit_config(c)) reproduces c exactly.
std::string emit_config(const RunConfig& config);

}  // namespace sfs

#endif  // SFS_CONFIG_HPP_
