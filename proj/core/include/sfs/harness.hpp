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

#ifndef SFS_HARNESS_HPP_
#define SFS_HARNESS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfs/config.hpp"
#include "sfs/metrics.hpp"
#include "sfs/sampler.hpp"

namespace sfs {

enum class SweepAxis { kSteps, kMcSize, kDim, kEps };

const char* to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& text);

struct ExperimentPlan {
  TargetConfig target;
  SweepAxis axis = SweepAxis::kSteps;
  std::vector<double> values;
  std::size_t replications = 3;
  SamplerConfig base;
  std::size_t projections = 64;
  DriftErrorProbe drift_probe;
  LangevinSettings langevin;
  std::filesystem::path output_dir;

  static ExperimentPlan from_config(const RunConfig& config,
                                    std::filesystem::path output_dir);

  // Throws DomainError: >= 3 cells for a sweep, >= 3 replications, values
  // valid for the axis.
  void validate() const;
  // Same checks for a comparison plan, plus the matched-budget rule.
  void validate_comparison() const;

  // SamplerConfig and target for one cell of the sweep.
  SamplerConfig cell_config(std::size_t cell) const;
  TargetConfig cell_target(std::size_t cell) const;
  // Target evaluations per SFS particle: K * m (K for exact drift).
  std::size_t sfs_budget() const;
  // Langevin iterations per chain under the matched budget.
  std::size_t langevin_iterations() const;

  nlohmann::json to_json() const;
};

// One replication of one cell.
struct CellRow {
  std::size_t cell = 0;
  double value = 0.0;
  std::size_t replication = 0;
  bool ok = false;
  std::string error;
  double w2 = 0.0;
  double w2_se = 0.0;
  double noise_floor = 0.0;
  double drift_mse = 0.0;  // m sweeps only; NaN otherwise
  double max_mean_z = 0.0; // largest |mean error| / SE across coordinates
};

struct CellSummary {
  double value = 0.0;
  std::size_t replications_ok = 0;
  Estimate w2;           // mean and SE across replications
  Estimate noise_floor;
  std::optional<Estimate> drift_mse;
};

struct TrendCheck {
  std::string description;
  bool passed = true;
  std::vector<std::string> violations;
};

struct ResultsTable {
  std::vector<CellRow> rows;
  std::vector<CellSummary> cells;
  std::vector<RateFit> fits;
  std::optional<TrendCheck> trend;
  bool complete = true;

  std::string to_csv() const;
  nlohmann::json summary(const ExperimentPlan& plan) const;
};

// Runs every cell x replication, compares against ground truth, writes
// plan.json, cells.csv and summary.json into plan.output_dir (when set).
// Failing cells are recorded and do not stop the sweep.
ResultsTable run_experiment(const ExperimentPlan& plan);

struct ComparisonRow {
  std::string sampler;  // "sfs" or "ula"
  std::size_t replication = 0;
  bool ok = false;
  std::string error;
  double w2 = 0.0;
  double w2_se = 0.0;
  double noise_floor = 0.0;
  double mode_imbalance = 0.0;  // max_i |mass near mode i - w_i|; NaN if not a mixture
  double max_mean_z = 0.0;
  std::size_t budget = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  bool complete = true;

  std::string to_csv() const;
  nlohmann::json summary(const ExperimentPlan& plan) const;
};

// SFS against unadjusted Langevin at equal target-evaluation budgets, on
// the plan's base configuration. Descriptive only.
ComparisonTable compare_samplers(const ExperimentPlan& plan);

// Mean squared error of the Monte-Carlo drift against the exact drift
// over the probe grid, averaged over replications.
double drift_mse(const TargetSpec& target, DriftMode mode, std::size_t m,
                 const DriftErrorProbe& probe, std::uint64_t seed);

struct EstimatorCheck {
  DriftMode mode = DriftMode::kMcGrad;
  std::size_t points = 0;       // grid points x times
  double bias_rms = 0.0;        // RMS over the grid of (mean estimate - exact)
  double se_rms = 0.0;          // RMS over the grid of the standard errors
  double max_abs_z = 0.0;       // largest |bias| / SE at any grid point
  std::size_t points_over_4se = 0;
  bool within_4se = false;      // bias_rms <= 4 se_rms
};

struct DriftCheckReport {
  std::size_t mc_size = 0;
  std::size_t replications = 0;
  std::vector<EstimatorCheck> estimators;

  nlohmann::json to_json() const;
};

// Compares each available Monte-Carlo estimator with the exact drift on
// the probe grid. Each grid point gets `replications` independent batches;
// their spread gives the standard error.
DriftCheckReport drift_check(const TargetSpec& target, std::size_t m,
                             const ProbeGrid& grid, std::size_t replications,
                             std::uint64_t seed, unsigned threads = 1);

// Fraction of samples nearest to each mixture mean.
std::vector<double> mode_masses(const Samples& samples,
                                const GaussianMixture& mix);

}  // namespace sfs

#endif  // SFS_HARNESS_HPP_
