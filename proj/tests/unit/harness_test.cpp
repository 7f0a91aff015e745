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
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sfs/error.hpp"
#include "sfs/harness.hpp"

namespace sfs {
namespace {

namespace fs = std::filesystem;

TargetConfig mixture_target() {
  TargetConfig t;
  t.kind = "mixture";
  t.dim = 1;
  t.weights = {0.5, 0.5};
  t.means = {{-2.0}, {2.0}};
  return t;
}

ExperimentPlan small_plan(SweepAxis axis, std::vector<double> values) {
  ExperimentPlan plan;
  plan.target = mixture_target();
  plan.axis = axis;
  plan.values = std::move(values);
  plan.replications = 3;
  plan.base.steps = 20;
  plan.base.particles = 400;
  plan.base.mc_size = 50;
  plan.base.seed = 2026;
  plan.base.threads = 1;
  plan.projections = 8;
  plan.drift_probe.points = 5;
  plan.drift_probe.replications = 2;
  return plan;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Plan, RejectsDegenerateSweeps) {
  ExperimentPlan plan = small_plan(SweepAxis::kSteps, {10, 20});
  EXPECT_THROW(plan.validate(), DomainError);
  plan.values = {10, 20, 40};
  plan.replications = 2;
  EXPECT_THROW(plan.validate(), DomainError);
  plan.replications = 3;
  plan.values = {10, 10, 40};
  EXPECT_THROW(plan.validate(), DomainError);
  plan.values = {10, 2.5, 40};
  EXPECT_THROW(plan.validate(), DomainError);
  plan.values = {10, 20, 40};
  EXPECT_NO_THROW(plan.validate());
}

TEST(Plan, AxisSpecificRules) {
  ExperimentPlan mc = small_plan(SweepAxis::kMcSize, {10, 100, 1000});
  mc.base.drift = DriftMode::kExact;
  EXPECT_THROW(mc.validate(), DomainError);
  ExperimentPlan eps = small_plan(SweepAxis::kEps, {0.1, 0.2, 0.4});
  eps.base.eps = EpsSchedule::log_rule();
  EXPECT_THROW(eps.validate(), DomainError);
  eps.base.eps = EpsSchedule::none();
  EXPECT_NO_THROW(eps.validate());
  eps.values = {0.1, 0.2, 1.5};
  EXPECT_THROW(eps.validate(), DomainError);
  EXPECT_THROW(parse_sweep_axis("temperature"), ConfigError);
}

TEST(Plan, CellConfigsFollowAxis) {
  const ExperimentPlan steps = small_plan(SweepAxis::kSteps, {10, 40, 160});
  EXPECT_EQ(steps.cell_config(2).steps, 160u);
  const ExperimentPlan dim = small_plan(SweepAxis::kDim, {1, 2, 4});
  EXPECT_EQ(dim.cell_target(2).dim, 4u);
  EXPECT_EQ(dim.cell_target(2).means[0].size(), 4u);
  const ExperimentPlan eps = small_plan(SweepAxis::kEps, {0.1, 0.2, 0.4});
  EXPECT_EQ(*eps.cell_config(1).eps.resolve(1), 0.2);
}

TEST(Plan, MatchedBudget) {
  ExperimentPlan plan = small_plan(SweepAxis::kSteps, {});
  EXPECT_EQ(plan.sfs_budget(), 20u * 50u);
  EXPECT_EQ(plan.langevin_iterations(), 1000u);
  plan.langevin.iterations = 999;
  EXPECT_THROW(plan.validate_comparison(), DomainError);
  plan.langevin.iterations = 1000;
  EXPECT_NO_THROW(plan.validate_comparison());
  plan.base.drift = DriftMode::kExact;
  EXPECT_EQ(plan.sfs_budget(), 20u);
}

TEST(Experiment, StepsSweepProducesTable) {
  const ExperimentPlan plan = small_plan(SweepAxis::kSteps, {5, 10, 20});
  const ResultsTable table = run_experiment(plan);
  EXPECT_TRUE(table.complete);
  ASSERT_EQ(table.rows.size(), 9u);
  ASSERT_EQ(table.cells.size(), 3u);
  for (const CellSummary& c : table.cells) {
    EXPECT_EQ(c.replications_ok, 3u);
    EXPECT_GT(c.w2.value, 0.0);
    EXPECT_GT(c.noise_floor.value, 0.0);
    EXPECT_FALSE(c.drift_mse);
  }
  ASSERT_EQ(table.fits.size(), 1u);
  EXPECT_EQ(table.fits[0].parameter, "w2");
  ASSERT_TRUE(table.trend);
}

TEST(Experiment, McSweepFitsDriftError) {
  const ExperimentPlan plan = small_plan(SweepAxis::kMcSize, {10, 100, 1000});
  const ResultsTable table = run_experiment(plan);
  EXPECT_TRUE(table.complete);
  ASSERT_EQ(table.fits.size(), 2u);
  EXPECT_EQ(table.fits[1].parameter, "drift_mse");
  EXPECT_LT(table.fits[1].slope, -0.3);
  EXPECT_LT(table.cells[2].drift_mse->value, table.cells[0].drift_mse->value);
  EXPECT_TRUE(table.cells[0].drift_mse);
}

TEST(Experiment, DimSweepHasNoTrend) {
  ExperimentPlan plan = small_plan(SweepAxis::kDim, {1, 2, 3});
  plan.base.drift = DriftMode::kExact;
  const ResultsTable table = run_experiment(plan);
  EXPECT_TRUE(table.complete);
  EXPECT_FALSE(table.trend);
}

TEST(Experiment, ReproducibleAcrossThreads) {
  ExperimentPlan plan = small_plan(SweepAxis::kSteps, {5, 10, 20});
  plan.base.threads = 1;
  const std::string a = run_experiment(plan).to_csv();
  plan.base.threads = 4;
  const std::string b = run_experiment(plan).to_csv();
  EXPECT_EQ(a, b);
}

TEST(Experiment, FailingCellIsIsolated) {
  // Unregularized bump with one inner sample: the drift denominator
  // vanishes as soon as the single draw leaves the support.
  ExperimentPlan plan = small_plan(SweepAxis::kMcSize, {1, 2000, 4000});
  plan.target = TargetConfig{};
  plan.target.kind = "bump";
  plan.base.drift = DriftMode::kMcStein;
  plan.base.steps = 5;
  plan.base.particles = 100;
  const ResultsTable table = run_experiment(plan);
  EXPECT_FALSE(table.complete);
  EXPECT_EQ(table.cells[0].replications_ok, 0u);
  EXPECT_EQ(table.cells[1].replications_ok, 3u);
  EXPECT_EQ(table.cells[2].replications_ok, 3u);
  EXPECT_FALSE(table.rows[0].ok);
  EXPECT_NE(table.rows[0].error.find("drift denominator"), std::string::npos);
  EXPECT_NE(table.to_csv().find("failed"), std::string::npos);
}

TEST(Experiment, WritesArtifacts) {
  ExperimentPlan plan = small_plan(SweepAxis::kSteps, {5, 10, 20});
  plan.output_dir = fs::temp_directory_path() / "sfs_harness_artifacts";
  fs::remove_all(plan.output_dir);
  run_experiment(plan);
  EXPECT_TRUE(fs::exists(plan.output_dir / "plan.json"));
  EXPECT_TRUE(fs::exists(plan.output_dir / "cells.csv"));
  const nlohmann::json summary = nlohmann::json::parse(slurp(plan.output_dir / "summary.json"));
  EXPECT_EQ(summary["axis"], "steps");
  EXPECT_TRUE(summary["complete"].get<bool>());
  EXPECT_TRUE(summary.contains("trend"));
  fs::remove_all(plan.output_dir);
}

TEST(Compare, SfsAgainstLangevin) {
  ExperimentPlan plan = small_plan(SweepAxis::kSteps, {});
  plan.base.drift = DriftMode::kExact;
  plan.base.steps = 50;
  plan.langevin.step = 0.05;
  const ComparisonTable table = compare_samplers(plan);
  EXPECT_TRUE(table.complete);
  ASSERT_EQ(table.rows.size(), 6u);
  for (const ComparisonRow& r : table.rows) {
    EXPECT_EQ(r.budget, 50u);
    EXPECT_TRUE(std::isfinite(r.mode_imbalance));
  }
  const nlohmann::json s = table.summary(plan);
  EXPECT_EQ(s["samplers"]["sfs"]["replications_ok"], 3);
}

TEST(DriftCheck, BothEstimatorsWithinNoise) {
  ProbeGrid grid;
  grid.lo = -3.0;
  grid.hi = 3.0;
  grid.points_per_axis = 7;
  const TargetSpec t = TargetSpec::mixture({{0.5, 0.5}, {{-2.0}, {2.0}}});
  const DriftCheckReport r = drift_check(t, 2000, grid, 16, 5);
  ASSERT_EQ(r.estimators.size(), 2u);
  for (const EstimatorCheck& e : r.estimators) {
    EXPECT_EQ(e.points, 35u);
    EXPECT_TRUE(e.within_4se);
    EXPECT_GT(e.se_rms, 0.0);
  }
  EXPECT_EQ(r.to_json()["estimators"][1]["mode"], "mc_stein");
}

TEST(DriftCheck, RequiresMixture) {
  EXPECT_THROW(drift_check(TargetSpec::bump(1), 10, ProbeGrid{}, 4, 0), UnsupportedError);
}

TEST(DriftMse, DecreasesWithSampleSize) {
  const TargetSpec t = TargetSpec::mixture({{0.5, 0.5}, {{-2.0}, {2.0}}});
  DriftErrorProbe probe;
  probe.replications = 8;
  const double small = drift_mse(t, DriftMode::kMcGrad, 10, probe, 1);
  const double large = drift_mse(t, DriftMode::kMcGrad, 1000, probe, 1);
  EXPECT_LT(large, small / 10.0);
}

TEST(ModeMasses, NearestMeanAssignment) {
  Samples s(4, 1);
  s.values = {-3.0, -0.1, 0.2, 5.0};
  const std::vector<double> m = mode_masses(s, {{0.5, 0.5}, {{-2.0}, {2.0}}});
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], 0.5);
}

}  // namespace
}  // namespace sfs
