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
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "sfs/config.hpp"
#include "sfs/error.hpp"

namespace sfs {
namespace {

constexpr const char* kMixture = R"(
target:
  kind: mixture
  dim: 1
  weights: [0.5, 0.5]
  means: [[-2], [2]]
sampler:
  seed: 123
  steps: 1e2
  particles: 5000
  drift: mc_stein
  mc_size: 1e3
  eps: fixed:0.1
)";

TEST(Config, ParsesMixture) {
  const RunConfig c = parse_config(kMixture);
  EXPECT_EQ(c.target.kind, "mixture");
  ASSERT_EQ(c.target.means.size(), 2u);
  EXPECT_EQ(c.target.means[1][0], 2.0);
  EXPECT_EQ(c.sampler.seed, 123u);
  EXPECT_EQ(c.sampler.steps, 100u);
  EXPECT_EQ(c.sampler.mc_size, 1000u);
  EXPECT_EQ(c.sampler.drift, DriftMode::kMcStein);
  EXPECT_EQ(c.sampler.eps.rule, EpsSchedule::Rule::kFixed);
  EXPECT_FALSE(c.experiment);
  const TargetSpec t = build_target(c.target);
  EXPECT_EQ(t.dim(), 1u);
  EXPECT_TRUE(t.mixture());
}

TEST(Config, EmitIsFixedPoint) {
  const RunConfig c = parse_config(kMixture);
  const std::string once = emit_config(c);
  const std::string twice = emit_config(parse_config(once));
  EXPECT_EQ(once, twice);
}

TEST(Config, RoundTripPreservesRandomConfigs) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> count(1, 100000);
  for (int trial = 0; trial < 25; ++trial) {
    RunConfig c;
    c.target.kind = "gaussian";
    c.target.dim = 3;
    c.target.mean = {u(gen), u(gen) * 1e-7, u(gen) * 1e9};
    c.target.log_scale = u(gen);
    c.target.regularity = TargetRegularity{std::abs(u(gen)) + 1.0, 0.1, std::nullopt};
    c.sampler.seed = gen();
    c.sampler.steps = count(gen);
    c.sampler.particles = count(gen);
    c.sampler.mc_size = count(gen);
    c.sampler.eps = EpsSchedule::fixed(1.0 / (2.0 + trial));
    c.probe.lo = -std::abs(u(gen)) - 0.1;
    c.langevin.step = 1.0 / 3.0;
    ExperimentSettings e;
    e.axis = "steps";
    e.values = {10, 20, 40};
    c.experiment = e;
    const RunConfig back = parse_config(emit_config(c));
    EXPECT_EQ(back.target.mean, c.target.mean);
    EXPECT_EQ(back.target.log_scale, c.target.log_scale);
    EXPECT_EQ(back.target.regularity->gamma, c.target.regularity->gamma);
    EXPECT_EQ(back.sampler.seed, c.sampler.seed);
    EXPECT_EQ(back.sampler.steps, c.sampler.steps);
    EXPECT_EQ(back.sampler.mc_size, c.sampler.mc_size);
    EXPECT_EQ(back.sampler.eps.value, c.sampler.eps.value);
    EXPECT_EQ(back.probe.lo, c.probe.lo);
    EXPECT_EQ(back.langevin.step, c.langevin.step);
    ASSERT_TRUE(back.experiment);
    EXPECT_EQ(back.experiment->values, e.values);
  }
}

TEST(Config, SeedIsMandatory) {
  EXPECT_THROW(parse_config("target: {kind: standard}\nsampler: {steps: 10}\n"), ConfigError);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_config("target: {kind: standard, colour: red}\nsampler: {seed: 1}\n"),
               ConfigError);
  EXPECT_THROW(parse_config("target: {kind: standard}\nsampler: {seed: 1}\nextra: 3\n"),
               ConfigError);
}

TEST(Config, MalformedValues) {
  EXPECT_THROW(parse_config("target: {kind: standard}\nsampler: {seed: 1, steps: -3}\n"),
               ConfigError);
  EXPECT_THROW(parse_config("target: {kind: standard}\nsampler: {seed: 1, drift: fast}\n"),
               ConfigError);
  EXPECT_THROW(parse_config("target: {kind: standard}\nsampler: {seed: 1, eps: often}\n"),
               ConfigError);
  EXPECT_THROW(parse_config("target: [1, 2]\nsampler: {seed: 1}\n"), ConfigError);
  EXPECT_THROW(parse_config("target: {kind: standard\n"), ConfigError);
}

TEST(Config, UnknownTargetKind) {
  const RunConfig c = parse_config("target: {kind: banana}\nsampler: {seed: 1}\n");
  EXPECT_THROW(build_target(c.target), UnknownTargetError);
}

TEST(Config, DimensionMismatch) {
  const RunConfig c = parse_config("target: {kind: gaussian, dim: 2, mean: [1]}\nsampler: {seed: 1}\n");
  EXPECT_THROW(build_target(c.target), DomainError);
}

TEST(Config, WithDimReshapesTargets) {
  TargetConfig t;
  t.kind = "mixture";
  t.dim = 1;
  t.weights = {0.5, 0.5};
  t.means = {{-2.0}, {2.0}};
  const TargetSpec spec = build_target(with_dim(t, 3));
  EXPECT_EQ(spec.dim(), 3u);
}

TEST(Config, LogScaleAndRegularityApplied) {
  const RunConfig c = parse_config(
      "target: {kind: standard, log_scale: 2.5, regularity: {gamma: 1, xi: 0.5}}\n"
      "sampler: {seed: 1}\n");
  const TargetSpec t = build_target(c.target);
  EXPECT_DOUBLE_EQ(t.log_scale(), 2.5);
  ASSERT_TRUE(t.regularity());
  EXPECT_DOUBLE_EQ(t.regularity()->drift_bound(), 2.0);
}

TEST(Config, MissingFileNamesPath) {
  try {
    load_config("/nonexistent/dir/run.yaml");
    FAIL() << "expected an io error";
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent/dir/run.yaml");
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/run.yaml"), std::string::npos);
  }
}

}  // namespace
}  // namespace sfs
