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

#include "sfs/sampler.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/format.hpp"
#include "sfs/parallel.hpp"

namespace sfs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Applies the eps schedule and builds the drift evaluator for a run.
struct RunSetup {
  TargetSpec target;
  DriftEvaluator drift;
  double epsilon;
};

RunSetup prepare(const SamplerConfig& config, const TargetSpec& base) {
  const std::optional<double> eps = config.eps.resolve(config.mc_size);
  TargetSpec target = eps ? regularize(base, *eps) : base;
  DriftEvaluator drift =
      config.drift ? DriftEvaluator(target, *config.drift, config.mc_size,
                                    config.seed)
                   : DriftEvaluator::monte_carlo(target, config.mc_size,
                                                 config.seed);
  return {std::move(target), std::move(drift), eps.value_or(0.0)};
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

SampleBatch run_sfs(const SamplerConfig& config, const TargetSpec& base) {
  config.validate();
  const auto start = Clock::now();
  const RunSetup setup = prepare(config, base);
  const std::size_t n = config.particles;
  const std::size_t p = base.dim();
  const std::size_t K = config.steps;
  const double s = 1.0 / static_cast<double>(K);
  const double sqrt_s = std::sqrt(s);

  SampleBatch batch;
  batch.samples = Samples(n, p);
  batch.seed = config.seed;
  batch.epsilon = setup.epsilon;
  batch.drift_mode = setup.drift.mode();
  batch.steps = K;
  batch.config_digest = config_digest(config, base);
  if (config.record_trajectory) {
    batch.trajectories.emplace(n * (K + 1) * p, 0.0);
  }

  parallel_for(n, config.threads, [&](std::size_t i) {
    const auto particle = static_cast<std::uint32_t>(i);
    std::vector<double> y(p, 0.0), b(p), noise(p);
    double* path = batch.trajectories
                       ? batch.trajectories->data() + i * (K + 1) * p
                       : nullptr;
    for (std::size_t k = 0; k < K; ++k) {
      const auto step = static_cast<std::uint32_t>(k);
      const double t = static_cast<double>(k) / static_cast<double>(K);
      setup.drift.evaluate(y, t, step, particle, b);
      Stream stream(config.seed, StreamRole::kIncrement, step, particle);
      fill_standard_normal(stream, noise);
      for (std::size_t c = 0; c < p; ++c) y[c] += s * b[c] + sqrt_s * noise[c];
      if (!all_finite(y)) {
        std::ostringstream msg;
        msg << "particle " << i << " left the reals at step " << k + 1;
        throw NonFiniteStateError(msg.str(), static_cast<long>(k + 1),
                                  static_cast<long>(i));
      }
      if (path) std::copy(y.begin(), y.end(), path + (k + 1) * p);
    }
    std::copy(y.begin(), y.end(), batch.samples.row(i).begin());
  });

  batch.wallclock_seconds = seconds_since(start);
  return batch;
}

}  // namespace

EpsSchedule EpsSchedule::parse(const std::string& text) {
  if (text == "none") return none();
  if (text == "log") return log_rule();
  if (text == "power") return power_rule();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string number = text.substr(6);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size()) {
      throw DomainError("bad eps value in '" + text + "'");
    }
    if (!(v > 0.0 && v < 1.0)) throw DomainError("fixed eps must lie in (0, 1)");
    return fixed(v);
  }
  throw DomainError("unknown eps rule '" + text +
                    "' (expected none, fixed:<v>, log or power)");
}

std::string EpsSchedule::to_string() const {
  switch (rule) {
    case Rule::kNone: return "none";
    case Rule::kFixed: return "fixed:" + format_double(value);
    case Rule::kLog: return "log";
    case Rule::kPower: return "power";
  }
  return "none";
}

std::optional<double> EpsSchedule::resolve(std::size_t m) const {
  double eps = 0.0;
  const double md = static_cast<double>(m);
  switch (rule) {
    case Rule::kNone: return std::nullopt;
    case Rule::kFixed: eps = value; break;
    case Rule::kLog: eps = std::pow(std::log(md), -0.2); break;
    case Rule::kPower: eps = std::pow(md, -0.2); break;
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream msg;
    msg << "eps rule '" << to_string() << "' gives eps=" << eps << " for m="
        << m << "; it must lie in (0, 1)";
    throw DomainError(msg.str());
  }
  return eps;
}

void SamplerConfig::validate() const {
  if (steps < 1) throw DomainError("steps K must be >= 1");
  if (particles < 1) throw DomainError("particles n must be >= 1");
  if (mc_size < 1) throw DomainError("mc_size m must be >= 1");
  if (steps > 0xffffffffull || particles > 0xffffffffull) {
    throw DomainError("steps and particles must fit in 32 bits");
  }
  eps.resolve(mc_size);
}

std::string SamplerConfig::canonical() const {
  std::ostringstream out;
  out << "steps=" << steps << ";particles=" << particles
      << ";drift=" << (drift ? to_string(*drift) : "auto")
      << ";mc_size=" << mc_size << ";eps=" << eps.to_string()
      << ";seed=" << seed;
  return out.str();
}

std::span<const double> SampleBatch::state(std::size_t particle,
                                           std::size_t step) const {
  if (!trajectories) throw DomainError("batch has no recorded trajectories");
  const std::size_t p = samples.dim;
  return {trajectories->data() + (particle * (steps + 1) + step) * p, p};
}

std::string config_digest(const SamplerConfig& config,
                          const TargetSpec& target) {
  return hex64(fnv1a(config.canonical() + "|" + target.describe()));
}

SampleBatch sfs_run(const SamplerConfig& config, const TargetSpec& target) {
  return run_sfs(config, target);
}

SampleBatch sfs_trajectory(SamplerConfig config, const TargetSpec& target) {
  config.record_trajectory = true;
  const double bytes = static_cast<double>(config.particles) *
                       static_cast<double>(config.steps + 1) *
                       static_cast<double>(target.dim()) * sizeof(double);
  if (bytes > static_cast<double>(config.trajectory_budget_bytes)) {
    std::ostringstream msg;
    msg << "trajectory needs " << bytes << " bytes, over the budget of "
        << config.trajectory_budget_bytes;
    throw DomainError(msg.str());
  }
  return run_sfs(config, target);
}

SampleBatch ula_run(const SamplerConfig& config, const TargetSpec& base,
                    double step, std::size_t iterations) {
  config.validate();
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw DomainError("Langevin step must be positive");
  }
  if (iterations < 1) throw DomainError("Langevin needs >= 1 iteration");
  if (!base.has_gradient()) {
    throw UnsupportedError("Langevin needs grad log f; target '" +
                           base.name() + "' has none");
  }
  const auto start = Clock::now();
  const std::optional<double> eps = config.eps.resolve(config.mc_size);
  const TargetSpec target = eps ? regularize(base, *eps) : base;
  const std::size_t n = config.particles;
  const std::size_t p = target.dim();
  const double noise_scale = std::sqrt(2.0 * step);

  SampleBatch batch;
  batch.samples = Samples(n, p);
  batch.seed = config.seed;
  batch.epsilon = eps.value_or(0.0);
  batch.steps = iterations;
  batch.config_digest =
      hex64(fnv1a(config.canonical() + ";ula_step=" + format_double(step) +
                  ";ula_iterations=" + std::to_string(iterations) + "|" +
                  base.describe()));

  parallel_for(n, config.threads, [&](std::size_t i) {
    std::vector<double> x(p, 0.0), grad(p), noise(p);
    for (std::size_t k = 0; k < iterations; ++k) {
      target.model().log_ratio_grad(x, grad);
      Stream stream(config.seed, StreamRole::kLangevin,
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i));
      fill_standard_normal(stream, noise);
      // grad log pi = grad log f - x for pi = f * N(0, I).
      for (std::size_t c = 0; c < p; ++c) {
        x[c] += step * (grad[c] - x[c]) + noise_scale * noise[c];
      }
      if (!all_finite(x)) {
        std::ostringstream msg;
        msg << "Langevin chain " << i << " left the reals at iteration "
            << k + 1;
        throw NonFiniteStateError(msg.str(), static_cast<long>(k + 1),
                                  static_cast<long>(i));
      }
    }
    std::copy(x.begin(), x.end(), batch.samples.row(i).begin());
  });
  batch.wallclock_seconds = seconds_since(start);
  return batch;
}

}  // namespace sfs
