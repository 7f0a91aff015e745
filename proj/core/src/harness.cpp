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

#include "sfs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/format.hpp"
#include "sfs/io.hpp"
#include "sfs/parallel.hpp"
#include "sfs/rng.hpp"

namespace sfs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

Estimate mean_se(const std::vector<double>& v) {
  if (v.empty()) return {kNaN, kNaN};
  const double k = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / k;
  if (v.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (k - 1.0) / k)};
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

bool is_count(double v) { return v >= 1.0 && v == std::floor(v) && v < 4.0e9; }

double max_mean_z(const Samples& samples, const TargetSpec& target) {
  if (!target.moments() || samples.n < 2) return kNaN;
  const MomentReport m = moment_report(samples, target);
  double z = 0.0;
  for (const CoordinateMoments& c : m.coordinates) {
    z = std::max(z, std::abs(c.mean_error) / c.mean_se);
  }
  return z;
}

// W2 of `batch` against a fresh ground-truth batch, and the noise floor
// between two independent ground-truth batches of the same size.
std::pair<Estimate, Estimate> w2_against_truth(const Samples& batch,
                                               const TargetSpec& target,
                                               std::uint64_t seed,
                                               std::size_t projections) {
  const Samples truth = sample_ground_truth(
      target, batch.n, derive_seed(seed, StreamRole::kGroundTruth, 1), 1);
  const Samples other = sample_ground_truth(
      target, batch.n, derive_seed(seed, StreamRole::kGroundTruth, 2), 1);
  return {w2_distance(batch, truth, projections, seed),
          w2_distance(truth, other, projections, seed)};
}

}  // namespace

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSteps: return "steps";
    case SweepAxis::kMcSize: return "mc_size";
    case SweepAxis::kDim: return "dim";
    case SweepAxis::kEps: return "eps";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "steps") return SweepAxis::kSteps;
  if (text == "mc_size") return SweepAxis::kMcSize;
  if (text == "dim") return SweepAxis::kDim;
  if (text == "eps") return SweepAxis::kEps;
  throw ConfigError("unknown sweep axis '" + text +
                    "' (expected steps, mc_size, dim or eps)");
}

ExperimentPlan ExperimentPlan::from_config(const RunConfig& config,
                                           std::filesystem::path output_dir) {
  ExperimentPlan plan;
  plan.target = config.target;
  plan.base = config.sampler;
  plan.projections = config.projections;
  plan.langevin = config.langevin;
  plan.output_dir = std::move(output_dir);
  if (config.experiment) {
    plan.axis = parse_sweep_axis(config.experiment->axis);
    plan.values = config.experiment->values;
    plan.replications = config.experiment->replications;
    plan.drift_probe = config.experiment->drift_probe;
  }
  return plan;
}

void ExperimentPlan::validate() const {
  base.validate();
  if (values.size() < 3) {
    throw DomainError("a sweep needs at least 3 cells for rate fitting");
  }
  if (replications < 3) throw DomainError("a sweep needs at least 3 replications");
  if (projections < 1) throw DomainError("projections must be >= 1");
  const std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() != values.size()) throw DomainError("sweep values must be distinct");
  for (double v : values) {
    if (axis == SweepAxis::kEps) {
      if (!(v > 0.0 && v < 1.0)) throw DomainError("eps sweep values must lie in (0, 1)");
    } else if (!is_count(v)) {
      throw DomainError(std::string(to_string(axis)) +
                        " sweep values must be positive integers");
    }
  }
  if (axis == SweepAxis::kMcSize && base.drift == DriftMode::kExact) {
    throw DomainError("an mc_size sweep needs a Monte-Carlo drift");
  }
  if (axis == SweepAxis::kEps && base.eps.rule != EpsSchedule::Rule::kNone) {
    throw DomainError("an eps sweep sets eps itself; use eps: none in the base config");
  }
  for (std::size_t c = 0; c < values.size(); ++c) {
    cell_config(c).validate();
    build_target(cell_target(c));
  }
}

void ExperimentPlan::validate_comparison() const {
  base.validate();
  if (replications < 3) throw DomainError("a comparison needs at least 3 replications");
  if (!(langevin.step > 0.0)) throw DomainError("Langevin step must be positive");
  if (langevin.iterations != 0 && langevin.iterations != sfs_budget()) {
    std::ostringstream msg;
    msg << "budget mismatch: SFS uses " << sfs_budget()
        << " target evaluations per particle but langevin.iterations is "
        << langevin.iterations;
    throw DomainError(msg.str());
  }
  const TargetSpec spec = build_target(target);
  if (!spec.has_ground_truth()) {
    throw UnsupportedError("comparison needs a target with a ground-truth sampler");
  }
}

SamplerConfig ExperimentPlan::cell_config(std::size_t cell) const {
  SamplerConfig c = base;
  const double v = values.at(cell);
  switch (axis) {
    case SweepAxis::kSteps: c.steps = static_cast<std::size_t>(v); break;
    case SweepAxis::kMcSize: c.mc_size = static_cast<std::size_t>(v); break;
    case SweepAxis::kDim: break;
    case SweepAxis::kEps: c.eps = EpsSchedule::fixed(v); break;
  }
  return c;
}

TargetConfig ExperimentPlan::cell_target(std::size_t cell) const {
  if (axis == SweepAxis::kDim) {
    return with_dim(target, static_cast<std::size_t>(values.at(cell)));
  }
  return target;
}

std::size_t ExperimentPlan::sfs_budget() const {
  const bool exact = base.drift == DriftMode::kExact;
  return base.steps * (exact ? 1 : base.mc_size);
}

std::size_t ExperimentPlan::langevin_iterations() const {
  return langevin.iterations ? langevin.iterations : sfs_budget();
}

nlohmann::json ExperimentPlan::to_json() const {
  RunConfig echo;
  echo.target = target;
  echo.sampler = base;
  echo.langevin = langevin;
  echo.projections = projections;
  echo.experiment = ExperimentSettings{to_string(axis), values, replications,
                                       drift_probe};
  return {{"axis", to_string(axis)},
          {"values", values},
          {"replications", replications},
          {"sampler", base.canonical()},
          {"projections", projections},
          {"langevin", {{"step", langevin.step},
                        {"iterations", langevin_iterations()}}},
          {"sfs_budget", sfs_budget()},
          {"config_yaml", emit_config(echo)}};
}

double drift_mse(const TargetSpec& target, DriftMode mode, std::size_t m,
                 const DriftErrorProbe& probe, std::uint64_t seed) {
  if (!target.mixture()) {
    throw UnsupportedError("drift error needs the exact drift of a mixture target");
  }
  if (probe.points < 1 || probe.replications < 1 || probe.times.empty()) {
    throw DomainError("drift probe needs points, times and replications");
  }
  const std::size_t p = target.dim();
  double total = 0.0;
  std::size_t count = 0;
  Vector x(p, 0.0);
  for (std::size_t r = 0; r < probe.replications; ++r) {
    const DriftEvaluator ev(target, mode, m,
                            derive_seed(seed, StreamRole::kReplication,
                                        static_cast<std::uint32_t>(r)));
    for (std::size_t i = 0; i < probe.points; ++i) {
      x[0] = probe.points == 1
                 ? probe.lo
                 : probe.lo + (probe.hi - probe.lo) * static_cast<double>(i) /
                                  static_cast<double>(probe.points - 1);
      for (std::size_t k = 0; k < probe.times.size(); ++k) {
        const double t = probe.times[k];
        const Vector est = ev(x, t, static_cast<std::uint32_t>(k),
                              static_cast<std::uint32_t>(i));
        const Vector exact = drift_exact(target, x, t);
        for (std::size_t c = 0; c < p; ++c) {
          total += (est[c] - exact[c]) * (est[c] - exact[c]);
        }
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

nlohmann::json DriftCheckReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const EstimatorCheck& e : estimators) {
    list.push_back({{"mode", to_string(e.mode)},
                    {"points", e.points},
                    {"bias_rms", e.bias_rms},
                    {"se_rms", e.se_rms},
                    {"max_abs_z", e.max_abs_z},
                    {"points_over_4se", e.points_over_4se},
                    {"within_4se", e.within_4se}});
  }
  return {{"mc_size", mc_size},
          {"replications", replications},
          {"estimators", std::move(list)}};
}

DriftCheckReport drift_check(const TargetSpec& target, std::size_t m,
                             const ProbeGrid& grid, std::size_t replications,
                             std::uint64_t seed, unsigned threads) {
  if (!target.mixture()) {
    throw UnsupportedError("drift-check needs the exact drift of a mixture target");
  }
  if (replications < 2) throw DomainError("drift-check needs >= 2 replications");
  for (double t : grid.times) {
    if (!(t < 1.0)) throw DomainError("drift-check times must be < 1");
  }
  const Samples points = grid.points(target.dim(), seed);
  const std::size_t nt = grid.times.size();
  const std::size_t count = points.n * nt;
  const std::size_t p = target.dim();

  DriftCheckReport report;
  report.mc_size = m;
  report.replications = replications;
  std::vector<DriftMode> modes;
  if (target.has_gradient()) modes.push_back(DriftMode::kMcGrad);
  modes.push_back(DriftMode::kMcStein);

  for (DriftMode mode : modes) {
    std::vector<DriftEvaluator> evs;
    for (std::size_t r = 0; r < replications; ++r) {
      evs.emplace_back(target, mode, m,
                       derive_seed(seed, StreamRole::kReplication,
                                   static_cast<std::uint32_t>(r)));
    }
    // Per grid point and coordinate: squared bias and squared SE.
    std::vector<double> bias2(count * p), se2(count * p);
    parallel_for(count, threads, [&](std::size_t k) {
      const auto x = points.row(k / nt);
      const double t = grid.times[k % nt];
      const Vector exact = drift_exact(target, x, t);
      std::vector<double> sum(p, 0.0), sumsq(p, 0.0);
      for (const DriftEvaluator& ev : evs) {
        const Vector b = ev(x, t, static_cast<std::uint32_t>(k % nt),
                            static_cast<std::uint32_t>(k / nt));
        for (std::size_t c = 0; c < p; ++c) {
          sum[c] += b[c];
          sumsq[c] += b[c] * b[c];
        }
      }
      const double r = static_cast<double>(replications);
      for (std::size_t c = 0; c < p; ++c) {
        const double mean = sum[c] / r;
        const double var = std::max(0.0, (sumsq[c] - r * mean * mean) / (r - 1.0));
        bias2[k * p + c] = (mean - exact[c]) * (mean - exact[c]);
        se2[k * p + c] = var / r;
      }
    });
    EstimatorCheck check;
    check.mode = mode;
    check.points = count;
    double b_sum = 0.0, s_sum = 0.0;
    for (std::size_t i = 0; i < bias2.size(); ++i) {
      b_sum += bias2[i];
      s_sum += se2[i];
      const double z = se2[i] > 0.0 ? std::sqrt(bias2[i] / se2[i])
                                    : (bias2[i] > 0.0 ? kInf : 0.0);
      check.max_abs_z = std::max(check.max_abs_z, z);
      if (z > 4.0) ++check.points_over_4se;
    }
    check.bias_rms = std::sqrt(b_sum / static_cast<double>(bias2.size()));
    check.se_rms = std::sqrt(s_sum / static_cast<double>(se2.size()));
    check.within_4se = check.bias_rms <= 4.0 * check.se_rms;
    report.estimators.push_back(check);
  }
  return report;
}

std::vector<double> mode_masses(const Samples& samples,
                                const GaussianMixture& mix) {
  std::vector<double> mass(mix.size(), 0.0);
  for (std::size_t i = 0; i < samples.n; ++i) {
    const auto y = samples.row(i);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mix.size(); ++k) {
      double d = 0.0;
      for (std::size_t c = 0; c < y.size(); ++c) {
        d += (y[c] - mix.means[k][c]) * (y[c] - mix.means[k][c]);
      }
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    mass[best] += 1.0;
  }
  for (double& v : mass) v /= static_cast<double>(samples.n);
  return mass;
}

std::string ResultsTable::to_csv() const {
  std::ostringstream out;
  out << "cell,value,replication,status,w2,w2_se,noise_floor,drift_mse,"
         "max_mean_z,error\n";
  for (const CellRow& r : rows) {
    out << r.cell << ',' << format_double(r.value) << ',' << r.replication
        << ',' << (r.ok ? "ok" : "failed") << ',' << format_double(r.w2) << ','
        << format_double(r.w2_se) << ',' << format_double(r.noise_floor) << ','
        << format_double(r.drift_mse) << ',' << format_double(r.max_mean_z)
        << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

nlohmann::json ResultsTable::summary(const ExperimentPlan& plan) const {
  nlohmann::json cells_json = nlohmann::json::array();
  for (const CellSummary& c : cells) {
    nlohmann::json j = {{"value", c.value},
                        {"replications_ok", c.replications_ok},
                        {"w2", c.w2},
                        {"noise_floor", c.noise_floor}};
    if (c.drift_mse) j["drift_mse"] = *c.drift_mse;
    cells_json.push_back(std::move(j));
  }
  nlohmann::json j = {{"axis", to_string(plan.axis)},
                      {"replications", plan.replications},
                      {"complete", complete},
                      {"cells", std::move(cells_json)},
                      {"fits", fits}};
  if (trend) {
    nlohmann::json floors = nlohmann::json::array();
    for (const CellSummary& c : cells) floors.push_back(c.noise_floor);
    j["trend"] = {{"description", trend->description},
                  {"passed", trend->passed},
                  {"violations", trend->violations},
                  {"tolerance", "2 * sqrt(se_a^2 + se_b^2)"},
                  {"noise_floor", std::move(floors)}};
  }
  return j;
}

ResultsTable run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t cells = plan.values.size();
  const std::size_t reps = plan.replications;
  ResultsTable table;
  table.rows.resize(cells * reps);
  std::vector<double> cell_drift_mse(cells, kNaN);

  parallel_for(cells * reps, plan.base.threads, [&](std::size_t job) {
    const std::size_t cell = job / reps, rep = job % reps;
    CellRow& row = table.rows[job];
    row.cell = cell;
    row.value = plan.values[cell];
    row.replication = rep;
    row.drift_mse = kNaN;
    try {
      const std::uint64_t seed = derive_seed(
          plan.base.seed, StreamRole::kReplication,
          static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(rep));
      SamplerConfig config = plan.cell_config(cell);
      config.seed = seed;
      config.threads = 1;
      const TargetSpec target = build_target(plan.cell_target(cell));
      const SampleBatch batch = sfs_run(config, target);
      const auto [w2, floor] =
          w2_against_truth(batch.samples, target, seed, plan.projections);
      row.w2 = w2.value;
      row.w2_se = w2.se;
      row.noise_floor = floor.value;
      row.max_mean_z = max_mean_z(batch.samples, target);
      if (plan.axis == SweepAxis::kMcSize && rep == 0) {
        const auto eps = config.eps.resolve(config.mc_size);
        const TargetSpec sampled = eps ? regularize(target, *eps) : target;
        if (sampled.mixture()) {
          const DriftMode mode =
              config.drift.value_or(sampled.has_gradient() ? DriftMode::kMcGrad
                                                           : DriftMode::kMcStein);
          row.drift_mse =
              drift_mse(sampled, mode, config.mc_size, plan.drift_probe, seed);
        }
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  for (std::size_t cell = 0; cell < cells; ++cell) {
    CellSummary s;
    s.value = plan.values[cell];
    std::vector<double> w2, floors;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const CellRow& r = table.rows[cell * reps + rep];
      if (!r.ok) {
        table.complete = false;
        continue;
      }
      w2.push_back(r.w2);
      floors.push_back(r.noise_floor);
      if (!std::isnan(r.drift_mse)) s.drift_mse = Estimate{r.drift_mse, kNaN};
    }
    s.replications_ok = w2.size();
    s.w2 = mean_se(w2);
    s.noise_floor = mean_se(floors);
    table.cells.push_back(s);
  }

  auto fit_column = [&](const char* name, auto get) {
    std::vector<std::pair<double, double>> pts;
    for (const CellSummary& c : table.cells) {
      const double y = get(c);
      if (c.replications_ok > 0 && y > 0.0 && std::isfinite(y)) {
        pts.emplace_back(c.value, y);
      }
    }
    if (pts.size() >= 3) {
      try {
        table.fits.push_back(fit_rate(pts, name));
      } catch (const DomainError&) {
      }
    }
  };
  fit_column("w2", [](const CellSummary& c) { return c.w2.value; });
  if (plan.axis == SweepAxis::kMcSize) {
    fit_column("drift_mse", [](const CellSummary& c) {
      return c.drift_mse ? c.drift_mse->value : kNaN;
    });
  }

  if (plan.axis != SweepAxis::kDim) {
    // Error should not grow as K or m grow, or as eps shrinks.
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), 0);
    const bool descending = plan.axis == SweepAxis::kEps;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return descending ? plan.values[a] > plan.values[b]
                        : plan.values[a] < plan.values[b];
    });
    TrendCheck trend;
    trend.description = std::string("w2 non-increasing along ") +
                        to_string(plan.axis) +
                        (descending ? " (decreasing)" : " (increasing)");
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const CellSummary& a = table.cells[order[i]];
      const CellSummary& b = table.cells[order[i + 1]];
      if (a.replications_ok == 0 || b.replications_ok == 0) continue;
      const double tol = 2.0 * std::hypot(a.w2.se, b.w2.se);
      if (!(b.w2.value <= a.w2.value + tol)) {
        trend.passed = false;
        std::ostringstream msg;
        msg << "w2(" << format_double(b.value) << ")=" << b.w2.value
            << " > w2(" << format_double(a.value) << ")=" << a.w2.value
            << " + " << tol;
        trend.violations.push_back(msg.str());
      }
    }
    table.trend = trend;
  }

  if (!plan.output_dir.empty()) {
    write_json(plan.output_dir / "plan.json", plan.to_json());
    write_text(plan.output_dir / "cells.csv", table.to_csv());
    write_json(plan.output_dir / "summary.json", table.summary(plan));
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream out;
  out << "sampler,replication,status,budget,w2,w2_se,noise_floor,"
         "mode_imbalance,max_mean_z,error\n";
  for (const ComparisonRow& r : rows) {
    out << r.sampler << ',' << r.replication << ',' << (r.ok ? "ok" : "failed")
        << ',' << r.budget << ',' << format_double(r.w2) << ','
        << format_double(r.w2_se) << ',' << format_double(r.noise_floor) << ','
        << format_double(r.mode_imbalance) << ',' << format_double(r.max_mean_z)
        << ',' << csv_field(r.error) << '\n';
  }
  return out.str();
}

nlohmann::json ComparisonTable::summary(const ExperimentPlan& plan) const {
  nlohmann::json samplers = nlohmann::json::object();
  for (const char* name : {"sfs", "ula"}) {
    std::vector<double> w2, floors, imbalance, z;
    for (const ComparisonRow& r : rows) {
      if (r.sampler != name || !r.ok) continue;
      w2.push_back(r.w2);
      floors.push_back(r.noise_floor);
      if (!std::isnan(r.mode_imbalance)) imbalance.push_back(r.mode_imbalance);
      if (!std::isnan(r.max_mean_z)) z.push_back(r.max_mean_z);
    }
    nlohmann::json s = {{"replications_ok", w2.size()},
                        {"w2", mean_se(w2)},
                        {"noise_floor", mean_se(floors)}};
    if (!imbalance.empty()) s["mode_imbalance"] = mean_se(imbalance);
    if (!z.empty()) s["max_mean_z"] = mean_se(z);
    samplers[name] = std::move(s);
  }
  return {{"budget_per_particle", plan.sfs_budget()},
          {"langevin_step", plan.langevin.step},
          {"langevin_iterations", plan.langevin_iterations()},
          {"complete", complete},
          {"samplers", std::move(samplers)}};
}

ComparisonTable compare_samplers(const ExperimentPlan& plan) {
  plan.validate_comparison();
  const std::size_t reps = plan.replications;
  ComparisonTable table;
  table.rows.resize(2 * reps);
  const TargetSpec target = build_target(plan.target);

  parallel_for(2 * reps, plan.base.threads, [&](std::size_t job) {
    const std::size_t rep = job / 2;
    const bool langevin = job % 2 == 1;
    ComparisonRow& row = table.rows[job];
    row.sampler = langevin ? "ula" : "sfs";
    row.replication = rep;
    row.mode_imbalance = kNaN;
    row.budget = plan.sfs_budget();
    try {
      const std::uint64_t seed = derive_seed(
          plan.base.seed, StreamRole::kReplication, 0,
          static_cast<std::uint32_t>(rep));
      SamplerConfig config = plan.base;
      config.seed = seed;
      config.threads = 1;
      const SampleBatch batch =
          langevin ? ula_run(config, target, plan.langevin.step,
                             plan.langevin_iterations())
                   : sfs_run(config, target);
      const auto [w2, floor] =
          w2_against_truth(batch.samples, target, seed, plan.projections);
      row.w2 = w2.value;
      row.w2_se = w2.se;
      row.noise_floor = floor.value;
      row.max_mean_z = max_mean_z(batch.samples, target);
      if (target.mixture()) {
        const std::vector<double> mass =
            mode_masses(batch.samples, *target.mixture());
        double worst = 0.0;
        for (std::size_t k = 0; k < mass.size(); ++k) {
          worst = std::max(worst, std::abs(mass[k] - target.mixture()->weights[k]));
        }
        row.mode_imbalance = worst;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  for (const ComparisonRow& r : table.rows) table.complete &= r.ok;

  if (!plan.output_dir.empty()) {
    write_json(plan.output_dir / "plan.json", plan.to_json());
    write_text(plan.output_dir / "cells.csv", table.to_csv());
    write_json(plan.output_dir / "summary.json", table.summary(plan));
  }
  return table;
}

}  // namespace sfs
