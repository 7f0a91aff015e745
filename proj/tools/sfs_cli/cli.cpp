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

#include "sfs_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sfs/config.hpp"
#include "sfs/drift.hpp"
#include "sfs/error.hpp"
#include "sfs/harness.hpp"
#include "sfs/io.hpp"
#include "sfs/metrics.hpp"
#include "sfs/sampler.hpp"

namespace sfs::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Invocation {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> mc_size;
  std::optional<std::size_t> particles;
  std::optional<std::string> eps_rule;
  std::optional<unsigned> threads;
  std::string out_dir = "sfs_out";
  std::size_t replications = 16;  // drift-check only
};

void add_common(CLI::App& cmd, Invocation& inv) {
  cmd.add_option("--config", inv.config_path, "YAML run configuration")->required();
  cmd.add_option("--seed", inv.seed, "Root seed (overrides sampler.seed)");
  cmd.add_option("--steps", inv.steps, "Euler-Maruyama steps K");
  cmd.add_option("--mc-size", inv.mc_size, "Inner Monte-Carlo size m");
  cmd.add_option("--particles", inv.particles, "Particles n");
  cmd.add_option("--eps-rule", inv.eps_rule, "none | fixed:<v> | log | power");
  cmd.add_option("--threads", inv.threads, "Worker threads (0 = all)");
  cmd.add_option("--out", inv.out_dir, "Output directory");
}

RunConfig resolve(const Invocation& inv) {
  RunConfig c = load_config(inv.config_path);
  if (inv.seed) c.sampler.seed = *inv.seed;
  if (inv.steps) c.sampler.steps = *inv.steps;
  if (inv.mc_size) c.sampler.mc_size = *inv.mc_size;
  if (inv.particles) c.sampler.particles = *inv.particles;
  if (inv.eps_rule) c.sampler.eps = EpsSchedule::parse(*inv.eps_rule);
  if (inv.threads) c.sampler.threads = *inv.threads;
  return c;
}

void write_resolved(const fs::path& dir, const RunConfig& c) {
  write_text(dir / "config.yaml", emit_config(c));
}

json run_sample(const Invocation& inv) {
  const RunConfig c = resolve(inv);
  const TargetSpec target = build_target(c.target);
  const fs::path dir = inv.out_dir;
  write_resolved(dir, c);

  const SampleBatch batch = c.sampler.record_trajectory
                                ? sfs_trajectory(c.sampler, target)
                                : sfs_run(c.sampler, target);
  write_samples_csv(dir / "samples.csv", batch);

  json sidecar = batch_sidecar(batch);
  sidecar["config"] = c.sampler.canonical();
  sidecar["target"] = target.describe();
  if (target.moments() && batch.samples.n > 0) {
    sidecar["moments"] = moment_report(batch.samples, target);
  }
  if (batch.trajectories) {
    const std::vector<Estimate> m2 = trajectory_second_moments(
        *batch.trajectories, batch.samples.n, batch.steps, batch.samples.dim);
    sidecar["second_moment_path"] = m2;
    if (target.regularity()) {
      sidecar["second_moment_bound"] =
          target.regularity()->second_moment_bound(target.dim());
    }
  }
  write_json(dir / "samples.json", sidecar);
  return {{"command", "sample"},
          {"samples", (dir / "samples.csv").string()},
          {"config_digest", batch.config_digest},
          {"particles", batch.samples.n},
          {"wallclock_seconds", batch.wallclock_seconds}};
}

json run_drift_check(const Invocation& inv) {
  const RunConfig c = resolve(inv);
  const TargetSpec target = build_target(c.target);
  const fs::path dir = inv.out_dir;
  write_resolved(dir, c);
  const DriftCheckReport report =
      drift_check(target, c.sampler.mc_size, c.probe, inv.replications,
                  c.sampler.seed, c.sampler.threads);
  json j = report.to_json();
  j["grid"] = c.probe;
  write_json(dir / "drift_check.json", j);
  return {{"command", "drift-check"},
          {"report", (dir / "drift_check.json").string()},
          {"estimators", j["estimators"]}};
}

json run_regularity(const Invocation& inv) {
  const RunConfig c = resolve(inv);
  const TargetSpec target = build_target(c.target);
  const fs::path dir = inv.out_dir;
  write_resolved(dir, c);
  const DriftRegularityEstimate est =
      estimate_regularity(target, c.probe, c.sampler.seed, c.sampler.threads);
  json j = est;
  if (target.regularity()) {
    const double bound = target.regularity()->drift_bound();
    j["declared"] = {{"gamma", target.regularity()->gamma},
                     {"xi", target.regularity()->xi},
                     {"drift_bound", bound},
                     {"bound_holds", est.b_sup_hat <= bound}};
  }
  write_json(dir / "regularity.json", j);
  return {{"command", "regularity"},
          {"report", (dir / "regularity.json").string()},
          {"b_sup_hat", est.b_sup_hat}};
}

json run_sweep(const Invocation& inv) {
  const RunConfig c = resolve(inv);
  if (!c.experiment) throw ConfigError("sweep needs an 'experiment' section");
  write_resolved(inv.out_dir, c);
  const ExperimentPlan plan = ExperimentPlan::from_config(c, inv.out_dir);
  const ResultsTable table = run_experiment(plan);
  json j = {{"command", "sweep"},
            {"summary", (plan.output_dir / "summary.json").string()},
            {"complete", table.complete}};
  if (table.trend) j["trend_passed"] = table.trend->passed;
  return j;
}

json run_compare(const Invocation& inv) {
  const RunConfig c = resolve(inv);
  write_resolved(inv.out_dir, c);
  const ExperimentPlan plan = ExperimentPlan::from_config(c, inv.out_dir);
  const ComparisonTable table = compare_samplers(plan);
  return {{"command", "compare"},
          {"summary", (plan.output_dir / "summary.json").string()},
          {"complete", table.complete}};
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return kDomain;
    case ErrorKind::kUnsupported: return kUnsupported;
    case ErrorKind::kDriftSingularity: return kDriftSingularity;
    case ErrorKind::kNonFinite: return kNonFinite;
    case ErrorKind::kConfig: return kConfig;
    case ErrorKind::kUnknownTarget: return kUnknownTarget;
    case ErrorKind::kIo: return kIo;
  }
  return kInternal;
}

int report_error(std::ostream& err, int code, const std::string& kind,
                 const std::string& message, json extra = json::object()) {
  json e = {{"kind", kind}, {"message", message}, {"exit_code", code}};
  e.update(extra);
  err << json{{"error", e}}.dump() << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schrodinger-Follmer sampler"};
  app.require_subcommand(1);
  Invocation inv;

  CLI::App* sample = app.add_subcommand("sample", "Draw samples; write CSV + JSON sidecar");
  CLI::App* check = app.add_subcommand("drift-check", "Compare MC drift estimators with the exact drift");
  CLI::App* sweep = app.add_subcommand("sweep", "Run an experiment plan");
  CLI::App* compare = app.add_subcommand("compare", "SFS against unadjusted Langevin at equal budget");
  CLI::App* regularity = app.add_subcommand("regularity", "Estimate drift regularity constants");
  for (CLI::App* cmd : {sample, check, sweep, compare, regularity}) add_common(*cmd, inv);
  check->add_option("--replications", inv.replications,
                    "Independent batches per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, kUsage, "usage", e.what());
  }

  try {
    json result;
    if (*sample) result = run_sample(inv);
    else if (*check) result = run_drift_check(inv);
    else if (*sweep) result = run_sweep(inv);
    else if (*compare) result = run_compare(inv);
    else result = run_regularity(inv);
    out << result.dump() << "\n";
    return kOk;
  } catch (const IoError& e) {
    return report_error(err, exit_code(e.kind()), to_string(e.kind()), e.what(),
                        {{"path", e.path()}});
  } catch (const DriftSingularityError& e) {
    return report_error(err, exit_code(e.kind()), to_string(e.kind()), e.what(),
                        {{"step", e.step()}, {"particle", e.particle()}, {"t", e.t()}});
  } catch (const NonFiniteStateError& e) {
    return report_error(err, exit_code(e.kind()), to_string(e.kind()), e.what(),
                        {{"step", e.step()}, {"particle", e.particle()}});
  } catch (const Error& e) {
    return report_error(err, exit_code(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error(err, kInternal, "internal", e.what());
  }
}

}  // namespace sfs::cli
