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

#include "sfs/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/format.hpp"

namespace sfs {
namespace {

void check_keys(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ConfigError("section '" + section + "' must be a map");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!names.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
    }
  }
}

std::string where(const YAML::Node& node, const std::string& key) {
  std::ostringstream out;
  out << "'" << key << "'";
  if (node.Mark().line >= 0) out << " (line " << node.Mark().line + 1 << ")";
  return out.str();
}

double get_double(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("expected a number for " + where(node, key));
  }
}

std::size_t get_count(const YAML::Node& node, const std::string& key) {
  const double v = get_double(node, key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
    throw ConfigError("expected a nonnegative integer for " + where(node, key));
  }
  return static_cast<std::size_t>(v);
}

bool get_bool(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError("expected true/false for " + where(node, key));
  }
}

std::string get_string(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError("expected text for " + where(node, key));
  return node.as<std::string>();
}

std::vector<double> get_doubles(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError("expected a list for " + where(node, key));
  std::vector<double> out;
  for (const auto& item : node) out.push_back(get_double(item, key));
  return out;
}

TargetConfig parse_target(const YAML::Node& node) {
  check_keys(node, "target",
             {"kind", "dim", "weights", "means", "mean", "sigma", "radius",
              "log_scale", "regularity"});
  TargetConfig t;
  if (node["kind"]) t.kind = get_string(node["kind"], "kind");
  if (node["dim"]) t.dim = get_count(node["dim"], "dim");
  if (node["weights"]) t.weights = get_doubles(node["weights"], "weights");
  if (node["means"]) {
    const YAML::Node means = node["means"];
    if (!means.IsSequence()) throw ConfigError("expected a list for 'means'");
    for (const auto& m : means) {
      // Scalars are accepted as 1-D means.
      t.means.push_back(m.IsScalar() ? Vector{get_double(m, "means")}
                                     : get_doubles(m, "means"));
    }
  }
  if (node["mean"]) {
    const YAML::Node m = node["mean"];
    t.mean = m.IsScalar() ? Vector{get_double(m, "mean")} : get_doubles(m, "mean");
  }
  if (node["sigma"]) t.sigma = get_double(node["sigma"], "sigma");
  if (node["radius"]) t.radius = get_double(node["radius"], "radius");
  if (node["log_scale"]) t.log_scale = get_double(node["log_scale"], "log_scale");
  if (node["regularity"]) {
    const YAML::Node r = node["regularity"];
    check_keys(r, "target.regularity", {"gamma", "xi", "zeta"});
    if (!r["gamma"] || !r["xi"]) {
      throw ConfigError("regularity needs both gamma and xi");
    }
    TargetRegularity reg;
    reg.gamma = get_double(r["gamma"], "gamma");
    reg.xi = get_double(r["xi"], "xi");
    if (r["zeta"]) reg.zeta = get_double(r["zeta"], "zeta");
    t.regularity = reg;
  }
  return t;
}

SamplerConfig parse_sampler(const YAML::Node& node) {
  check_keys(node, "sampler",
             {"seed", "steps", "particles", "drift", "mc_size", "eps",
              "record_trajectory", "trajectory_budget_mb", "threads"});
  SamplerConfig s;
  if (!node["seed"]) {
    throw ConfigError("sampler.seed is required; runs are never seeded from the clock");
  }
  try {
    s.seed = node["seed"].as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    throw ConfigError("expected an unsigned 64-bit integer for 'seed'");
  }
  if (node["steps"]) s.steps = get_count(node["steps"], "steps");
  if (node["particles"]) s.particles = get_count(node["particles"], "particles");
  if (node["drift"]) {
    const std::string mode = get_string(node["drift"], "drift");
    if (mode == "auto") {
      s.drift.reset();
    } else {
      s.drift = parse_drift_mode(mode);
    }
  }
  if (node["mc_size"]) s.mc_size = get_count(node["mc_size"], "mc_size");
  if (node["eps"]) {
    try {
      s.eps = EpsSchedule::parse(get_string(node["eps"], "eps"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (node["record_trajectory"]) {
    s.record_trajectory = get_bool(node["record_trajectory"], "record_trajectory");
  }
  if (node["trajectory_budget_mb"]) {
    s.trajectory_budget_bytes =
        get_count(node["trajectory_budget_mb"], "trajectory_budget_mb") << 20;
  }
  if (node["threads"]) {
    s.threads = static_cast<unsigned>(get_count(node["threads"], "threads"));
  }
  return s;
}

ProbeGrid parse_probe(const YAML::Node& node) {
  check_keys(node, "probe",
             {"lo", "hi", "points_per_axis", "times", "directions", "mc_size"});
  ProbeGrid g;
  if (node["lo"]) g.lo = get_double(node["lo"], "lo");
  if (node["hi"]) g.hi = get_double(node["hi"], "hi");
  if (node["points_per_axis"]) {
    g.points_per_axis = get_count(node["points_per_axis"], "points_per_axis");
  }
  if (node["times"]) g.times = get_doubles(node["times"], "times");
  if (node["directions"]) g.directions = get_count(node["directions"], "directions");
  if (node["mc_size"]) g.mc_size = get_count(node["mc_size"], "mc_size");
  return g;
}

ExperimentSettings parse_experiment(const YAML::Node& node) {
  check_keys(node, "experiment", {"axis", "values", "replications", "drift_probe"});
  ExperimentSettings e;
  if (!node["axis"]) throw ConfigError("experiment.axis is required");
  e.axis = get_string(node["axis"], "axis");
  if (node["values"]) e.values = get_doubles(node["values"], "values");
  if (node["replications"]) {
    e.replications = get_count(node["replications"], "replications");
  }
  if (node["drift_probe"]) {
    const YAML::Node d = node["drift_probe"];
    check_keys(d, "experiment.drift_probe",
               {"points", "lo", "hi", "times", "replications"});
    if (d["points"]) e.drift_probe.points = get_count(d["points"], "points");
    if (d["lo"]) e.drift_probe.lo = get_double(d["lo"], "lo");
    if (d["hi"]) e.drift_probe.hi = get_double(d["hi"], "hi");
    if (d["times"]) e.drift_probe.times = get_doubles(d["times"], "times");
    if (d["replications"]) {
      e.drift_probe.replications = get_count(d["replications"], "replications");
    }
  }
  return e;
}

void emit_doubles(YAML::Emitter& out, const std::vector<double>& values) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double v : values) out << format_double(v);
  out << YAML::EndSeq;
}

}  // namespace

TargetSpec build_target(const TargetConfig& c) {
  if (c.dim == 0) throw DomainError("target dim must be >= 1");
  auto check_dim = [&](const Vector& v, const char* what) {
    if (v.size() != c.dim) {
      std::ostringstream msg;
      msg << "target " << what << " has " << v.size()
          << " coordinates but dim is " << c.dim;
      throw DomainError(msg.str());
    }
  };
  auto mixture = [&] {
    GaussianMixture mix{c.weights, c.means};
    for (const Vector& m : c.means) check_dim(m, "mean");
    return mix;
  };

  TargetSpec target = [&] {
    if (c.kind == "standard") return TargetSpec::standard_gaussian(c.dim);
    if (c.kind == "gaussian") {
      check_dim(c.mean, "mean");
      return TargetSpec::gaussian(c.mean);
    }
    if (c.kind == "mixture") return TargetSpec::mixture(mixture());
    if (c.kind == "bump") return TargetSpec::bump(c.dim, c.radius);
    if (c.kind == "gaussian_potential") {
      check_dim(c.mean, "mean");
      return TargetSpec::gaussian_potential(c.mean, c.sigma);
    }
    if (c.kind == "mixture_potential") {
      return TargetSpec::mixture_potential(mixture());
    }
    throw UnknownTargetError(
        "unknown target kind '" + c.kind +
        "' (expected standard, gaussian, mixture, bump, gaussian_potential "
        "or mixture_potential)");
  }();

  target = target.with_name(c.kind);
  if (c.log_scale != 0.0) target = target.with_log_scale(c.log_scale);
  if (c.regularity) target = target.with_regularity(*c.regularity);
  return target;
}

TargetConfig with_dim(TargetConfig config, std::size_t dim) {
  if (dim == 0) throw DomainError("dimension must be >= 1");
  config.dim = dim;
  for (Vector& m : config.means) m.resize(dim, 0.0);
  if (!config.mean.empty() || config.kind == "gaussian" ||
      config.kind == "gaussian_potential") {
    config.mean.resize(dim, 0.0);
  }
  return config;
}

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML map");
  check_keys(root, "<root>",
             {"target", "sampler", "langevin", "probe", "metrics", "experiment"});
  if (!root["target"]) throw ConfigError("config needs a 'target' section");
  if (!root["sampler"]) throw ConfigError("config needs a 'sampler' section");

  RunConfig c;
  c.target = parse_target(root["target"]);
  c.sampler = parse_sampler(root["sampler"]);
  if (root["langevin"]) {
    const YAML::Node l = root["langevin"];
    check_keys(l, "langevin", {"step", "iterations"});
    if (l["step"]) c.langevin.step = get_double(l["step"], "step");
    if (l["iterations"]) c.langevin.iterations = get_count(l["iterations"], "iterations");
  }
  if (root["probe"]) c.probe = parse_probe(root["probe"]);
  if (root["metrics"]) {
    const YAML::Node m = root["metrics"];
    check_keys(m, "metrics", {"projections"});
    if (m["projections"]) c.projections = get_count(m["projections"], "projections");
  }
  if (root["experiment"]) c.experiment = parse_experiment(root["experiment"]);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'", path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string emit_config(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "target" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.target.kind;
  out << YAML::Key << "dim" << YAML::Value << c.target.dim;
  if (!c.target.weights.empty()) {
    out << YAML::Key << "weights" << YAML::Value;
    emit_doubles(out, c.target.weights);
  }
  if (!c.target.means.empty()) {
    out << YAML::Key << "means" << YAML::Value << YAML::BeginSeq;
    for (const Vector& m : c.target.means) emit_doubles(out, m);
    out << YAML::EndSeq;
  }
  if (!c.target.mean.empty()) {
    out << YAML::Key << "mean" << YAML::Value;
    emit_doubles(out, c.target.mean);
  }
  out << YAML::Key << "sigma" << YAML::Value << format_double(c.target.sigma);
  out << YAML::Key << "radius" << YAML::Value << format_double(c.target.radius);
  out << YAML::Key << "log_scale" << YAML::Value << format_double(c.target.log_scale);
  if (c.target.regularity) {
    const TargetRegularity& r = *c.target.regularity;
    out << YAML::Key << "regularity" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "gamma" << YAML::Value << format_double(r.gamma);
    out << YAML::Key << "xi" << YAML::Value << format_double(r.xi);
    if (r.zeta) out << YAML::Key << "zeta" << YAML::Value << format_double(*r.zeta);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  const SamplerConfig& s = c.sampler;
  out << YAML::Key << "sampler" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "steps" << YAML::Value << s.steps;
  out << YAML::Key << "particles" << YAML::Value << s.particles;
  out << YAML::Key << "drift" << YAML::Value
      << (s.drift ? to_string(*s.drift) : "auto");
  out << YAML::Key << "mc_size" << YAML::Value << s.mc_size;
  out << YAML::Key << "eps" << YAML::Value << s.eps.to_string();
  out << YAML::Key << "record_trajectory" << YAML::Value << s.record_trajectory;
  out << YAML::Key << "trajectory_budget_mb" << YAML::Value
      << (s.trajectory_budget_bytes >> 20);
  out << YAML::Key << "threads" << YAML::Value << s.threads;
  out << YAML::EndMap;

  out << YAML::Key << "langevin" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "step" << YAML::Value << format_double(c.langevin.step);
  out << YAML::Key << "iterations" << YAML::Value << c.langevin.iterations;
  out << YAML::EndMap;

  out << YAML::Key << "probe" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lo" << YAML::Value << format_double(c.probe.lo);
  out << YAML::Key << "hi" << YAML::Value << format_double(c.probe.hi);
  out << YAML::Key << "points_per_axis" << YAML::Value << c.probe.points_per_axis;
  out << YAML::Key << "times" << YAML::Value;
  emit_doubles(out, c.probe.times);
  out << YAML::Key << "directions" << YAML::Value << c.probe.directions;
  out << YAML::Key << "mc_size" << YAML::Value << c.probe.mc_size;
  out << YAML::EndMap;

  out << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "projections" << YAML::Value << c.projections;
  out << YAML::EndMap;

  if (c.experiment) {
    const ExperimentSettings& e = *c.experiment;
    out << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "axis" << YAML::Value << e.axis;
    out << YAML::Key << "values" << YAML::Value;
    emit_doubles(out, e.values);
    out << YAML::Key << "replications" << YAML::Value << e.replications;
    out << YAML::Key << "drift_probe" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "points" << YAML::Value << e.drift_probe.points;
    out << YAML::Key << "lo" << YAML::Value << format_double(e.drift_probe.lo);
    out << YAML::Key << "hi" << YAML::Value << format_double(e.drift_probe.hi);
    out << YAML::Key << "times" << YAML::Value;
    emit_doubles(out, e.drift_probe.times);
    out << YAML::Key << "replications" << YAML::Value << e.drift_probe.replications;
    out << YAML::EndMap;
    out << YAML::EndMap;
  }

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace sfs
