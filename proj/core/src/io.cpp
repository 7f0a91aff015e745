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

#include "sfs/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sfs/error.hpp"
#include "sfs/format.hpp"

namespace sfs {
namespace {

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory '" + path.parent_path().string() +
                        "': " + ec.message(),
                    path.parent_path().string());
    }
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'", path.string());
  return out;
}

}  // namespace

void write_samples_csv(const std::filesystem::path& path,
                       const SampleBatch& batch) {
  std::ofstream out = open_out(path);
  const Samples& s = batch.samples;
  out << "# config_digest=" << batch.config_digest << " seed=" << batch.seed
      << "\n";
  for (std::size_t c = 0; c < s.dim; ++c) out << (c ? "," : "") << "x" << c;
  out << "\n";
  std::string line;
  for (std::size_t i = 0; i < s.n; ++i) {
    line.clear();
    const auto row = s.row(i);
    for (std::size_t c = 0; c < s.dim; ++c) {
      if (c) line += ',';
      line += format_double(row[c]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'", path.string());
}

Samples read_samples_csv(const std::filesystem::path& path, std::string* digest) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'", path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config_digest=", 0) != 0) {
    throw IoError("'" + path.string() + "' lacks the digest header", path.string());
  }
  if (digest) {
    const std::size_t start = std::string("# config_digest=").size();
    *digest = line.substr(start, line.find(' ', start) - start);
  }
  if (!std::getline(in, line)) {
    throw IoError("'" + path.string() + "' lacks the column header", path.string());
  }
  Samples s;
  s.dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t c = 0; c < s.dim; ++c) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw IoError("malformed number in '" + path.string() + "'", path.string());
      }
      s.values.push_back(v);
      p = res.ptr;
      if (c + 1 < s.dim) {
        if (p == end || *p != ',') {
          throw IoError("short row in '" + path.string() + "'", path.string());
        }
        ++p;
      }
    }
    ++s.n;
  }
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'", path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + "\n");
}

nlohmann::json batch_sidecar(const SampleBatch& batch) {
  return {
      {"config_digest", batch.config_digest},
      {"seed", batch.seed},
      {"particles", batch.samples.n},
      {"dim", batch.samples.dim},
      {"steps", batch.steps},
      {"drift", to_string(batch.drift_mode)},
      {"epsilon", batch.epsilon},
      {"stream_policy", DriftEvaluator::stream_policy()},
      {"wallclock_seconds", batch.wallclock_seconds},
  };
}

void to_json(nlohmann::json& j, const Estimate& e) {
  j = {{"value", e.value}, {"se", e.se}};
}

void to_json(nlohmann::json& j, const SlicedW2& s) {
  j = {{"value", s.value}, {"se", s.se}, {"projections", s.projections}};
}

void to_json(nlohmann::json& j, const MomentReport& m) {
  j = {{"n", m.n}, {"se_defined", m.se_defined}, {"reference", m.reference}};
  nlohmann::json coords = nlohmann::json::array();
  for (const CoordinateMoments& c : m.coordinates) {
    coords.push_back({{"mean_error", c.mean_error},
                      {"mean_se", c.mean_se},
                      {"variance_error", c.variance_error},
                      {"variance_se", c.variance_se}});
  }
  j["coordinates"] = std::move(coords);
}

void to_json(nlohmann::json& j, const RateFit& r) {
  j = {{"parameter", r.parameter},
       {"slope", r.slope},
       {"intercept", r.intercept},
       {"r_squared", r.r_squared}};
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json::object();
  if (r.w2_1d) j["w2_1d"] = *r.w2_1d;
  if (r.sliced_w2) j["sliced_w2"] = *r.sliced_w2;
  if (r.exact_w2_small) j["exact_w2_small"] = *r.exact_w2_small;
  if (r.moments) j["moments"] = *r.moments;
  j["rate_fits"] = r.rate_fits;
  if (r.noise_floor) j["noise_floor"] = *r.noise_floor;
}

void to_json(nlohmann::json& j, const ProbeGrid& g) {
  j = {{"lo", g.lo},
       {"hi", g.hi},
       {"points_per_axis", g.points_per_axis},
       {"times", g.times},
       {"directions", g.directions},
       {"mc_size", g.mc_size}};
}

void to_json(nlohmann::json& j, const DriftRegularityEstimate& e) {
  j = {{"c0_hat", e.c0_hat},
       {"c1_hat", e.c1_hat},
       {"b_sup_hat", e.b_sup_hat},
       {"grid_meta",
        {{"grid", e.grid},
         {"dim", e.dim},
         {"evaluations", e.evaluations},
         {"drift", to_string(e.mode)},
         {"seed", e.seed}}}};
}

}  // namespace sfs
