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

#ifndef SFS_IO_HPP_
#define SFS_IO_HPP_

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sfs/drift.hpp"
#include "sfs/metrics.hpp"
#include "sfs/sampler.hpp"

namespace sfs {

// Sample CSV layout:
//   # config_digest=<16 hex digits> seed=<seed>
//   x0,x1,...,x{p-1}
//   one row per particle, shortest round-trip decimal text
void write_samples_csv(const std::filesystem::path& path,
                       const SampleBatch& batch);

// Reads a sample CSV back. Writes the header digest into `digest` if given.
Samples read_samples_csv(const std::filesystem::path& path,
                         std::string* digest = nullptr);

// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

// Sidecar metadata for a sample batch: digest, seed, timings.
nlohmann::json batch_sidecar(const SampleBatch& batch);

void to_json(nlohmann::json& j, const Estimate& e);
void to_json(nlohmann::json& j, const SlicedW2& s);
void to_json(nlohmann::json& j, const MomentReport& m);
void to_json(nlohmann::json& j, const RateFit& r);
void to_json(nlohmann::json& j, const MetricReport& r);
void to_json(nlohmann::json& j, const ProbeGrid& g);
void to_json(nlohmann::json& j, const DriftRegularityEstimate& e);

}  // namespace sfs

#endif  // SFS_IO_HPP_
