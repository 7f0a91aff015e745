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

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "sfs/error.hpp"
#include "sfs/io.hpp"

namespace sfs {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sfs_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

SampleBatch make_batch() {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal(0.0, 1e3);
  SampleBatch b;
  b.samples = Samples(50, 3);
  for (double& v : b.samples.values) v = normal(gen);
  b.samples.values[0] = 1e-300;
  b.samples.values[1] = -0.0;
  b.config_digest = "0123456789abcdef";
  b.seed = 42;
  b.steps = 10;
  return b;
}

TEST_F(IoTest, CsvRoundTripIsExact) {
  const SampleBatch b = make_batch();
  const fs::path path = dir_ / "nested" / "samples.csv";
  write_samples_csv(path, b);
  std::string digest;
  const Samples back = read_samples_csv(path, &digest);
  EXPECT_EQ(digest, "0123456789abcdef");
  EXPECT_EQ(back.n, 50u);
  EXPECT_EQ(back.dim, 3u);
  EXPECT_EQ(back.values, b.samples.values);
}

TEST_F(IoTest, CsvHeaderLines) {
  write_samples_csv(dir_ / "s.csv", make_batch());
  std::ifstream in(dir_ / "s.csv");
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, "# config_digest=0123456789abcdef seed=42");
  EXPECT_EQ(second, "x0,x1,x2");
}

TEST_F(IoTest, MalformedCsvRejected) {
  write_text(dir_ / "bad.csv", "x0,x1\n1,2\n");
  EXPECT_THROW(read_samples_csv(dir_ / "bad.csv"), IoError);
  write_text(dir_ / "short.csv", "# config_digest=ab seed=1\nx0,x1\n1\n");
  EXPECT_THROW(read_samples_csv(dir_ / "short.csv"), IoError);
  write_text(dir_ / "word.csv", "# config_digest=ab seed=1\nx0\nabc\n");
  EXPECT_THROW(read_samples_csv(dir_ / "word.csv"), IoError);
  EXPECT_THROW(read_samples_csv(dir_ / "missing.csv"), IoError);
}

TEST_F(IoTest, SidecarFields) {
  SampleBatch b = make_batch();
  b.drift_mode = DriftMode::kMcStein;
  b.epsilon = 0.25;
  const nlohmann::json j = batch_sidecar(b);
  EXPECT_EQ(j["config_digest"], "0123456789abcdef");
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["drift"], "mc_stein");
  EXPECT_EQ(j["epsilon"], 0.25);
  EXPECT_EQ(j["particles"], 50);
  EXPECT_TRUE(j.contains("stream_policy"));
}

TEST_F(IoTest, JsonWriterCreatesDirectories) {
  const fs::path path = dir_ / "a" / "b" / "x.json";
  write_json(path, nlohmann::json{{"k", 1}});
  std::ifstream in(path);
  const nlohmann::json back = nlohmann::json::parse(in);
  EXPECT_EQ(back["k"], 1);
}

TEST(IoJson, RegularitySerialization) {
  DriftRegularityEstimate e;
  e.c0_hat = 1.0;
  e.b_sup_hat = 2.0;
  e.dim = 1;
  const nlohmann::json j = e;
  EXPECT_EQ(j["b_sup_hat"], 2.0);
  EXPECT_EQ(j["grid_meta"]["grid"]["points_per_axis"], 21);
  EXPECT_EQ(j["grid_meta"]["drift"], "exact");
}

}  // namespace
}  // namespace sfs
