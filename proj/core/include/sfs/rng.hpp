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

#ifndef SFS_RNG_HPP_
#define SFS_RNG_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace sfs {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Pure
// function of (key, counter); no state carried between blocks.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

// What a random stream is used for. Streams with different roles never
// overlap, so e.g. drift batches stay independent of Brownian increments.
enum class StreamRole : std::uint32_t {
  kIncrement = 1,
  kDriftBatch = 2,
  kGroundTruth = 3,
  kProjection = 4,
  kSemigroup = 5,
  kLangevin = 6,
  kReplication = 7,
  kProbe = 8,
};

// A reproducible random stream addressed by (seed, role, step, index).
//
// Counter layout: word 0 is the block counter within the stream, word 1
// the role, word 2 the step, word 3 the particle (or other) index. The
// 64-bit seed is the Philox key. Streams are therefore independent of
// evaluation order and thread assignment.
//
// Satisfies UniformRandomBitGenerator with a 64-bit result, so it can
// drive the <random> distributions directly.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, StreamRole role, std::uint32_t step,
         std::uint32_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  void refill();

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter buffer_{};
  int next_word_ = 4;
};

// Fills `out` with independent standard normal draws from `stream`.
void fill_standard_normal(Stream& stream, std::span<double> out);

// Derives a child seed from a root seed, e.g. one per replication.
std::uint64_t derive_seed(std::uint64_t seed, StreamRole role,
                          std::uint32_t a, std::uint32_t b = 0);

}  // namespace sfs

#endif  // SFS_RNG_HPP_
