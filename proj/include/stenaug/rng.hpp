// Copyright 2026 The stenaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>

namespace stenaug {

/// Seeded random stream with fully specified draw algorithms, so that the
/// same seed and call sequence give the same values on every platform.
/// The engine (mt19937_64) is pinned by the C++ standard; the distribution
/// code below is ours because the standard library distributions are
/// implementation-defined.
///
/// Streams are values: copy freely, never share one between threads. Batch
/// work derives one child stream per work item from the parent seed, which
/// makes results independent of worker count and scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform double in [lo, hi). Requires lo <= hi.
  double uniform(double lo, double hi);

  /// Uniform integer in the closed range [lo, hi], unbiased (rejection).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller. Consumes exactly two u64 draws.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Child stream derived from the parent *seed* (not the current engine
  /// position): child(i) is the same no matter how much the parent has
  /// already been consumed.
  RngStream child(std::uint64_t stream) const;
  RngStream child(std::uint64_t a, std::uint64_t b) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 mix step, used to derive child seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace stenaug
