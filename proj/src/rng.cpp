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

#include "stenaug/rng.hpp"

#include <cmath>

#include "stenaug/error.hpp"

namespace stenaug {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  // Top 53 bits -> [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (lo > hi) throw ValueError("uniform range has lo > hi");
  return lo + uniform() * (hi - lo);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ValueError("uniform_int range has lo > hi");
  const std::uint64_t range =
      static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next_u64());  // full span
  const std::uint64_t reject_below = (0 - range) % range;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < reject_below);
  return lo + static_cast<std::int64_t>(x % range);
}

double RngStream::normal() {
  // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

RngStream RngStream::child(std::uint64_t stream) const {
  return RngStream(splitmix64(seed_ ^ splitmix64(stream + 1)));
}

RngStream RngStream::child(std::uint64_t a, std::uint64_t b) const {
  return RngStream(
      splitmix64(seed_ ^ splitmix64(a + 1) ^ splitmix64(splitmix64(b + 1) + 1)));
}

}  // namespace stenaug
