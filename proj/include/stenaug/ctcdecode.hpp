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

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stenaug/textdata.hpp"

namespace stenaug {

/// T x C matrix of per-timestep class scores. Raw logits and probabilities
/// are both fine: only the argmax matters downstream.
struct LogitMatrix {
  int timesteps = 0;
  int classes = 0;
  std::vector<double> values;  // row-major

  double at(int t, int c) const {
    return values[static_cast<std::size_t>(t) * classes + c];
  }
  double& at(int t, int c) {
    return values[static_cast<std::size_t>(t) * classes + c];
  }

  /// T >= 1, C >= 2, all values finite.
  void validate() const;
};

/// Per-timestep argmax; ties resolve to the lowest class index.
std::vector<int> argmax_path(const LogitMatrix& m);

/// Collapse adjacent repeats, drop blanks (class 0), map 1-based indices to
/// alphabet symbols. Classes outside 0..alphabet.size() raise ValueError.
std::string collapse_path(std::span<const int> path, const Alphabet& alphabet);

/// Greedy (best path) decoding. The matrix class count must equal
/// alphabet.size() + 1.
std::string best_path_decode(const LogitMatrix& m, const Alphabet& alphabet);

/// Single-matrix file: first line "T C", then T lines of C reals.
LogitMatrix read_logit_matrix(const std::filesystem::path& path);
void write_logit_matrix(const LogitMatrix& m, const std::filesystem::path& path);

/// Container with a record-count header:
///   line 1: N
///   then per record: an id line, a "T C" line, T value rows.
std::vector<std::pair<std::string, LogitMatrix>> read_logit_container(
    const std::filesystem::path& path);
void write_logit_container(
    std::span<const std::pair<std::string, LogitMatrix>> records,
    const std::filesystem::path& path);

}  // namespace stenaug
