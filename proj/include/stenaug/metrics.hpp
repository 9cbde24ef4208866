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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stenaug {

/// Counts of the edit operations turning a hypothesis into the reference:
/// substitutions, deletions (hypothesis tokens dropped), insertions
/// (reference tokens added). ref_len is the reference length N.
struct ErrorCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t ref_len = 0;

  std::int64_t total() const { return substitutions + deletions + insertions; }

  /// (S + D + I) / N. Zero for empty-vs-empty; an empty reference with a
  /// nonempty hypothesis has no defined rate and raises ValueError.
  double rate() const;

  ErrorCounts& operator+=(const ErrorCounts& other);
};

/// Minimal Levenshtein alignment of hyp into ref with unit costs. The total
/// is unique; the S/D/I split is not, so the canonical decomposition with
/// the most substitutions is reported. That choice is deterministic and
/// symmetric: swapping the arguments keeps S and exchanges D with I.
template <typename Token>
ErrorCounts edit_distance(std::span<const Token> hyp, std::span<const Token> ref);

extern template ErrorCounts edit_distance<char32_t>(std::span<const char32_t>,
                                                    std::span<const char32_t>);
extern template ErrorCounts edit_distance<std::string>(
    std::span<const std::string>, std::span<const std::string>);
extern template ErrorCounts edit_distance<int>(std::span<const int>,
                                               std::span<const int>);

/// Character-level counts on Unicode codepoints.
ErrorCounts char_error_counts(std::string_view hyp, std::string_view ref);

/// Word-level counts; words are maximal runs of non-whitespace, compared
/// case-sensitively with punctuation kept.
ErrorCounts word_error_counts(std::string_view hyp, std::string_view ref);

double cer(std::string_view hyp, std::string_view ref);
double wer(std::string_view hyp, std::string_view ref);

std::vector<std::string> split_words(std::string_view text);

/// One (config, fold, run) measurement row.
struct RunResult {
  std::string config;
  int fold = 0;
  int run = 0;
  std::string split = "all";
  double cer = 0.0;
  double wer = 0.0;
};

struct Aggregate {
  std::string config;
  int n = 0;
  double mean_cer = 0.0, std_cer = 0.0;
  double mean_wer = 0.0, std_wer = 0.0;
  bool single_run() const { return n == 1; }  // std reported as 0
};

/// Mean and sample standard deviation (n-1 denominator) over every row of
/// the config, in input order. Empty selection raises ValueError.
Aggregate aggregate(std::span<const RunResult> results,
                    const std::string& config);

/// Results CSV: header `config,fold,run,split,cer,wer`, rates with 6
/// fractional digits, UTF-8.
std::vector<RunResult> read_results_csv(const std::filesystem::path& path);
void write_results_csv(std::span<const RunResult> results,
                       const std::filesystem::path& path);

}  // namespace stenaug
