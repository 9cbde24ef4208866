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

#include "stenaug/metrics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stenaug/error.hpp"
#include "stenaug/utf8.hpp"

namespace stenaug {

double ErrorCounts::rate() const {
  if (ref_len == 0) {
    if (total() == 0) return 0.0;
    throw ValueError("error rate undefined: empty reference with a nonempty "
                     "hypothesis");
  }
  return static_cast<double>(total()) / static_cast<double>(ref_len);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  ref_len += other.ref_len;
  return *this;
}

template <typename Token>
ErrorCounts edit_distance(std::span<const Token> hyp,
                          std::span<const Token> ref) {
  const std::size_t la = hyp.size();
  const std::size_t lb = ref.size();
  const std::size_t stride = lb + 1;

  // dist[i][j]: cost of turning hyp[0..i) into ref[0..j).
  // subs[i][j]: the largest substitution count over the optimal alignments
  // of that prefix pair. Maximizing substitutions picks a canonical split
  // that is symmetric in the two arguments; D and I then follow from the
  // total and the length difference.
  std::vector<std::int32_t> dist((la + 1) * stride);
  std::vector<std::int32_t> subs((la + 1) * stride, 0);
  for (std::size_t j = 0; j <= lb; ++j) dist[j] = static_cast<std::int32_t>(j);
  for (std::size_t i = 1; i <= la; ++i) {
    dist[i * stride] = static_cast<std::int32_t>(i);
    for (std::size_t j = 1; j <= lb; ++j) {
      const bool match = hyp[i - 1] == ref[j - 1];
      const std::int32_t diag = dist[(i - 1) * stride + (j - 1)] + (match ? 0 : 1);
      const std::int32_t up = dist[(i - 1) * stride + j] + 1;    // delete
      const std::int32_t left = dist[i * stride + (j - 1)] + 1;  // insert
      const std::int32_t best = std::min(diag, std::min(up, left));
      dist[i * stride + j] = best;
      std::int32_t s = -1;
      if (diag == best)
        s = std::max(s, subs[(i - 1) * stride + (j - 1)] + (match ? 0 : 1));
      if (up == best) s = std::max(s, subs[(i - 1) * stride + j]);
      if (left == best) s = std::max(s, subs[i * stride + (j - 1)]);
      subs[i * stride + j] = s;
    }
  }

  ErrorCounts counts;
  counts.ref_len = static_cast<std::int64_t>(lb);
  const std::int64_t total = dist[la * stride + lb];
  counts.substitutions = subs[la * stride + lb];
  const std::int64_t len_diff =
      static_cast<std::int64_t>(lb) - static_cast<std::int64_t>(la);
  // total = S + D + I with I - D = len(ref) - len(hyp)
  counts.deletions = (total - counts.substitutions - len_diff) / 2;
  counts.insertions = counts.deletions + len_diff;
  return counts;
}

template ErrorCounts edit_distance<char32_t>(std::span<const char32_t>,
                                             std::span<const char32_t>);
template ErrorCounts edit_distance<std::string>(std::span<const std::string>,
                                                std::span<const std::string>);
template ErrorCounts edit_distance<int>(std::span<const int>,
                                        std::span<const int>);

ErrorCounts char_error_counts(std::string_view hyp, std::string_view ref) {
  const std::u32string h = utf8_decode(hyp);
  const std::u32string r = utf8_decode(ref);
  return edit_distance<char32_t>(std::span(h.data(), h.size()),
                                 std::span(r.data(), r.size()));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

ErrorCounts word_error_counts(std::string_view hyp, std::string_view ref) {
  const auto h = split_words(hyp);
  const auto r = split_words(ref);
  return edit_distance<std::string>(std::span(h.data(), h.size()),
                                    std::span(r.data(), r.size()));
}

double cer(std::string_view hyp, std::string_view ref) {
  return char_error_counts(hyp, ref).rate();
}

double wer(std::string_view hyp, std::string_view ref) {
  return word_error_counts(hyp, ref).rate();
}

// ---------------------------------------------------------------------------
// Aggregation and CSV
// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> mean_and_sample_std(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n - 1))};
}

}  // namespace

Aggregate aggregate(std::span<const RunResult> results,
                    const std::string& config) {
  std::vector<double> cers, wers;
  for (const auto& r : results) {
    if (r.config != config) continue;
    cers.push_back(r.cer);
    wers.push_back(r.wer);
  }
  if (cers.empty())
    throw ValueError("no results for config '" + config + "'");
  Aggregate a;
  a.config = config;
  a.n = static_cast<int>(cers.size());
  std::tie(a.mean_cer, a.std_cer) = mean_and_sample_std(cers);
  std::tie(a.mean_wer, a.std_wer) = mean_and_sample_std(wers);
  return a;
}

std::vector<RunResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such results file: " + path.string());
    throw Error("cannot open results file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line))
    throw ParseError(path.string() + ": empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "config,fold,run,split,cer,wer")
    throw ParseError(path.string() +
                     ":1: expected header 'config,fold,run,split,cer,wer'");

  std::vector<RunResult> results;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6)
      throw ParseError(where + ": expected 6 comma-separated fields, got " +
                       std::to_string(fields.size()));
    RunResult r;
    r.config = fields[0];
    try {
      r.fold = std::stoi(fields[1]);
      r.run = std::stoi(fields[2]);
      r.split = fields[3];
      r.cer = std::stod(fields[4]);
      r.wer = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw ParseError(where + ": malformed numeric field");
    }
    if (!std::isfinite(r.cer) || !std::isfinite(r.wer) || r.cer < 0.0 ||
        r.wer < 0.0)
      throw ParseError(where + ": rates must be finite and >= 0");
    results.push_back(std::move(r));
  }
  return results;
}

void write_results_csv(std::span<const RunResult> results,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open results file for writing: " + path.string());
  out << "config,fold,run,split,cer,wer\n";
  char buf[64];
  for (const auto& r : results) {
    if (r.config.find(',') != std::string::npos ||
        r.split.find(',') != std::string::npos)
      throw ValueError("config and split names must not contain commas");
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.cer, r.wer);
    out << r.config << ',' << r.fold << ',' << r.run << ',' << r.split << ','
        << buf << '\n';
  }
}

}  // namespace stenaug
