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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stenaug/metrics.hpp"

namespace stenaug {

/// Paired measurements aligned by key.
struct PairedSample {
  std::vector<std::string> labels;
  std::vector<double> a;  // inspected config
  std::vector<double> b;  // baseline

  void validate() const;  // equal nonzero lengths, unique labels
};

enum class WilcoxonMode { exact, normal_approx, auto_select };

struct WilcoxonResult {
  double statistic = 0.0;  // W = min(positive, negative rank sum)
  double p_two_sided = 1.0;
  int n = 0;  // pairs remaining after dropping zero differences
  bool used_exact = true;
};

/// Two-sided Wilcoxon signed-rank test on d = a - b. Zero differences are
/// dropped (the classical rule); ties in |d| take midranks. Exact p comes
/// from the full distribution of the positive rank sum over all 2^n sign
/// assignments (computed by convolution, so any n is fine); auto mode uses
/// it for n <= 25 and the tie-corrected normal approximation with
/// continuity correction beyond. All-zero differences raise
/// DegenerateSampleError.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample,
                                    WilcoxonMode mode = WilcoxonMode::auto_select);
WilcoxonResult wilcoxon_from_differences(std::span<const double> d,
                                         WilcoxonMode mode);

/// min(1, p * n).
double bonferroni(double p, int n);

enum class Direction { higher, lower, no_difference };

std::string_view direction_symbol(Direction d);  // ">", "<", "-"

struct Verdict {
  std::string config;
  std::string metric;  // "cer" or "wer"
  Direction direction = Direction::no_difference;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  double mean_config = 0.0;
  double mean_baseline = 0.0;
  bool degenerate = false;  // identical samples: reported as no_difference
};

/// Verdict for one config against the baseline: higher/lower when the
/// Bonferroni-adjusted p is below alpha, with the sign taken from the means,
/// else no_difference.
Verdict compare_to_baseline(const PairedSample& sample,
                            const std::string& config,
                            const std::string& metric, double alpha,
                            int n_comparisons,
                            WilcoxonMode mode = WilcoxonMode::auto_select);

enum class PairingMode { per_run, fold_mean };
enum class Metric { cer, wer };

/// Builds the paired sample for (config vs baseline) from result rows.
/// per_run pairs on (fold, run, split) keys; fold_mean pairs the per-fold
/// means instead. Misaligned keys raise PairingError listing the unmatched
/// keys.
PairedSample pair_runs(std::span<const RunResult> results,
                       const std::string& baseline_config,
                       const std::string& config, Metric metric,
                       PairingMode mode);

struct ReportRow {
  Aggregate agg;
  std::optional<Verdict> cer_verdict;  // absent on the baseline row
  std::optional<Verdict> wer_verdict;
};

/// Assembles one row per config present in `results`: baseline first, then
/// canonical_order, then any remaining configs in name order. Missing
/// baseline raises ValueError.
std::vector<ReportRow> build_report(std::span<const RunResult> results,
                                    const std::string& baseline_config,
                                    double alpha, int n_comparisons,
                                    PairingMode mode,
                                    const std::vector<std::string>& canonical_order);

/// Plain-text table: config, mean (std) CER, CER comparison, mean (std) WER,
/// WER comparison. Means render as "%.4f (%.4f)"; comparisons as >, <, - and
/// N/A on the baseline row.
std::string render_report_text(std::span<const ReportRow> rows);

/// Machine-readable verdicts: config,metric,mean,std,p_raw,p_adjusted,direction
/// (two rows per non-baseline config).
std::string render_verdicts_csv(std::span<const ReportRow> rows);

}  // namespace stenaug
