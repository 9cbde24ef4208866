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

#include "stenaug/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "stenaug/error.hpp"

namespace stenaug {

void PairedSample::validate() const {
  if (a.size() != b.size() || a.size() != labels.size())
    throw ValueError("paired sample arrays have mismatched lengths");
  if (a.empty()) throw ValueError("paired sample is empty");
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second)
      throw ValueError("duplicate pairing key '" + l + "'");
}

namespace {

// Midranks of |d| scaled by 2 so ties stay integral.
std::vector<std::int64_t> scaled_ranks(const std::vector<double>& abs_d) {
  const std::size_t n = abs_d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return abs_d[i] < abs_d[j]; });

  std::vector<std::int64_t> rank2(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    // positions i..j (0-based) share the midrank (i+1 + j+1) / 2
    const std::int64_t two_mid = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = two_mid;
    i = j + 1;
  }
  return rank2;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(2 W+ <= target) over all 2^n sign assignments, by convolving the
// generating polynomial prod_i (1 + x^{r2_i}).
double exact_cdf_le(const std::vector<std::int64_t>& rank2,
                    std::int64_t target) {
  const std::int64_t total = std::accumulate(rank2.begin(), rank2.end(),
                                             std::int64_t{0});
  std::vector<double> coeff(static_cast<std::size_t>(total) + 1, 0.0);
  coeff[0] = 1.0;
  std::int64_t upper = 0;
  for (const std::int64_t r : rank2) {
    upper += r;
    for (std::int64_t s = upper; s >= r; --s)
      coeff[static_cast<std::size_t>(s)] +=
          coeff[static_cast<std::size_t>(s - r)];
  }
  double count = 0.0;
  const std::int64_t cap = std::min(target, total);
  for (std::int64_t s = 0; s <= cap; ++s)
    count += coeff[static_cast<std::size_t>(s)];
  return count / std::exp2(static_cast<double>(rank2.size()));
}

}  // namespace

WilcoxonResult wilcoxon_from_differences(std::span<const double> d,
                                         WilcoxonMode mode) {
  std::vector<double> abs_d;
  std::vector<bool> positive;
  for (double v : d) {
    if (v == 0.0) continue;  // classical drop-zeros rule
    abs_d.push_back(std::abs(v));
    positive.push_back(v > 0.0);
  }
  if (abs_d.empty())
    throw DegenerateSampleError(
        "all paired differences are zero: no evidence either way");

  const auto rank2 = scaled_ranks(abs_d);
  std::int64_t w_plus2 = 0;
  std::int64_t total2 = 0;
  for (std::size_t i = 0; i < rank2.size(); ++i) {
    total2 += rank2[i];
    if (positive[i]) w_plus2 += rank2[i];
  }
  const std::int64_t w_minus2 = total2 - w_plus2;
  const std::int64_t w_min2 = std::min(w_plus2, w_minus2);

  WilcoxonResult result;
  result.n = static_cast<int>(rank2.size());
  result.statistic = static_cast<double>(w_min2) / 2.0;

  const bool exact = mode == WilcoxonMode::exact ||
                     (mode == WilcoxonMode::auto_select && result.n <= 25);
  result.used_exact = exact;
  if (exact) {
    // W+ is symmetric about total/2 under the null, so the two-sided p is
    // 2 P(W+ <= w_min), capped at 1.
    result.p_two_sided = std::min(1.0, 2.0 * exact_cdf_le(rank2, w_min2));
  } else {
    // W+ = sum r_i X_i over iid sign indicators: mu = sum r / 2,
    // var = sum r^2 / 4, fourth cumulant = -sum r^4 / 8. Midranks feed in
    // directly, so ties are corrected for. The Edgeworth kurtosis term
    // keeps the approximation within ~1e-3 of the exact p down to n = 10,
    // where the plain continuity-corrected normal drifts past 0.01.
    const double mu = static_cast<double>(total2) / 4.0;
    double var = 0.0;
    double sum_r4 = 0.0;
    for (const std::int64_t r : rank2) {
      const double rr = static_cast<double>(r) / 2.0;
      var += rr * rr;
      sum_r4 += rr * rr * rr * rr;
    }
    var /= 4.0;
    const double excess_kurtosis = (-sum_r4 / 8.0) / (var * var);
    const double w = static_cast<double>(w_min2) / 2.0;
    const double z = (w - mu + 0.5) / std::sqrt(var);
    const double density =
        std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
    const double cdf =
        normal_cdf(z) - excess_kurtosis / 24.0 * (z * z * z - 3.0 * z) * density;
    result.p_two_sided = std::clamp(2.0 * cdf, 0.0, 1.0);
  }
  return result;
}

WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample,
                                    WilcoxonMode mode) {
  sample.validate();
  std::vector<double> d(sample.a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = sample.a[i] - sample.b[i];
  return wilcoxon_from_differences(d, mode);
}

double bonferroni(double p, int n) {
  if (p < 0.0 || p > 1.0) throw ValueError("p-value must lie in [0, 1]");
  if (n < 1) throw ValueError("comparison count must be >= 1");
  return std::min(1.0, p * static_cast<double>(n));
}

std::string_view direction_symbol(Direction d) {
  switch (d) {
    case Direction::higher: return ">";
    case Direction::lower: return "<";
    case Direction::no_difference: return "-";
  }
  return "?";
}

Verdict compare_to_baseline(const PairedSample& sample,
                            const std::string& config,
                            const std::string& metric, double alpha,
                            int n_comparisons, WilcoxonMode mode) {
  sample.validate();
  Verdict v;
  v.config = config;
  v.metric = metric;
  const auto n = static_cast<double>(sample.a.size());
  v.mean_config =
      std::accumulate(sample.a.begin(), sample.a.end(), 0.0) / n;
  v.mean_baseline =
      std::accumulate(sample.b.begin(), sample.b.end(), 0.0) / n;

  try {
    const WilcoxonResult w = wilcoxon_signed_rank(sample, mode);
    v.p_raw = w.p_two_sided;
  } catch (const DegenerateSampleError&) {
    // identical samples: zero effect, reported as no_difference at p = 1
    v.degenerate = true;
    v.p_raw = 1.0;
  }
  v.p_adjusted = bonferroni(v.p_raw, n_comparisons);
  if (v.p_adjusted < alpha && v.mean_config != v.mean_baseline)
    v.direction = v.mean_config > v.mean_baseline ? Direction::higher
                                                  : Direction::lower;
  else
    v.direction = Direction::no_difference;
  return v;
}

// ---------------------------------------------------------------------------
// Pairing result rows
// ---------------------------------------------------------------------------

PairedSample pair_runs(std::span<const RunResult> results,
                       const std::string& baseline_config,
                       const std::string& config, Metric metric,
                       PairingMode mode) {
  auto value_of = [metric](const RunResult& r) {
    return metric == Metric::cer ? r.cer : r.wer;
  };

  std::map<std::string, double> base_vals, config_vals;
  std::map<int, std::pair<double, int>> base_folds, config_folds;
  for (const auto& r : results) {
    const bool is_base = r.config == baseline_config;
    const bool is_config = r.config == config;
    if (!is_base && !is_config) continue;
    if (mode == PairingMode::per_run) {
      const std::string key = "fold" + std::to_string(r.fold) + ":run" +
                              std::to_string(r.run) + ":" + r.split;
      auto& dest = is_base ? base_vals : config_vals;
      if (!dest.emplace(key, value_of(r)).second)
        throw PairingError("duplicate result row for " + r.config + " at " +
                           key);
    } else {
      auto& dest = is_base ? base_folds : config_folds;
      auto& [sum, count] = dest[r.fold];
      sum += value_of(r);
      ++count;
    }
  }
  if (mode == PairingMode::fold_mean) {
    for (const auto& [fold, sc] : base_folds)
      base_vals["fold" + std::to_string(fold)] = sc.first / sc.second;
    for (const auto& [fold, sc] : config_folds)
      config_vals["fold" + std::to_string(fold)] = sc.first / sc.second;
  }

  std::vector<std::string> unmatched;
  for (const auto& [key, unused] : base_vals)
    if (!config_vals.count(key)) unmatched.push_back(key + " (baseline only)");
  for (const auto& [key, unused] : config_vals)
    if (!base_vals.count(key)) unmatched.push_back(key + " (" + config + " only)");
  if (!unmatched.empty()) {
    std::string msg = "pairing keys mismatch between '" + baseline_config +
                      "' and '" + config + "':";
    for (const auto& k : unmatched) msg += " " + k;
    throw PairingError(msg);
  }
  if (base_vals.empty())
    throw PairingError("no paired rows between '" + baseline_config +
                       "' and '" + config + "'");

  PairedSample s;
  for (const auto& [key, bv] : base_vals) {
    s.labels.push_back(key);
    s.a.push_back(config_vals.at(key));
    s.b.push_back(bv);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Report assembly and rendering
// ---------------------------------------------------------------------------

std::vector<ReportRow> build_report(
    std::span<const RunResult> results, const std::string& baseline_config,
    double alpha, int n_comparisons, PairingMode mode,
    const std::vector<std::string>& canonical_order) {
  std::set<std::string> present;
  for (const auto& r : results) present.insert(r.config);
  if (!present.count(baseline_config))
    throw ValueError("baseline config '" + baseline_config +
                     "' missing from results");

  std::vector<std::string> order;
  order.push_back(baseline_config);
  for (const auto& name : canonical_order)
    if (name != baseline_config && present.count(name)) order.push_back(name);
  for (const auto& name : present)
    if (std::find(order.begin(), order.end(), name) == order.end())
      order.push_back(name);  // std::set iterates in name order

  std::vector<ReportRow> rows;
  for (const auto& name : order) {
    ReportRow row;
    row.agg = aggregate(results, name);
    if (name != baseline_config) {
      row.cer_verdict = compare_to_baseline(
          pair_runs(results, baseline_config, name, Metric::cer, mode), name,
          "cer", alpha, n_comparisons);
      row.wer_verdict = compare_to_baseline(
          pair_runs(results, baseline_config, name, Metric::wer, mode), name,
          "wer", alpha, n_comparisons);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string mean_std_cell(double mean, double stdev) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f (%.4f)", mean, stdev);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_report_text(std::span<const ReportRow> rows) {
  std::size_t name_w = std::string("augmentation").size();
  for (const auto& row : rows) name_w = std::max(name_w, row.agg.config.size());
  name_w += 2;
  const std::size_t cell_w = std::string("0.0000 (0.0000)").size() + 2;
  const std::size_t cmp_w = std::string("CER cmp").size() + 2;

  std::ostringstream os;
  os << pad("augmentation", name_w) << pad("CER (std.dev.)", cell_w)
     << pad("CER cmp", cmp_w) << pad("WER (std.dev.)", cell_w) << "WER cmp\n";
  for (const auto& row : rows) {
    const std::string cer_cmp =
        row.cer_verdict ? std::string(direction_symbol(row.cer_verdict->direction))
                        : std::string("N/A");
    const std::string wer_cmp =
        row.wer_verdict ? std::string(direction_symbol(row.wer_verdict->direction))
                        : std::string("N/A");
    os << pad(row.agg.config, name_w)
       << pad(mean_std_cell(row.agg.mean_cer, row.agg.std_cer), cell_w)
       << pad(cer_cmp, cmp_w)
       << pad(mean_std_cell(row.agg.mean_wer, row.agg.std_wer), cell_w)
       << wer_cmp << "\n";
  }
  return os.str();
}

std::string render_verdicts_csv(std::span<const ReportRow> rows) {
  std::ostringstream os;
  os << "config,metric,mean,std,p_raw,p_adjusted,direction\n";
  char buf[160];
  for (const auto& row : rows) {
    for (const auto* v : {&row.cer_verdict, &row.wer_verdict}) {
      if (!v->has_value()) continue;
      const Verdict& verdict = **v;
      const bool is_cer = verdict.metric == "cer";
      std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%.10g,%.10g,%s",
                    row.agg.config.c_str(), verdict.metric.c_str(),
                    is_cer ? row.agg.mean_cer : row.agg.mean_wer,
                    is_cer ? row.agg.std_cer : row.agg.std_wer, verdict.p_raw,
                    verdict.p_adjusted,
                    std::string(direction_symbol(verdict.direction)).c_str());
      os << buf << "\n";
    }
  }
  return os.str();
}

}  // namespace stenaug
