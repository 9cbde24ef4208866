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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stenaug/error.hpp"
#include "stenaug/rng.hpp"
#include "stenaug/augment.hpp"
#include "stenaug/stats.hpp"

using namespace stenaug;

namespace {

PairedSample sample_from_differences(const std::vector<double>& d) {
  PairedSample s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.labels.push_back("k" + std::to_string(i));
    s.a.push_back(d[i]);
    s.b.push_back(0.0);
  }
  return s;
}

// Enumeration oracle: midranks computed independently (insertion ranking),
// then all 2^n sign assignments enumerated literally.
double oracle_exact_p(const std::vector<double>& d) {
  std::vector<double> mag;
  std::vector<int> sign;
  for (double v : d) {
    if (v == 0.0) continue;
    mag.push_back(std::abs(v));
    sign.push_back(v > 0.0 ? 1 : -1);
  }
  const std::size_t n = mag.size();
  std::vector<double> rank(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    int less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mag[j] < mag[i]) ++less;
      if (mag[j] == mag[i]) ++equal;
    }
    rank[i] = less + (equal + 1) / 2.0;  // midrank
  }
  double w_plus = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (sign[i] > 0) w_plus += rank[i];
  }
  const double w_obs = std::min(w_plus, total - w_plus);

  std::size_t count_le = 0;
  const std::size_t assignments = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < assignments; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) w += rank[i];
    if (w <= w_obs + 1e-12) ++count_le;
  }
  return std::min(1.0, 2.0 * static_cast<double>(count_le) /
                           static_cast<double>(assignments));
}

}  // namespace

TEST_CASE("five all-positive differences: W = 0, exact p = 2/32") {
  const auto s = sample_from_differences({1, 2, 3, 4, 5});
  const auto r = wilcoxon_signed_rank(s, WilcoxonMode::exact);
  CHECK(r.statistic == 0.0);
  CHECK(r.n == 5);
  CHECK(r.p_two_sided == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("perfectly symmetric differences give p = 1") {
  const auto s = sample_from_differences({1, -1, 2, -2});
  const auto r = wilcoxon_signed_rank(s, WilcoxonMode::exact);
  CHECK(r.p_two_sided == 1.0);
}

TEST_CASE("all-zero differences are a degenerate sample") {
  PairedSample s;
  s.labels = {"a", "b", "c"};
  s.a = {0.5, 0.7, 0.9};
  s.b = {0.5, 0.7, 0.9};
  CHECK_THROWS_AS(wilcoxon_signed_rank(s), DegenerateSampleError);
}

TEST_CASE("zero differences are dropped before ranking") {
  const auto with_zeros = sample_from_differences({0, 1, 0, 2, 3, 4, 5, 0});
  const auto r = wilcoxon_signed_rank(with_zeros, WilcoxonMode::exact);
  CHECK(r.n == 5);
  CHECK(r.p_two_sided == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("exact p matches the full enumeration oracle") {
  RngStream rng(80);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 10));
    std::vector<double> d(n);
    for (auto& v : d) {
      // integer-valued differences force ties and midranks
      do {
        v = static_cast<double>(rng.uniform_int(-4, 4));
      } while (v == 0.0);
    }
    const auto r =
        wilcoxon_signed_rank(sample_from_differences(d), WilcoxonMode::exact);
    CHECK(r.p_two_sided == doctest::Approx(oracle_exact_p(d)).epsilon(1e-12));
  }
}

TEST_CASE("the normal approximation tracks the exact p for moderate n") {
  RngStream rng(81);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(12, 25));
    std::vector<double> d(n);
    for (auto& v : d) {
      do {
        v = rng.uniform(-1.0, 1.0);
      } while (v == 0.0);
    }
    const auto s = sample_from_differences(d);
    const auto exact = wilcoxon_signed_rank(s, WilcoxonMode::exact);
    const auto approx = wilcoxon_signed_rank(s, WilcoxonMode::normal_approx);
    CHECK(std::abs(exact.p_two_sided - approx.p_two_sided) < 0.01);
  }
}

TEST_CASE("auto mode switches to the approximation beyond n = 25") {
  RngStream rng(82);
  auto make = [&rng](int n) {
    std::vector<double> d(n);
    for (auto& v : d) v = rng.uniform(0.1, 1.0) * (rng.bernoulli(0.5) ? 1 : -1);
    return sample_from_differences(d);
  };
  CHECK(wilcoxon_signed_rank(make(20)).used_exact);
  CHECK(!wilcoxon_signed_rank(make(30)).used_exact);
}

TEST_CASE("swapping the paired columns flips nothing about p") {
  RngStream rng(83);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 12));
    PairedSample s;
    for (int i = 0; i < n; ++i) {
      s.labels.push_back("k" + std::to_string(i));
      s.a.push_back(rng.uniform(0.0, 1.0));
      s.b.push_back(rng.uniform(0.0, 1.0));
    }
    PairedSample swapped = s;
    std::swap(swapped.a, swapped.b);
    try {
      const auto r1 = wilcoxon_signed_rank(s, WilcoxonMode::exact);
      const auto r2 = wilcoxon_signed_rank(swapped, WilcoxonMode::exact);
      CHECK(r1.p_two_sided == doctest::Approx(r2.p_two_sided).epsilon(1e-14));
      CHECK(r1.statistic == r2.statistic);
    } catch (const DegenerateSampleError&) {
    }
  }
}

TEST_CASE("positive scaling of all differences changes neither W nor p") {
  const std::vector<double> d = {0.4, -0.2, 0.9, 1.4, -1.1, 0.3};
  std::vector<double> scaled = d;
  for (auto& v : scaled) v *= 137.5;
  const auto r1 =
      wilcoxon_signed_rank(sample_from_differences(d), WilcoxonMode::exact);
  const auto r2 = wilcoxon_signed_rank(sample_from_differences(scaled),
                                       WilcoxonMode::exact);
  CHECK(r1.statistic == r2.statistic);
  CHECK(r1.p_two_sided == r2.p_two_sided);
}

TEST_CASE("bonferroni is min(1, p n) and monotone") {
  CHECK(bonferroni(0.0004, 22) == doctest::Approx(0.0088).epsilon(1e-12));
  CHECK(bonferroni(0.2, 22) == 1.0);
  CHECK(bonferroni(0.37, 1) == 0.37);
  CHECK(bonferroni(0.01, 5) <= bonferroni(0.02, 5));
  CHECK(bonferroni(0.01, 5) <= bonferroni(0.01, 6));
  CHECK(bonferroni(0.01, 5) >= 0.01);
  CHECK_THROWS_AS(bonferroni(-0.1, 5), ValueError);
  CHECK_THROWS_AS(bonferroni(1.5, 5), ValueError);
  CHECK_THROWS_AS(bonferroni(0.5, 0), ValueError);
}

TEST_CASE("identical config and baseline is a no_difference verdict") {
  PairedSample s;
  for (int i = 0; i < 10; ++i) {
    s.labels.push_back("k" + std::to_string(i));
    s.a.push_back(0.3);
    s.b.push_back(0.3);
  }
  const auto v = compare_to_baseline(s, "cfg", "cer", 0.01, 22);
  CHECK(v.direction == Direction::no_difference);
  CHECK(v.degenerate);
  CHECK(v.p_adjusted == 1.0);
}

TEST_CASE("a uniform -0.01 offset over 30 pairs is significantly lower") {
  RngStream rng(84);
  PairedSample s;
  for (int i = 0; i < 30; ++i) {
    const double base = rng.uniform(0.3, 0.4);
    s.labels.push_back("k" + std::to_string(i));
    s.b.push_back(base);
    s.a.push_back(base - 0.01);
  }
  const auto v =
      compare_to_baseline(s, "cfg", "cer", 0.01, 22, WilcoxonMode::exact);
  CHECK(v.direction == Direction::lower);
  // all-negative differences: exact two-sided p = 2 * 2^-30
  CHECK(v.p_raw == doctest::Approx(2.0 * std::exp2(-30.0)).epsilon(1e-9));
  CHECK(v.p_adjusted < 0.01);
  CHECK(v.mean_config < v.mean_baseline);
}

TEST_CASE("direction flips with the sign of the effect") {
  PairedSample s;
  for (int i = 0; i < 20; ++i) {
    s.labels.push_back("k" + std::to_string(i));
    s.b.push_back(0.5);
    s.a.push_back(0.5 + 0.02 + 0.001 * i);
  }
  const auto v = compare_to_baseline(s, "cfg", "wer", 0.01, 22);
  CHECK(v.direction == Direction::higher);
  CHECK(direction_symbol(v.direction) == ">");
  CHECK(direction_symbol(Direction::lower) == "<");
  CHECK(direction_symbol(Direction::no_difference) == "-");
}

// ---------------------------------------------------------------------------
// Pairing result rows
// ---------------------------------------------------------------------------

namespace {

std::vector<RunResult> paired_rows(int folds, int runs, double base,
                                   double offset) {
  std::vector<RunResult> rows;
  for (int f = 0; f < folds; ++f)
    for (int r = 0; r < runs; ++r) {
      const double wobble = 0.001 * ((f * runs + r) % 7);
      rows.push_back({"baseline", f, r, "all", base + wobble, base + wobble});
      rows.push_back(
          {"cfg", f, r, "all", base + offset + wobble, base + offset + wobble});
    }
  return rows;
}

}  // namespace

TEST_CASE("per-run pairing aligns by fold, run and split") {
  const auto rows = paired_rows(5, 3, 0.3, -0.02);
  const auto s = pair_runs(rows, "baseline", "cfg", Metric::cer,
                           PairingMode::per_run);
  CHECK(s.a.size() == 15);
  for (std::size_t i = 0; i < s.a.size(); ++i)
    CHECK(s.a[i] == doctest::Approx(s.b[i] - 0.02));
}

TEST_CASE("fold-mean pairing reduces to one pair per fold") {
  const auto rows = paired_rows(5, 30, 0.3, 0.05);
  const auto s = pair_runs(rows, "baseline", "cfg", Metric::wer,
                           PairingMode::fold_mean);
  CHECK(s.a.size() == 5);
  for (std::size_t i = 0; i < s.a.size(); ++i)
    CHECK(s.a[i] == doctest::Approx(s.b[i] + 0.05));
}

TEST_CASE("unmatched pairing keys are an error that names them") {
  auto rows = paired_rows(2, 2, 0.3, 0.01);
  rows.pop_back();  // drop cfg fold1 run1
  try {
    pair_runs(rows, "baseline", "cfg", Metric::cer, PairingMode::per_run);
    FAIL("expected PairingError");
  } catch (const PairingError& e) {
    CHECK(std::string(e.what()).find("fold1:run1") != std::string::npos);
  }
}

TEST_CASE("duplicate rows for one key are rejected") {
  auto rows = paired_rows(1, 1, 0.3, 0.01);
  rows.push_back(rows.front());
  CHECK_THROWS_AS(
      pair_runs(rows, "baseline", "cfg", Metric::cer, PairingMode::per_run),
      PairingError);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

// 150 synthetic runs with exactly the requested mean and sample std:
// half the values at m + s c, half at m - s c with c = sqrt((n-1)/n).
void add_exact_runs(std::vector<RunResult>& rows, const std::string& config,
                    double mean_cer, double std_cer, double mean_wer,
                    double std_wer) {
  const int folds = 5, runs = 30;
  const int n = folds * runs;
  const double c = std::sqrt((n - 1.0) / n);
  int k = 0;
  for (int f = 0; f < folds; ++f)
    for (int r = 0; r < runs; ++r, ++k) {
      const double sign = k % 2 == 0 ? 1.0 : -1.0;
      rows.push_back({config, f, r, "all", mean_cer + sign * std_cer * c,
                      mean_wer + sign * std_wer * c});
    }
}

}  // namespace

TEST_CASE("report rows render Table-style mean (std) strings") {
  std::vector<RunResult> rows;
  add_exact_runs(rows, "baseline", 0.3174, 0.0123, 0.5715, 0.0145);
  add_exact_runs(rows, "rot10", 0.3585, 0.0753, 0.6113, 0.0659);

  const auto report = build_report(rows, "baseline", 0.01, 22,
                                   PairingMode::per_run,
                                   stenaug::AugmentConfig::preset_names());
  REQUIRE(report.size() == 2);
  CHECK(report[0].agg.config == "baseline");
  CHECK(!report[0].cer_verdict.has_value());
  CHECK(report[1].cer_verdict.has_value());

  const std::string text = render_report_text(report);
  CHECK(text.find("0.3174 (0.0123)") != std::string::npos);
  CHECK(text.find("0.5715 (0.0145)") != std::string::npos);
  CHECK(text.find("0.3585 (0.0753)") != std::string::npos);
  CHECK(text.find("N/A") != std::string::npos);

  const std::string csv = render_verdicts_csv(report);
  CHECK(csv.rfind("config,metric,mean,std,p_raw,p_adjusted,direction\n", 0) ==
        0);
  CHECK(csv.find("rot10,cer,") != std::string::npos);
  CHECK(csv.find("rot10,wer,") != std::string::npos);
}

TEST_CASE("report ordering is baseline, canonical presets, then extras") {
  std::vector<RunResult> rows;
  add_exact_runs(rows, "zmisc", 0.33, 0.01, 0.55, 0.01);
  add_exact_runs(rows, "shift", 0.31, 0.01, 0.54, 0.01);
  add_exact_runs(rows, "baseline", 0.32, 0.01, 0.56, 0.01);
  add_exact_runs(rows, "rot1.5", 0.30, 0.01, 0.53, 0.01);

  const auto report = build_report(rows, "baseline", 0.01, 22,
                                   PairingMode::per_run,
                                   stenaug::AugmentConfig::preset_names());
  REQUIRE(report.size() == 4);
  CHECK(report[0].agg.config == "baseline");
  CHECK(report[1].agg.config == "rot1.5");
  CHECK(report[2].agg.config == "shift");
  CHECK(report[3].agg.config == "zmisc");
}

TEST_CASE("a missing baseline is an error") {
  std::vector<RunResult> rows;
  add_exact_runs(rows, "shift", 0.31, 0.01, 0.54, 0.01);
  CHECK_THROWS_AS(build_report(rows, "baseline", 0.01, 22,
                               PairingMode::per_run,
                               stenaug::AugmentConfig::preset_names()),
                  ValueError);
}

TEST_CASE("a baseline-only report renders a single row") {
  std::vector<RunResult> rows;
  add_exact_runs(rows, "baseline", 0.3174, 0.0123, 0.5715, 0.0145);
  const auto report = build_report(rows, "baseline", 0.01, 22,
                                   PairingMode::per_run,
                                   stenaug::AugmentConfig::preset_names());
  REQUIRE(report.size() == 1);
  const std::string text = render_report_text(report);
  CHECK(text.find("baseline") != std::string::npos);
}
