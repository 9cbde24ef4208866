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
//
// Command-line harness: deterministic augmentation batches and previews,
// CER/WER scoring of predictions or logits, and Wilcoxon/Bonferroni
// comparison reports. Exit codes: 0 success, 1 usage, 2 data error,
// 3 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "stenaug/augment.hpp"
#include "stenaug/ctcdecode.hpp"
#include "stenaug/error.hpp"
#include "stenaug/metrics.hpp"
#include "stenaug/png_io.hpp"
#include "stenaug/stats.hpp"
#include "stenaug/textdata.hpp"
#include "stenaug/utf8.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace stenaug;

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

Alphabet load_alphabet(const std::string& path) {
  return path.empty() ? Alphabet::default_51() : Alphabet::load(path);
}

std::vector<AugmentConfig> resolve_configs(const std::string& preset,
                                           const std::string& config_file) {
  if (!config_file.empty() && !preset.empty())
    throw ValueError("--preset and --config are mutually exclusive");
  if (!config_file.empty())
    return {AugmentConfig::from_config_file(config_file)};
  if (preset.empty()) throw ValueError("one of --preset or --config is needed");
  return AugmentConfig::sequence(preset);
}

void check_unique_ids(const Manifest& manifest) {
  std::set<std::string> ids;
  for (const auto& r : manifest.records)
    if (!ids.insert(r.id()).second)
      throw ValueError("duplicate record id '" + r.id() +
                       "' in manifest (image stems must be unique)");
}

unsigned default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(count));
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

struct AugmentOptions {
  std::string manifest;
  std::string preset = "baseline";
  std::string config_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  double prob = 0.5;
  int epoch = 0;
  unsigned jobs = default_jobs();
  bool invert = false;
  bool luma = false;
};

int run_augment(const AugmentOptions& opts) {
  const Manifest manifest = Manifest::load(opts.manifest);
  check_unique_ids(manifest);
  const auto configs = resolve_configs(opts.preset, opts.config_file);
  for (const auto& c : configs) c.validate();

  fs::create_directories(opts.out_dir);
  const RngStream master(opts.seed);

  struct Outcome {
    bool failed = false;
    std::string error;
    std::vector<SampledParams> applied;
  };
  std::vector<Outcome> outcomes(manifest.records.size());

  parallel_for(manifest.records.size(), opts.jobs, [&](std::size_t i) {
    auto& out = outcomes[i];
    try {
      const auto& rec = manifest.records[i];
      GrayImage img = read_png(manifest.resolve_image(rec), opts.luma);
      if (opts.invert) img = invert(img);
      RngStream rng = master.child(i, static_cast<std::uint64_t>(opts.epoch));
      auto [augmented, trace] = compose(configs, opts.prob, img, rng);
      const GrayImage processed = preprocess_line(augmented);
      write_png(processed, fs::path(opts.out_dir) / (rec.id() + ".png"));
      out.applied = std::move(trace);
    } catch (const std::exception& e) {
      out.failed = true;
      out.error = e.what();
    }
  });

  const std::string preset_label =
      opts.config_file.empty() ? opts.preset : configs.front().name;

  std::ofstream trace_out(fs::path(opts.out_dir) / "params.jsonl",
                          std::ios::binary);
  if (!trace_out) throw Error("cannot write params.jsonl");
  std::size_t failures = 0;
  std::size_t applied_total = 0;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    json line;
    line["record"] = manifest.records[i].id();
    line["preset"] = preset_label;
    line["seed"] = opts.seed;
    line["epoch"] = opts.epoch;
    if (outcomes[i].failed) {
      line["error"] = outcomes[i].error;
      ++failures;
    } else {
      json applied = json::array();
      for (const auto& p : outcomes[i].applied) applied.push_back(p.to_json());
      line["applied"] = applied;
      applied_total += outcomes[i].applied.size();
    }
    trace_out << line.dump() << "\n";
  }
  trace_out.close();

  json run;
  run["seed"] = opts.seed;
  run["preset"] = preset_label;
  run["prob"] = opts.prob;
  run["epoch"] = opts.epoch;
  run["records"] = manifest.records.size();
  run["failures"] = failures;
  std::ofstream run_out(fs::path(opts.out_dir) / "run.json", std::ios::binary);
  run_out << run.dump(2) << "\n";
  run_out.close();

  std::cout << "augmented " << (manifest.records.size() - failures) << "/"
            << manifest.records.size() << " records, " << applied_total
            << " augmentations applied\n";
  if (failures > 0) {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i].failed)
        std::cerr << "record " << manifest.records[i].id() << ": "
                  << outcomes[i].error << "\n";
    std::cerr << failures << " record(s) failed\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// preview
// ---------------------------------------------------------------------------

struct PreviewOptions {
  std::string image;
  std::string preset;
  std::string config_file;
  std::string out = "preview.png";
  std::uint64_t seed = 0;
  int count = 4;
  bool invert = false;
  bool luma = false;
};

int run_preview(const PreviewOptions& opts) {
  if (opts.count < 1) throw ValueError("--count must be >= 1");
  const auto configs = resolve_configs(opts.preset, opts.config_file);
  GrayImage source = read_png(opts.image, opts.luma);
  if (opts.invert) source = invert(source);

  const RngStream master(opts.seed);
  constexpr std::uint8_t kPadGrey = 128;

  std::vector<GrayImage> tiles;
  json trace = json::array();
  for (int i = 0; i < opts.count; ++i) {
    RngStream rng = master.child(static_cast<std::uint64_t>(i));
    std::vector<SampledParams> params;
    if (configs.size() == 1 && i < 2) {
      // first two tiles show the range extremes
      params.push_back(
          extreme_params(configs.front(), source.width, i == 1, rng));
    } else if (configs.size() == 1) {
      params.push_back(sample_params(configs.front(), source.width, rng));
    } else {
      // composite preview: every element applied, randomly drawn
      int width = source.width;
      for (const auto& c : configs) {
        params.push_back(sample_params(c, width, rng));
        // masking depends on the current width; other kinds do not
      }
    }

    GrayImage img = source;
    GrayImage content_mask(source.width, source.height, 255);
    for (const auto& p : params) {
      img = apply_params(img, p);
      // the mask tracks which pixels still hold content; noise would
      // corrupt a constant mask, every other kind maps 255 -> 255
      if (p.kind != AugKind::gaussian_noise)
        content_mask = apply_params(content_mask, p);
      else
        content_mask = GrayImage(img.width, img.height, 255);
    }
    img = preprocess_line(img);
    content_mask = preprocess_line(content_mask);

    GrayImage vis = img;
    for (int y = 0; y < vis.height; ++y)
      for (int x = 0; x < vis.width; ++x)
        if (content_mask(x, y) < 128) vis(x, y) = std::max(vis(x, y), kPadGrey);
    tiles.push_back(std::move(vis));

    json tile_trace;
    tile_trace["tile"] = i;
    tile_trace["seed"] = opts.seed;
    json applied = json::array();
    for (const auto& p : params) applied.push_back(p.to_json());
    tile_trace["applied"] = applied;
    trace.push_back(tile_trace);
  }

  constexpr int kSeparator = 2;
  const int sheet_w = kLineWidth;
  const int sheet_h = static_cast<int>(tiles.size()) * kLineHeight +
                      (static_cast<int>(tiles.size()) - 1) * kSeparator;
  GrayImage sheet(sheet_w, sheet_h, 255);
  int y0 = 0;
  for (const auto& tile : tiles) {
    for (int y = 0; y < tile.height; ++y)
      for (int x = 0; x < tile.width; ++x) sheet(x, y0 + y) = tile(x, y);
    y0 += kLineHeight + kSeparator;
  }
  write_png(sheet, opts.out);

  std::ofstream trace_out(fs::path(opts.out).string() + ".jsonl",
                          std::ios::binary);
  for (const auto& t : trace) trace_out << t.dump() << "\n";

  std::cout << "wrote " << tiles.size() << " tiles to " << opts.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOptions {
  std::string manifest;
  std::string alphabet;
  std::string predictions;
  std::string logits;
  std::string split;  // empty = all records
  std::string out;    // per-line CSV
  std::string results;  // run-level CSV to append to
  std::string config_name;
  int fold = 0;
  int run = 0;
  bool have_fold_run = false;
  bool macro = false;
  bool strict = false;
};

std::map<std::string, std::string> load_predictions_tsv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path))
      throw FileNotFoundError("no such predictions file: " + path.string());
    throw Error("cannot open predictions file: " + path.string());
  }
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 'record_id<TAB>hypothesis'");
    const std::string id = line.substr(0, tab);
    const std::string hyp = normalize_utf8_to_utf8(line.substr(tab + 1));
    if (!out.emplace(id, hyp).second)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": duplicate record id '" + id + "'");
  }
  return out;
}

std::map<std::string, std::string> decode_logits(const fs::path& path,
                                                 const Alphabet& alphabet) {
  std::map<std::string, std::string> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string id = f.stem().string();
      if (!out.emplace(id, best_path_decode(read_logit_matrix(f), alphabet))
               .second)
        throw ValueError("duplicate logit record id '" + id + "'");
    }
  } else {
    for (const auto& [id, matrix] : read_logit_container(path))
      if (!out.emplace(id, best_path_decode(matrix, alphabet)).second)
        throw ValueError("duplicate logit record id '" + id + "'");
  }
  return out;
}

int run_score(const ScoreOptions& opts) {
  if (opts.predictions.empty() == opts.logits.empty())
    throw ValueError("exactly one of --predictions or --logits is needed");
  const Manifest manifest = Manifest::load(opts.manifest);
  check_unique_ids(manifest);
  const Alphabet alphabet = load_alphabet(opts.alphabet);

  const auto hypotheses = opts.predictions.empty()
                              ? decode_logits(opts.logits, alphabet)
                              : load_predictions_tsv(opts.predictions);

  std::optional<Split> split_filter;
  if (!opts.split.empty() && opts.split != "all")
    split_filter = split_from_string(opts.split);

  struct LineScore {
    std::string id;
    std::string split;
    double cer = 0.0, wer = 0.0;
  };
  std::vector<LineScore> lines;
  struct SplitTotals {
    ErrorCounts chars, words;
    double cer_sum = 0.0, wer_sum = 0.0;
    int n = 0;
  };
  std::map<std::string, SplitTotals> totals;  // per split plus "all"
  std::vector<std::string> missing;
  std::vector<std::string> errors;

  for (const auto& rec : manifest.records) {
    if (split_filter && rec.split != *split_filter) continue;
    const auto it = hypotheses.find(rec.id());
    if (it == hypotheses.end()) {
      missing.push_back(rec.id());
      continue;
    }
    try {
      const ErrorCounts cc = char_error_counts(it->second, rec.transliteration);
      const ErrorCounts wc = word_error_counts(it->second, rec.transliteration);
      LineScore ls{rec.id(), std::string(to_string(rec.split)), cc.rate(),
                   wc.rate()};
      for (const std::string& key : {std::string("all"), ls.split}) {
        auto& t = totals[key];
        t.chars += cc;
        t.words += wc;
        t.cer_sum += ls.cer;
        t.wer_sum += ls.wer;
        ++t.n;
      }
      lines.push_back(std::move(ls));
    } catch (const Error& e) {
      errors.push_back(rec.id() + ": " + e.what());
    }
  }

  if (!opts.out.empty()) {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw Error("cannot open per-line output: " + opts.out);
    out << "record_id,split,cer,wer\n";
    char buf[64];
    for (const auto& ls : lines) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", ls.cer, ls.wer);
      out << ls.id << ',' << ls.split << ',' << buf << '\n';
    }
  }

  auto micro_or_macro = [&](const SplitTotals& t, bool wer_side) {
    if (opts.macro)
      return (wer_side ? t.wer_sum : t.cer_sum) / std::max(1, t.n);
    return wer_side ? t.words.rate() : t.chars.rate();
  };

  for (const auto& [key, t] : totals) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "split=%s n=%d micro_cer=%.6f micro_wer=%.6f "
                  "macro_cer=%.6f macro_wer=%.6f",
                  key.c_str(), t.n, t.chars.rate(), t.words.rate(),
                  t.cer_sum / std::max(1, t.n), t.wer_sum / std::max(1, t.n));
    std::cout << buf << "\n";
  }

  if (!opts.results.empty()) {
    if (opts.config_name.empty() || !opts.have_fold_run)
      throw ValueError("--results needs --config, --fold and --run");
    std::vector<RunResult> rows;
    if (fs::exists(opts.results)) rows = read_results_csv(opts.results);
    for (const auto& [key, t] : totals) {
      RunResult r;
      r.config = opts.config_name;
      r.fold = opts.fold;
      r.run = opts.run;
      r.split = key;
      r.cer = micro_or_macro(t, false);
      r.wer = micro_or_macro(t, true);
      rows.push_back(std::move(r));
    }
    write_results_csv(rows, opts.results);
  }

  for (const auto& id : missing)
    std::cerr << "missing prediction for record " << id << "\n";
  for (const auto& e : errors) std::cerr << "scoring error: " << e << "\n";
  if ((!missing.empty() || !errors.empty()) && opts.strict) return 2;
  return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareOptions {
  std::vector<std::string> results_files;
  std::string baseline = "baseline";
  std::string split = "all";
  std::string out;
  double alpha = 0.01;
  int n_comparisons = 22;
  std::string pair_on = "run";
};

int run_compare(const CompareOptions& opts) {
  std::vector<RunResult> all;
  for (const auto& path : opts.results_files) {
    auto rows = read_results_csv(path);
    all.insert(all.end(), rows.begin(), rows.end());
  }

  std::vector<RunResult> filtered;
  std::set<std::string> splits_seen;
  for (const auto& r : all) splits_seen.insert(r.split);
  std::string split = opts.split;
  if (!splits_seen.count(split)) {
    if (splits_seen.size() == 1) {
      split = *splits_seen.begin();
      std::cerr << "note: no rows with split '" << opts.split
                << "', using '" << split << "'\n";
    } else {
      std::string have;
      for (const auto& s : splits_seen) have += " " + s;
      throw ValueError("no rows with split '" + opts.split +
                       "'; available:" + have);
    }
  }
  for (const auto& r : all)
    if (r.split == split) filtered.push_back(r);

  const PairingMode mode = opts.pair_on == "fold-mean" ? PairingMode::fold_mean
                                                       : PairingMode::per_run;
  const auto rows =
      build_report(filtered, opts.baseline, opts.alpha, opts.n_comparisons,
                   mode, AugmentConfig::preset_names());

  std::cout << render_report_text(rows);
  if (!opts.out.empty()) {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw Error("cannot open verdicts output: " + opts.out);
    out << render_verdicts_csv(rows);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateOptions {
  std::string manifest;
  std::string alphabet;
  bool check_files = false;
  bool strict = false;
};

int run_validate(const ValidateOptions& opts) {
  const Manifest manifest = Manifest::load(opts.manifest);
  const Alphabet alphabet = load_alphabet(opts.alphabet);
  const ValidationReport report =
      validate_lion_layout(manifest, alphabet, opts.check_files);
  std::cout << report.to_string();
  if (opts.strict && (!report.canonical || report.has_violations())) return 2;
  return 0;
}

void report_error(const std::exception& e, const char* kind, bool as_json) {
  if (as_json) {
    json j;
    j["error"] = kind;
    j["message"] = e.what();
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "error: " << e.what() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stenaug: deterministic line-image augmentation and recognition "
      "evaluation toolkit"};
  app.require_subcommand(1);
  bool json_errors = false;
  app.add_flag("--json", json_errors, "machine-readable errors on stderr");

  int exit_code = 0;

  AugmentOptions aug;
  auto* cmd_augment = app.add_subcommand(
      "augment", "apply an augmentation preset to every manifest record");
  cmd_augment->add_option("--manifest", aug.manifest, "manifest TSV")->required();
  cmd_augment->add_option("--preset", aug.preset,
                          "preset name or 'combined-top3'");
  cmd_augment->add_option("--config", aug.config_file,
                          "custom augmentation config file");
  cmd_augment->add_option("--out", aug.out_dir, "output directory")->required();
  cmd_augment->add_option("--seed", aug.seed, "master seed");
  cmd_augment->add_option("--prob", aug.prob,
                          "per-record application probability");
  cmd_augment->add_option("--epoch", aug.epoch, "epoch index for the coin");
  cmd_augment->add_option("--jobs", aug.jobs, "worker threads");
  cmd_augment->add_flag("--invert", aug.invert,
                        "invert intensities on ingestion");
  cmd_augment->add_flag("--luma", aug.luma, "accept color PNGs via BT.601");
  cmd_augment->callback([&] { exit_code = run_augment(aug); });

  PreviewOptions prev;
  auto* cmd_preview = app.add_subcommand(
      "preview", "render a contact sheet of augmented variants");
  cmd_preview->add_option("--image", prev.image, "input line image")->required();
  cmd_preview->add_option("--preset", prev.preset, "preset name");
  cmd_preview->add_option("--config", prev.config_file, "custom config file");
  cmd_preview->add_option("--out", prev.out, "output PNG");
  cmd_preview->add_option("--seed", prev.seed, "master seed");
  cmd_preview->add_option("--count", prev.count, "number of tiles");
  cmd_preview->add_flag("--invert", prev.invert, "invert on ingestion");
  cmd_preview->add_flag("--luma", prev.luma, "accept color PNGs via BT.601");
  cmd_preview->callback([&] { exit_code = run_preview(prev); });

  ScoreOptions score;
  auto* cmd_score = app.add_subcommand(
      "score", "compute CER/WER for predictions against a manifest");
  cmd_score->add_option("--manifest", score.manifest, "manifest TSV")->required();
  cmd_score->add_option("--alphabet", score.alphabet,
                        "alphabet file (defaults to the built-in 51 symbols)");
  cmd_score->add_option("--predictions", score.predictions,
                        "TSV: record_id<TAB>hypothesis");
  cmd_score->add_option("--logits", score.logits,
                        "logit matrix directory or container file");
  cmd_score->add_option("--split", score.split,
                        "restrict to one split (cv, test_in_domain, "
                        "test_out_of_domain)");
  cmd_score->add_option("--out", score.out, "per-line CSV output");
  cmd_score->add_option("--results", score.results,
                        "run-level results CSV to append to");
  cmd_score->add_option("--config", score.config_name,
                        "config name for the results row");
  auto* fold_opt = cmd_score->add_option("--fold", score.fold, "fold index");
  auto* run_opt = cmd_score->add_option("--run", score.run, "run index");
  cmd_score->add_flag("--macro", score.macro,
                      "aggregate per-line rates instead of pooling counts");
  cmd_score->add_flag("--strict", score.strict,
                      "fail when predictions are missing");
  cmd_score->callback([&] {
    score.have_fold_run = fold_opt->count() > 0 && run_opt->count() > 0;
    exit_code = run_score(score);
  });

  CompareOptions cmp;
  auto* cmd_compare = app.add_subcommand(
      "compare", "Wilcoxon/Bonferroni comparison against the baseline");
  cmd_compare->add_option("results", cmp.results_files, "results CSV files")
      ->required()
      ->expected(-1);
  cmd_compare->add_option("--baseline", cmp.baseline, "baseline config name");
  cmd_compare->add_option("--alpha", cmp.alpha, "significance level");
  cmd_compare->add_option("--n-comparisons", cmp.n_comparisons,
                          "Bonferroni comparison count");
  cmd_compare->add_option("--pair-on", cmp.pair_on,
                          "pairing unit: run or fold-mean")
      ->check(CLI::IsMember({"run", "fold-mean"}));
  cmd_compare->add_option("--split", cmp.split, "split to compare");
  cmd_compare->add_option("--out", cmp.out, "verdicts CSV output");
  cmd_compare->callback([&] { exit_code = run_compare(cmp); });

  ValidateOptions val;
  auto* cmd_validate = app.add_subcommand(
      "validate", "check a manifest against the canonical dataset layout");
  cmd_validate->add_option("--manifest", val.manifest, "manifest TSV")
      ->required();
  cmd_validate->add_option("--alphabet", val.alphabet, "alphabet file");
  cmd_validate->add_flag("--check-files", val.check_files,
                         "verify referenced images exist");
  cmd_validate->add_flag("--strict", val.strict,
                         "nonzero exit on any deviation or violation");
  cmd_validate->callback([&] { exit_code = run_validate(val); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  } catch (const Error& e) {
    report_error(e, e.kind(), json_errors);
    return 2;
  } catch (const std::exception& e) {
    report_error(e, "internal", json_errors);
    return 3;
  }
  return exit_code;
}
