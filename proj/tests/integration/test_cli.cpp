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
// End-to-end checks of the command-line surface. The binary path arrives in
// STENAUG_CLI (set by ctest); without it the suite reports nothing to do.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stenaug/ctcdecode.hpp"
#include "stenaug/metrics.hpp"
#include "stenaug/png_io.hpp"
#include "stenaug/raster.hpp"
#include "stenaug/rng.hpp"
#include "stenaug/textdata.hpp"

using namespace stenaug;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("STENAUG_CLI");
  return p ? p : "";
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "stenaug_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// A small synthetic line image: black background, a few bright strokes.
GrayImage synthetic_line(int w, int h, std::uint64_t seed) {
  GrayImage img(w, h);
  RngStream rng(seed);
  const int strokes = 6 + static_cast<int>(rng.uniform_int(0, 6));
  for (int s = 0; s < strokes; ++s) {
    const int cx = static_cast<int>(rng.uniform_int(4, w - 5));
    const int cy = static_cast<int>(rng.uniform_int(4, h - 5));
    const int len = static_cast<int>(rng.uniform_int(3, 10));
    for (int i = -len; i <= len; ++i) {
      const int x = std::clamp(cx + i, 0, w - 1);
      const int y = std::clamp(cy + i / 2, 0, h - 1);
      img(x, y) = static_cast<std::uint8_t>(rng.uniform_int(180, 255));
    }
  }
  return img;
}

// Writes images + manifest; returns the manifest path.
fs::path write_dataset(const fs::path& dir, int count) {
  fs::create_directories(dir / "img");
  Manifest m;
  m.source_path = dir / "manifest.tsv";
  for (int i = 0; i < count; ++i) {
    const std::string name = "line_" + std::to_string(i) + ".png";
    write_png(synthetic_line(180, 48, 9000 + i), dir / "img" / name);
    LineRecord r;
    r.image_path = "img/" + name;
    r.fold = i % 5;
    r.split = Split::cv;
    r.transliteration = "rad " + std::to_string(i);
    m.records.push_back(r);
  }
  m.save(dir / "manifest.tsv");
  return dir / "manifest.tsv";
}

bool trees_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> fa, fb;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) fa.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) fb.push_back(fs::relative(e.path(), b));
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& rel : fa)
    if (read_file(a / rel) != read_file(b / rel)) return false;
  return true;
}

}  // namespace

TEST_CASE("augment runs are byte-identical for identical specs") {
  if (cli_path().empty()) {
    MESSAGE("STENAUG_CLI not set; skipping");
    return;
  }
  const fs::path dir = fresh_dir("augment_determinism");
  const fs::path manifest = write_dataset(dir, 12);

  const std::string common = "augment --manifest " + manifest.string() +
                             " --preset combined-top3 --seed 7 --prob 0.5";
  CHECK(run(common + " --out " + (dir / "out1").string() + " --jobs 1") == 0);
  CHECK(run(common + " --out " + (dir / "out2").string() + " --jobs 2") == 0);
  CHECK(trees_identical(dir / "out1", dir / "out2"));

  // outputs exist and have the fixed geometry
  const GrayImage one = read_png(dir / "out1" / "line_0.png");
  CHECK(one.width == kLineWidth);
  CHECK(one.height == kLineHeight);
  CHECK(fs::exists(dir / "out1" / "params.jsonl"));
  CHECK(fs::exists(dir / "out1" / "run.json"));

  // a different seed changes the tree
  CHECK(run("augment --manifest " + manifest.string() +
            " --preset combined-top3 --seed 8 --prob 0.5 --out " +
            (dir / "out3").string()) == 0);
  CHECK(!trees_identical(dir / "out1", dir / "out3"));
}

TEST_CASE("baseline augment emits preprocessed originals") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("augment_baseline");
  const fs::path manifest = write_dataset(dir, 3);
  CHECK(run("augment --manifest " + manifest.string() +
            " --preset baseline --seed 1 --out " + (dir / "out").string()) ==
        0);
  const GrayImage source = read_png(dir / "img" / "line_0.png");
  const GrayImage expected = preprocess_line(source);
  CHECK(read_png(dir / "out" / "line_0.png") == expected);
}

TEST_CASE("scoring logits equals scoring the decoded text") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("score_paths");
  fs::create_directories(dir / "img");

  // two records with known transliterations
  Manifest m;
  m.source_path = dir / "manifest.tsv";
  for (int i = 0; i < 2; ++i) {
    const std::string name = "line_" + std::to_string(i) + ".png";
    write_png(synthetic_line(100, 40, 100 + i), dir / "img" / name);
    LineRecord r;
    r.image_path = "img/" + name;
    r.fold = 0;
    r.split = Split::cv;
    r.transliteration = i == 0 ? "ab" : "ba";
    m.records.push_back(r);
  }
  m.save(dir / "manifest.tsv");

  // alphabet {a, b}; logits decoding to "ab" and "aa"
  const fs::path alpha = dir / "alphabet.txt";
  std::ofstream(alpha, std::ios::binary) << "a\nb\n";
  auto one_hot = [](const std::vector<int>& path) {
    LogitMatrix mat;
    mat.timesteps = static_cast<int>(path.size());
    mat.classes = 3;
    mat.values.assign(path.size() * 3, 0.0);
    for (std::size_t t = 0; t < path.size(); ++t) mat.at(static_cast<int>(t), path[t]) = 1.0;
    return mat;
  };
  std::vector<std::pair<std::string, LogitMatrix>> records;
  records.emplace_back("line_0", one_hot({1, 1, 0, 2}));  // "ab"
  records.emplace_back("line_1", one_hot({1, 0, 1}));     // "aa"
  write_logit_container(records, dir / "logits.txt");

  // pre-decoded predictions for the same hypotheses
  std::ofstream(dir / "pred.tsv", std::ios::binary)
      << "line_0\tab\nline_1\taa\n";

  const std::string base = "score --manifest " + (dir / "manifest.tsv").string() +
                           " --alphabet " + alpha.string();
  CHECK(run(base + " --logits " + (dir / "logits.txt").string() + " --out " +
            (dir / "from_logits.csv").string()) == 0);
  CHECK(run(base + " --predictions " + (dir / "pred.tsv").string() +
            " --out " + (dir / "from_text.csv").string()) == 0);
  CHECK(read_file(dir / "from_logits.csv") ==
        read_file(dir / "from_text.csv"));

  // line_0 is exact, line_1 has 1 substitution over 2 chars
  const auto csv = read_file(dir / "from_text.csv");
  CHECK(csv.find("line_0,cv,0.000000,0.000000") != std::string::npos);
  CHECK(csv.find("line_1,cv,0.500000,1.000000") != std::string::npos);
}

TEST_CASE("strict scoring fails on missing predictions") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("score_strict");
  const fs::path manifest = write_dataset(dir, 3);
  std::ofstream(dir / "partial.tsv", std::ios::binary) << "line_0\tx\n";
  const std::string base = "score --manifest " + manifest.string() +
                           " --predictions " + (dir / "partial.tsv").string();
  CHECK(run(base) == 0);
  CHECK(run(base + " --strict") == 2);
}

TEST_CASE("compare renders verdicts and fails without a baseline") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("compare");

  std::vector<RunResult> rows;
  RngStream rng(55);
  for (int f = 0; f < 5; ++f)
    for (int r = 0; r < 30; ++r) {
      const double wobble = rng.uniform(-0.004, 0.004);
      rows.push_back({"baseline", f, r, "all", 0.32 + wobble, 0.57 + wobble});
      rows.push_back({"shift", f, r, "all", 0.30 + wobble, 0.55 + wobble});
      rows.push_back({"rot10", f, r, "all", 0.36 + wobble, 0.61 + wobble});
    }
  write_results_csv(rows, dir / "results.csv");

  CHECK(run("compare " + (dir / "results.csv").string() + " --out " +
            (dir / "verdicts.csv").string()) == 0);
  const std::string verdicts = read_file(dir / "verdicts.csv");
  CHECK(verdicts.find("config,metric,mean,std,p_raw,p_adjusted,direction") !=
        std::string::npos);
  CHECK(verdicts.find("shift,cer") != std::string::npos);
  CHECK(verdicts.find("<") != std::string::npos);
  CHECK(verdicts.find(">") != std::string::npos);

  // identical CSV compared against itself: all no_difference
  std::vector<RunResult> same;
  for (int f = 0; f < 5; ++f)
    for (int r = 0; r < 30; ++r) {
      same.push_back({"baseline", f, r, "all", 0.32, 0.57});
      same.push_back({"mirror", f, r, "all", 0.32, 0.57});
    }
  write_results_csv(same, dir / "same.csv");
  CHECK(run("compare " + (dir / "same.csv").string() + " --out " +
            (dir / "same_verdicts.csv").string()) == 0);
  const std::string same_verdicts = read_file(dir / "same_verdicts.csv");
  CHECK(same_verdicts.find("mirror,cer") != std::string::npos);
  CHECK(same_verdicts.find("<") == std::string::npos);
  CHECK(same_verdicts.find(">") == std::string::npos);

  // no baseline rows -> data error
  std::vector<RunResult> orphan = {{"shift", 0, 0, "all", 0.3, 0.5}};
  write_results_csv(orphan, dir / "orphan.csv");
  CHECK(run("compare " + (dir / "orphan.csv").string()) == 2);
}

TEST_CASE("validate prints the canonical verdict and honors --strict") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("validate");

  Manifest m;
  m.source_path = dir / "m.tsv";
  int serial = 0;
  for (int fold = 0; fold < 5; ++fold)
    for (int i = 0; i < 306; ++i) {
      LineRecord r;
      r.image_path = "img/l" + std::to_string(serial++) + ".png";
      r.fold = fold;
      r.split = Split::cv;
      r.transliteration = "text";
      m.records.push_back(r);
    }
  for (int i = 0; i < 474; ++i)
    m.records.push_back(
        {"img/t" + std::to_string(i) + ".png", std::nullopt,
         Split::test_in_domain, "text"});
  for (int i = 0; i < 191; ++i)
    m.records.push_back(
        {"img/o" + std::to_string(i) + ".png", std::nullopt,
         Split::test_out_of_domain, "text"});
  m.save(dir / "m.tsv");

  CHECK(run("validate --manifest " + (dir / "m.tsv").string()) == 0);
  CHECK(run("validate --manifest " + (dir / "m.tsv").string() + " --strict") ==
        0);

  // drop one record: still exit 0 by default, nonzero in strict mode
  m.records.pop_back();
  m.save(dir / "short.tsv");
  CHECK(run("validate --manifest " + (dir / "short.tsv").string()) == 0);
  CHECK(run("validate --manifest " + (dir / "short.tsv").string() +
            " --strict") == 2);
}

TEST_CASE("preview sheets are deterministic and carry a params trace") {
  if (cli_path().empty()) return;
  const fs::path dir = fresh_dir("preview");
  write_png(synthetic_line(200, 48, 4242), dir / "line.png");

  const std::string base = "preview --image " + (dir / "line.png").string() +
                           " --preset rot1.5 --count 4 --seed 3 --out ";
  CHECK(run(base + (dir / "sheet1.png").string()) == 0);
  CHECK(run(base + (dir / "sheet2.png").string()) == 0);
  CHECK(read_file(dir / "sheet1.png") == read_file(dir / "sheet2.png"));

  // first two tiles pin the range extremes
  const std::string trace = read_file(dir / "sheet1.png.jsonl");
  std::istringstream lines(trace);
  std::string tile0, tile1;
  std::getline(lines, tile0);
  std::getline(lines, tile1);
  CHECK(tile0.find("\"angle\":-1.5") != std::string::npos);
  CHECK(tile1.find("\"angle\":1.5") != std::string::npos);

  // baseline, one tile: content equals the preprocessed original where the
  // content mask is set; padding is grey
  CHECK(run("preview --image " + (dir / "line.png").string() +
            " --preset baseline --count 1 --seed 0 --out " +
            (dir / "base.png").string()) == 0);
  const GrayImage sheet = read_png(dir / "base.png");
  CHECK(sheet.width == kLineWidth);
  CHECK(sheet.height == kLineHeight);
  const GrayImage expected = preprocess_line(read_png(dir / "line.png"));
  const GrayImage original = read_png(dir / "line.png");
  // within the original content width, pixels are untouched
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      CHECK(sheet(x, y) == std::max<int>(expected(x, y), 0));
  // far right is padding, rendered grey
  CHECK(sheet(kLineWidth - 1, kLineHeight - 1) == 128);
}

TEST_CASE("usage errors exit 1, data errors exit 2, json mode reports kind") {
  if (cli_path().empty()) return;
  CHECK(run("no-such-subcommand") == 1);
  CHECK(run("augment --out /tmp/x") == 1);  // missing required --manifest
  CHECK(run("augment --manifest /nonexistent.tsv --preset baseline --out " +
            (fs::temp_directory_path() / "x").string()) == 2);

  const fs::path dir = fresh_dir("json_errors");
  const std::string cmd = cli_path() +
                          " --json augment --manifest /nonexistent.tsv "
                          "--preset baseline --out " +
                          (dir / "o").string() + " 2> " +
                          (dir / "err.json").string() + " >/dev/null";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
  const std::string err = read_file(dir / "err.json");
  CHECK(err.find("\"error\":\"file_not_found\"") != std::string::npos);
}
