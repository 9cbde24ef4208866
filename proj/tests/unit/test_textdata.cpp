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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "stenaug/error.hpp"
#include "stenaug/rng.hpp"
#include "stenaug/textdata.hpp"
#include "stenaug/utf8.hpp"

using namespace stenaug;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    auto p = fs::temp_directory_path() / "stenaug_textdata_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Manifest with the canonical LION counts: 5 x 306 cv, 474 + 191 test.
Manifest canonical_manifest() {
  Manifest m;
  int serial = 0;
  for (int fold = 0; fold < 5; ++fold)
    for (int i = 0; i < 306; ++i) {
      LineRecord r;
      r.image_path = "img/l" + std::to_string(serial++) + ".png";
      r.fold = fold;
      r.split = Split::cv;
      r.transliteration = "en rad text";
      m.records.push_back(r);
    }
  for (int i = 0; i < 474; ++i) {
    LineRecord r;
    r.image_path = "img/t" + std::to_string(i) + ".png";
    r.split = Split::test_in_domain;
    r.transliteration = "inne i boken";
    m.records.push_back(r);
  }
  for (int i = 0; i < 191; ++i) {
    LineRecord r;
    r.image_path = "img/o" + std::to_string(i) + ".png";
    r.split = Split::test_out_of_domain;
    r.transliteration = "ur andra verk";
    m.records.push_back(r);
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// UTF-8 and composition
// ---------------------------------------------------------------------------

TEST_CASE("utf8 round-trip and validation") {
  const std::string text = "jonatan hette inte lejonhjärta från början";
  CHECK(utf8_encode(utf8_decode(text)) == text);
  CHECK(utf8_decode("äöå").size() == 3);
  CHECK_THROWS_AS(utf8_decode("\xC3"), ParseError);        // truncated
  CHECK_THROWS_AS(utf8_decode("\xC0\xAF"), ParseError);    // overlong
  CHECK_THROWS_AS(utf8_decode("\xED\xA0\x80"), ParseError);  // surrogate
}

TEST_CASE("combining marks compose to precomposed forms") {
  // "a" + U+0308 -> "ä", "a" + U+030A -> "å"
  CHECK(normalize_utf8_to_utf8("a\xCC\x88") == "ä");
  CHECK(normalize_utf8_to_utf8("a\xCC\x8A") == "å");
  CHECK(normalize_utf8_to_utf8("o\xCC\x88" "l") == "öl");
  // unknown combination passes through
  CHECK(normalize_utf8(std::string("q\xCC\x88")).size() == 2);
}

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

TEST_CASE("the default alphabet has 51 symbols and a reserved blank") {
  const Alphabet& a = Alphabet::default_51();
  CHECK(a.size() == 51);
  CHECK(a.classes() == 52);
  CHECK(a.contains(U'a'));
  CHECK(a.contains(U'ä'));
  CHECK(a.contains(U'ö'));
  CHECK(a.contains(U'å'));
  CHECK(a.contains(U' '));
  CHECK(a.contains(U'0'));
  CHECK(!a.contains(U'A'));
  CHECK(a.index_of(U' ') == 1);  // first file symbol maps to index 1
  for (char32_t c : a.symbols()) {
    const int idx = a.index_of(c);
    CHECK(idx >= 1);
    CHECK(idx <= 51);
    CHECK(a.symbol(idx) == c);
  }
}

TEST_CASE("duplicate symbols are rejected") {
  CHECK_THROWS_AS(Alphabet::from_symbols({U'a', U'b', U'a'}), ValueError);
}

TEST_CASE("alphabet files are one symbol per line, space included") {
  const fs::path p = temp_dir() / "alpha.txt";
  std::ofstream(p, std::ios::binary) << "a\nb\n \nä\n";
  const Alphabet a = Alphabet::load(p);
  CHECK(a.size() == 4);
  CHECK(a.index_of(U'a') == 1);
  CHECK(a.index_of(U' ') == 3);
  CHECK(a.index_of(U'ä') == 4);

  const fs::path saved = temp_dir() / "alpha_saved.txt";
  a.save(saved);
  CHECK(read_file(saved) == "a\nb\n \nä\n");

  std::ofstream(p, std::ios::binary | std::ios::trunc) << "ab\n";
  CHECK_THROWS_AS(Alphabet::load(p), ParseError);
  CHECK_THROWS_AS(Alphabet::load(temp_dir() / "missing_alpha.txt"),
                  FileNotFoundError);
}

// ---------------------------------------------------------------------------
// Target encoding
// ---------------------------------------------------------------------------

TEST_CASE("encode_target pads with blanks to length 271") {
  const Alphabet a = Alphabet::from_symbols({U'a', U'b'});
  const auto empty = encode_target("", a);
  CHECK(empty.size() == 271);
  for (int v : empty) CHECK(v == 0);

  const auto ab = encode_target("ab", a);
  CHECK(ab[0] == 1);
  CHECK(ab[1] == 2);
  for (std::size_t i = 2; i < ab.size(); ++i) CHECK(ab[i] == 0);
}

TEST_CASE("unknown symbols name the character and position") {
  const Alphabet& a = Alphabet::default_51();
  try {
    encode_target("abc#def", a);
    FAIL("expected ValueError");
  } catch (const ValueError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("#") != std::string::npos);
    CHECK(msg.find("position 3") != std::string::npos);
  }
}

TEST_CASE("over-length targets are rejected") {
  const Alphabet a = Alphabet::from_symbols({U'a'});
  CHECK_NOTHROW(encode_target(std::string(271, 'a'), a));
  CHECK_THROWS_AS(encode_target(std::string(272, 'a'), a), ValueError);
}

TEST_CASE("encoding is injective on short strings") {
  const Alphabet a = Alphabet::from_symbols({U'a', U'b', U'c'});
  std::set<std::vector<int>> seen;
  std::set<std::string> texts;
  RngStream rng(50);
  while (texts.size() < 200) {
    std::string t;
    const int len = static_cast<int>(rng.uniform_int(0, 6));
    for (int i = 0; i < len; ++i)
      t.push_back(static_cast<char>('a' + rng.uniform_int(0, 2)));
    texts.insert(t);
  }
  for (const auto& t : texts) CHECK(seen.insert(encode_target(t, a)).second);
}

// ---------------------------------------------------------------------------
// Line preprocessing
// ---------------------------------------------------------------------------

TEST_CASE("preprocess_line produces the fixed 1362x64 geometry") {
  GrayImage half(681, 32, 210);
  const GrayImage exact = preprocess_line(half);
  CHECK(exact.width == 1362);
  CHECK(exact.height == 64);
  CHECK(exact(681, 32) > 0);  // content reaches the full width

  GrayImage narrow(100, 64, 210);
  const GrayImage padded = preprocess_line(narrow);
  CHECK(padded.width == 1362);
  for (int y = 0; y < 64; ++y)
    for (int x = 100; x < 1362; ++x) CHECK(padded(x, y) == 0);
  CHECK(padded(50, 32) == 210);
}

TEST_CASE("too-wide lines report the offending width") {
  GrayImage wide(3000, 64);
  try {
    preprocess_line(wide);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("3000") != std::string::npos);
  }
}

TEST_CASE("preprocess_line is idempotent on conforming images") {
  RngStream rng(51);
  GrayImage img(1362, 64);
  for (auto& v : img.data)
    v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  const GrayImage once = preprocess_line(img);
  CHECK(once == img);
  CHECK(preprocess_line(once) == once);
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

TEST_CASE("manifest records parse and resolve") {
  const fs::path p = temp_dir() / "manifest.tsv";
  std::ofstream(p, std::ios::binary)
      << "img/line_001.png\t0\tcv\tjonatan hette inte\n"
         "img/line_002.png\t-\ttest_in_domain\tfrån början\n";
  const Manifest m = Manifest::load(p);
  REQUIRE(m.records.size() == 2);
  CHECK(m.records[0].image_path == "img/line_001.png");
  CHECK(m.records[0].fold == 0);
  CHECK(m.records[0].split == Split::cv);
  CHECK(m.records[0].transliteration == "jonatan hette inte");
  CHECK(m.records[0].id() == "line_001");
  CHECK(!m.records[1].fold.has_value());
  CHECK(m.records[1].split == Split::test_in_domain);
  CHECK(m.resolve_image(m.records[0]) == temp_dir() / "img/line_001.png");
}

TEST_CASE("manifest save(load(f)) is byte-identical for normalized files") {
  const fs::path p = temp_dir() / "roundtrip.tsv";
  const std::string body =
      "img/a.png\t0\tcv\thej värld\n"
      "img/b.png\t4\tcv\t\n"
      "img/c.png\t-\ttest_out_of_domain\tmellanslag  bevaras\n";
  std::ofstream(p, std::ios::binary) << body;
  const Manifest m = Manifest::load(p);
  const fs::path q = temp_dir() / "roundtrip_out.tsv";
  m.save(q);
  CHECK(read_file(q) == body);
}

TEST_CASE("manifest parse errors carry line numbers") {
  const fs::path p = temp_dir() / "broken.tsv";

  std::ofstream(p, std::ios::binary) << "img/a.png\t0\tcv\tok\nnot-tabbed\n";
  try {
    Manifest::load(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  std::ofstream(p, std::ios::binary | std::ios::trunc)
      << "img/a.png\t9\tcv\tok\n";
  CHECK_THROWS_AS(Manifest::load(p), ParseError);

  std::ofstream(p, std::ios::binary | std::ios::trunc)
      << "img/a.png\t0\tnonsense\tok\n";
  CHECK_THROWS_AS(Manifest::load(p), ParseError);

  CHECK_THROWS_AS(Manifest::load(temp_dir() / "missing.tsv"),
                  FileNotFoundError);
}

// ---------------------------------------------------------------------------
// Layout validation
// ---------------------------------------------------------------------------

TEST_CASE("the canonical layout gets a canonical verdict") {
  const Manifest m = canonical_manifest();
  const auto rep = validate_lion_layout(m, Alphabet::default_51());
  CHECK(rep.canonical);
  CHECK(rep.cv_count == 1530);
  CHECK(rep.in_domain_count == 474);
  CHECK(rep.out_domain_count == 191);
  for (int n : rep.fold_sizes) CHECK(n == 306);
  CHECK(rep.layout_deviations.empty());
  CHECK(!rep.has_violations());
  CHECK(rep.to_string().find("canonical") != std::string::npos);
}

TEST_CASE("a short fold is a listed, non-fatal deviation") {
  Manifest m = canonical_manifest();
  // drop one fold-2 record
  for (std::size_t i = 0; i < m.records.size(); ++i)
    if (m.records[i].fold == 2) {
      m.records.erase(m.records.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  const auto rep = validate_lion_layout(m, Alphabet::default_51());
  CHECK(!rep.canonical);
  REQUIRE(rep.layout_deviations.size() == 1);
  CHECK(rep.layout_deviations[0].find("fold 2") != std::string::npos);
  CHECK(rep.layout_deviations[0].find("305") != std::string::npos);
}

TEST_CASE("alphabet violations name the record index") {
  Manifest m = canonical_manifest();
  m.records[7].transliteration = "bad # symbol";
  const auto rep = validate_lion_layout(m, Alphabet::default_51());
  REQUIRE(rep.alphabet_violations.size() == 1);
  CHECK(rep.alphabet_violations[0].record_index == 7);
  CHECK(rep.has_violations());
  CHECK(rep.canonical);  // layout itself is still canonical
}

TEST_CASE("missing image files are reported per record when asked") {
  const fs::path dir = temp_dir() / "validate_files";
  fs::create_directories(dir);
  Manifest m;
  m.source_path = dir / "m.tsv";
  LineRecord r;
  r.image_path = "does_not_exist.png";
  r.split = Split::test_in_domain;
  r.transliteration = "x";
  m.records.push_back(r);
  const auto rep = validate_lion_layout(m, Alphabet::default_51(), true);
  REQUIRE(rep.missing_files.size() == 1);
  CHECK(rep.missing_files[0].record_index == 0);

  const auto rep_unchecked =
      validate_lion_layout(m, Alphabet::default_51(), false);
  CHECK(rep_unchecked.missing_files.empty());
}
