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

#include "stenaug/textdata.hpp"

#include <fstream>
#include <sstream>

#include "stenaug/error.hpp"
#include "stenaug/utf8.hpp"

namespace stenaug {

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

Alphabet Alphabet::from_symbols(const std::vector<char32_t>& symbols) {
  Alphabet a;
  a.symbols_ = symbols;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const int index = static_cast<int>(i) + 1;  // 0 is the blank
    if (!a.index_.emplace(symbols[i], index).second)
      throw ValueError("duplicate alphabet symbol '" +
                       utf8_encode(symbols[i]) + "' at index " +
                       std::to_string(index));
  }
  return a;
}

Alphabet Alphabet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such alphabet file: " + path.string());
    throw Error("cannot open alphabet file: " + path.string());
  }
  std::vector<char32_t> symbols;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;  // tolerate blank separator lines
    const std::u32string decoded = normalize_utf8(line);
    if (decoded.size() != 1)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected exactly one symbol per line");
    symbols.push_back(decoded[0]);
  }
  if (symbols.empty())
    throw ParseError(path.string() + ": alphabet file is empty");
  return from_symbols(symbols);
}

void Alphabet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open alphabet file for writing: " + path.string());
  for (char32_t c : symbols_) out << utf8_encode(c) << '\n';
}

const Alphabet& Alphabet::default_51() {
  static const Alphabet kDefault = [] {
    std::vector<char32_t> symbols;
    symbols.push_back(U' ');
    for (char32_t c = U'a'; c <= U'z'; ++c) symbols.push_back(c);
    symbols.push_back(U'ä');
    symbols.push_back(U'ö');
    symbols.push_back(U'å');
    for (char32_t c = U'0'; c <= U'9'; ++c) symbols.push_back(c);
    for (char32_t c : std::u32string(U".,!?:;-'\"()")) symbols.push_back(c);
    return from_symbols(symbols);
  }();
  return kDefault;
}

int Alphabet::index_of(char32_t c) const {
  auto it = index_.find(c);
  if (it == index_.end())
    throw ValueError("symbol '" + utf8_encode(c) + "' not in alphabet");
  return it->second;
}

char32_t Alphabet::symbol(int index) const {
  if (index < 1 || index > size())
    throw ValueError("alphabet index " + std::to_string(index) +
                     " out of range 1.." + std::to_string(size()));
  return symbols_[index - 1];
}

// ---------------------------------------------------------------------------
// Splits and records
// ---------------------------------------------------------------------------

std::string_view to_string(Split s) {
  switch (s) {
    case Split::cv: return "cv";
    case Split::test_in_domain: return "test_in_domain";
    case Split::test_out_of_domain: return "test_out_of_domain";
  }
  return "unknown";
}

Split split_from_string(std::string_view s) {
  if (s == "cv") return Split::cv;
  if (s == "test_in_domain") return Split::test_in_domain;
  if (s == "test_out_of_domain") return Split::test_out_of_domain;
  throw ParseError("unknown split '" + std::string(s) +
                   "' (expected cv, test_in_domain or test_out_of_domain)");
}

std::string LineRecord::id() const {
  return std::filesystem::path(image_path).stem().string();
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such manifest: " + path.string());
    throw Error("cannot open manifest: " + path.string());
  }

  Manifest m;
  m.source_path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    const auto t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos)
      throw ParseError(where + ": expected 4 tab-separated fields "
                               "(image_path, fold, split, transliteration)");

    LineRecord r;
    r.image_path = line.substr(0, t1);
    if (r.image_path.empty()) throw ParseError(where + ": empty image path");

    const std::string fold_text = line.substr(t1 + 1, t2 - t1 - 1);
    if (fold_text == "-") {
      r.fold = std::nullopt;
    } else {
      try {
        std::size_t pos = 0;
        const int fold = std::stoi(fold_text, &pos);
        if (pos != fold_text.size() || fold < 0 || fold > 4)
          throw std::invalid_argument("range");
        r.fold = fold;
      } catch (const std::exception&) {
        throw ParseError(where + ": fold must be 0..4 or '-', got '" +
                         fold_text + "'");
      }
    }

    try {
      r.split = split_from_string(line.substr(t2 + 1, t3 - t2 - 1));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }

    try {
      r.transliteration = normalize_utf8_to_utf8(line.substr(t3 + 1));
    } catch (const ParseError& e) {
      throw ParseError(where + ": transliteration: " + e.what());
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open manifest for writing: " + path.string());
  for (const auto& r : records) {
    out << r.image_path << '\t'
        << (r.fold ? std::to_string(*r.fold) : std::string("-")) << '\t'
        << to_string(r.split) << '\t' << r.transliteration << '\n';
  }
}

std::filesystem::path Manifest::resolve_image(const LineRecord& record) const {
  const std::filesystem::path p(record.image_path);
  if (p.is_absolute() || source_path.empty()) return p;
  return source_path.parent_path() / p;
}

// ---------------------------------------------------------------------------
// Preprocessing and encoding
// ---------------------------------------------------------------------------

GrayImage preprocess_line(const GrayImage& img) {
  const GrayImage scaled = resize_height(img, kLineHeight);
  if (scaled.width > kLineWidth)
    throw DimensionError("line is " + std::to_string(scaled.width) +
                         " px wide after height normalization, exceeding " +
                         std::to_string(kLineWidth));
  return pad_to(scaled, kLineWidth, kLineHeight, PadAnchor::top_left);
}

std::vector<int> encode_target(const std::string& utf8_text,
                               const Alphabet& alphabet) {
  const std::u32string text = normalize_utf8(utf8_text);
  if (text.size() > static_cast<std::size_t>(kTargetLength))
    throw ValueError("target of length " + std::to_string(text.size()) +
                     " exceeds " + std::to_string(kTargetLength));
  std::vector<int> out(kTargetLength, 0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    try {
      out[i] = alphabet.index_of(text[i]);
    } catch (const ValueError&) {
      throw ValueError("unknown symbol '" + utf8_encode(text[i]) +
                       "' at position " + std::to_string(i));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Layout validation
// ---------------------------------------------------------------------------

ValidationReport validate_lion_layout(const Manifest& manifest,
                                      const Alphabet& alphabet,
                                      bool check_files) {
  ValidationReport rep;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    const int index = static_cast<int>(i);
    switch (r.split) {
      case Split::cv:
        ++rep.cv_count;
        if (r.fold)
          ++rep.fold_sizes[static_cast<std::size_t>(*r.fold)];
        else
          rep.layout_deviations.push_back("record " + std::to_string(index) +
                                          ": cv line without fold assignment");
        break;
      case Split::test_in_domain:
        ++rep.in_domain_count;
        break;
      case Split::test_out_of_domain:
        ++rep.out_domain_count;
        break;
    }

    try {
      encode_target(r.transliteration, alphabet);
    } catch (const ValueError& e) {
      rep.alphabet_violations.push_back({index, e.what()});
    }

    if (check_files) {
      const auto path = manifest.resolve_image(r);
      if (!std::filesystem::exists(path))
        rep.missing_files.push_back({index, "missing image: " + path.string()});
    }
  }

  for (int f = 0; f < 5; ++f) {
    if (rep.fold_sizes[static_cast<std::size_t>(f)] != 306)
      rep.layout_deviations.push_back(
          "fold " + std::to_string(f) + " has " +
          std::to_string(rep.fold_sizes[static_cast<std::size_t>(f)]) +
          " lines, expected 306");
  }
  if (rep.in_domain_count != 474)
    rep.layout_deviations.push_back(
        "in-domain test split has " + std::to_string(rep.in_domain_count) +
        " lines, expected 474");
  if (rep.out_domain_count != 191)
    rep.layout_deviations.push_back(
        "out-of-domain test split has " + std::to_string(rep.out_domain_count) +
        " lines, expected 191");

  rep.canonical = rep.layout_deviations.empty();
  return rep;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << "layout: " << (canonical ? "canonical" : "non-canonical") << "\n";
  os << "cv lines: " << cv_count << " (folds";
  for (int n : fold_sizes) os << ' ' << n;
  os << ")\n";
  os << "test lines: " << in_domain_count << " in-domain, " << out_domain_count
     << " out-of-domain\n";
  for (const auto& d : layout_deviations) os << "deviation: " << d << "\n";
  for (const auto& v : alphabet_violations)
    os << "alphabet violation: record " << v.record_index << ": " << v.message
       << "\n";
  for (const auto& v : missing_files)
    os << "missing file: record " << v.record_index << ": " << v.message
       << "\n";
  return os.str();
}

}  // namespace stenaug
