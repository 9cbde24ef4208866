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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stenaug/raster.hpp"

namespace stenaug {

/// Fixed line-image geometry: height-normalized to 64 px, left-anchored on a
/// 1362 px wide black canvas. Targets pad with the blank token (0) to 271.
inline constexpr int kLineHeight = 64;
inline constexpr int kLineWidth = 1362;
inline constexpr int kTargetLength = 271;

/// Symbol inventory for target encoding. Index 0 is reserved for the CTC
/// blank; real symbols occupy 1..N in file order.
class Alphabet {
 public:
  static Alphabet from_symbols(const std::vector<char32_t>& symbols);

  /// One symbol per line, index order, UTF-8. Lines are not trimmed, so a
  /// line holding a single space is the space symbol.
  static Alphabet load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Built-in 51-symbol default: space, a-z, "äöå", digits, and common
  /// punctuation. The exact punctuation inventory of the LION alphabet is
  /// not public, so this asset is a stand-in; pass an alphabet file for
  /// real data.
  static const Alphabet& default_51();

  int size() const { return static_cast<int>(symbols_.size()); }
  int classes() const { return size() + 1; }  // + blank
  bool contains(char32_t c) const { return index_.count(c) != 0; }
  int index_of(char32_t c) const;      // >= 1; ValueError when absent
  char32_t symbol(int index) const;    // valid for 1..size()
  const std::vector<char32_t>& symbols() const { return symbols_; }

 private:
  std::vector<char32_t> symbols_;
  std::map<char32_t, int> index_;
};

enum class Split { cv, test_in_domain, test_out_of_domain };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

/// One dataset sample: an image reference, its transliteration, and the
/// fold/split assignment.
struct LineRecord {
  std::string image_path;
  std::optional<int> fold;  // 0..4 for cv lines
  Split split = Split::cv;
  std::string transliteration;  // UTF-8, canonical-composed on load

  /// Pairing key used by predictions and logit files: the image filename
  /// without directory or extension.
  std::string id() const;
};

/// Manifest file: UTF-8, tab-separated, one record per line,
///   image_path <TAB> fold-or-"-" <TAB> split <TAB> transliteration
/// The transliteration comes last because it may contain spaces.
struct Manifest {
  std::vector<LineRecord> records;
  std::filesystem::path source_path;

  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Relative image paths resolve against the manifest's directory.
  std::filesystem::path resolve_image(const LineRecord& record) const;
};

/// Height-normalizes to 64 px and pads right with background to 1362 px.
/// Throws DimensionError naming the offending width when the rescaled
/// content is wider than 1362.
GrayImage preprocess_line(const GrayImage& img);

/// Symbol indices padded with the blank token (0) to length 271.
/// Unknown symbols and over-length texts raise ValueError; the unknown-symbol
/// message names the character and its position.
std::vector<int> encode_target(const std::string& utf8_text,
                               const Alphabet& alphabet);

struct ValidationIssue {
  int record_index = 0;
  std::string message;
};

/// Result of checking a manifest against the canonical five-fold layout
/// (306 lines per fold, 474 in-domain and 191 out-of-domain test lines).
/// Deviations are reported, not fatal.
struct ValidationReport {
  bool canonical = false;
  std::array<int, 5> fold_sizes{};
  int cv_count = 0;
  int in_domain_count = 0;
  int out_domain_count = 0;
  std::vector<std::string> layout_deviations;
  std::vector<ValidationIssue> alphabet_violations;
  std::vector<ValidationIssue> missing_files;

  bool has_violations() const {
    return !alphabet_violations.empty() || !missing_files.empty();
  }
  std::string to_string() const;
};

ValidationReport validate_lion_layout(const Manifest& manifest,
                                      const Alphabet& alphabet,
                                      bool check_files = false);

}  // namespace stenaug
