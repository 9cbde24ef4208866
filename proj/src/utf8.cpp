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

#include "stenaug/utf8.hpp"

#include <cstdint>

#include "stenaug/error.hpp"

namespace stenaug {

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<std::uint8_t>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size())
      throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<std::uint8_t>(s[i + k]);
      if ((b & 0xC0) != 0x80)
        throw ParseError("invalid UTF-8 continuation at offset " +
                         std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (len > 1 && cp < kMin[len])
      throw ParseError("overlong UTF-8 encoding at offset " + std::to_string(i));
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      throw ParseError("invalid codepoint in UTF-8 at offset " + std::to_string(i));
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) out += utf8_encode(c);
  return out;
}

namespace {

// Precomposed forms for (base, combining mark). Covers the diacritics seen
// in Latin transliteration alphabets; anything else passes through.
char32_t precomposed(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base, mark, composed;
  };
  static constexpr Entry kTable[] = {
      {U'a', 0x0300, U'à'}, {U'a', 0x0301, U'á'}, {U'a', 0x0302, U'â'},
      {U'a', 0x0303, U'ã'}, {U'a', 0x0308, U'ä'}, {U'a', 0x030A, U'å'},
      {U'e', 0x0300, U'è'}, {U'e', 0x0301, U'é'}, {U'e', 0x0302, U'ê'},
      {U'e', 0x0308, U'ë'}, {U'i', 0x0300, U'ì'}, {U'i', 0x0301, U'í'},
      {U'i', 0x0302, U'î'}, {U'i', 0x0308, U'ï'}, {U'o', 0x0300, U'ò'},
      {U'o', 0x0301, U'ó'}, {U'o', 0x0302, U'ô'}, {U'o', 0x0303, U'õ'},
      {U'o', 0x0308, U'ö'}, {U'u', 0x0300, U'ù'}, {U'u', 0x0301, U'ú'},
      {U'u', 0x0302, U'û'}, {U'u', 0x0308, U'ü'}, {U'y', 0x0301, U'ý'},
      {U'y', 0x0308, U'ÿ'}, {U'n', 0x0303, U'ñ'}, {U'c', 0x0327, U'ç'},
      {U'A', 0x0300, U'À'}, {U'A', 0x0301, U'Á'}, {U'A', 0x0302, U'Â'},
      {U'A', 0x0303, U'Ã'}, {U'A', 0x0308, U'Ä'}, {U'A', 0x030A, U'Å'},
      {U'E', 0x0300, U'È'}, {U'E', 0x0301, U'É'}, {U'E', 0x0302, U'Ê'},
      {U'E', 0x0308, U'Ë'}, {U'I', 0x0300, U'Ì'}, {U'I', 0x0301, U'Í'},
      {U'I', 0x0302, U'Î'}, {U'I', 0x0308, U'Ï'}, {U'O', 0x0300, U'Ò'},
      {U'O', 0x0301, U'Ó'}, {U'O', 0x0302, U'Ô'}, {U'O', 0x0303, U'Õ'},
      {U'O', 0x0308, U'Ö'}, {U'U', 0x0300, U'Ù'}, {U'U', 0x0301, U'Ú'},
      {U'U', 0x0302, U'Û'}, {U'U', 0x0308, U'Ü'}, {U'Y', 0x0301, U'Ý'},
      {U'N', 0x0303, U'Ñ'}, {U'C', 0x0327, U'Ç'},
  };
  for (const auto& e : kTable)
    if (e.base == base && e.mark == mark) return e.composed;
  return 0;
}

bool is_combining_mark(char32_t c) {
  return (c >= 0x0300 && c <= 0x036F);
}

}  // namespace

std::u32string compose_latin(std::u32string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (!out.empty() && is_combining_mark(c)) {
      if (char32_t comp = precomposed(out.back(), c); comp != 0) {
        out.back() = comp;
        continue;
      }
    }
    out.push_back(c);
  }
  return out;
}

std::u32string normalize_utf8(std::string_view s) {
  return compose_latin(utf8_decode(s));
}

std::string normalize_utf8_to_utf8(std::string_view s) {
  return utf8_encode(normalize_utf8(s));
}

}  // namespace stenaug
