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

#include <string>
#include <string_view>

namespace stenaug {

/// Decodes UTF-8 into codepoints. Throws ParseError on malformed input
/// (truncated sequences, overlong encodings, surrogates).
std::u32string utf8_decode(std::string_view s);

std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t c);

/// Canonical composition for the combining marks that occur in Latin-script
/// transliterations (grave, acute, circumflex, tilde, diaeresis, ring above,
/// cedilla). Sequences like "a" + U+0308 become "ä". Marks without a
/// precomposed form are left as they are.
std::u32string compose_latin(std::u32string_view s);

/// Decode + compose in one step, used wherever external text enters.
std::u32string normalize_utf8(std::string_view s);
std::string normalize_utf8_to_utf8(std::string_view s);

}  // namespace stenaug
