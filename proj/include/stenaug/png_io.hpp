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

#include <filesystem>

#include "stenaug/raster.hpp"

namespace stenaug {

/// Reads an 8-bit single-channel grayscale PNG. 16-bit files raise
/// UnsupportedFormatError; a missing path raises FileNotFoundError.
/// Color (RGB/RGBA/palette) input is rejected unless `luma_convert` is set,
/// in which case it is converted with ITU-R BT.601 weights
/// (0.299 R + 0.587 G + 0.114 B, rounded); alpha is ignored.
GrayImage read_png(const std::filesystem::path& path, bool luma_convert = false);

/// Writes an 8-bit grayscale PNG. write->read round-trips bit-identically.
void write_png(const GrayImage& img, const std::filesystem::path& path);

}  // namespace stenaug
