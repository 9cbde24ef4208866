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

#include <cstdint>
#include <vector>

namespace stenaug {

/// Intensity convention used throughout: foreground is bright, background is
/// black (0). All padding and out-of-bounds reads are background.
inline constexpr std::uint8_t kBackground = 0;

/// 2-D 8-bit grayscale raster, row-major. Immutable value semantics: every
/// operation returns a new image, so images are safe to share across threads.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = kBackground);

  std::uint8_t operator()(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& operator()(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  /// Pixel value, or `fallback` outside the raster.
  std::uint8_t at_or(int x, int y, std::uint8_t fallback = kBackground) const {
    return in_bounds(x, y) ? (*this)(x, y) : fallback;
  }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }

  bool operator==(const GrayImage&) const = default;
};

enum class Interpolation { nearest, bilinear };

enum class PadAnchor { top_left, center_vertical };

/// Rounds to nearest with halves going up; fixed so golden dimensions are
/// stable across platforms.
int round_half_up(double v);

/// Clamps to [0, 255] and rounds half up.
std::uint8_t quantize(double v);

/// Bilinear sample at real coordinates; out-of-bounds neighbours read
/// background 0. Integer in-bounds coordinates return the pixel exactly.
double sample_bilinear(const GrayImage& img, double x, double y);

double sample_nearest(const GrayImage& img, double x, double y);

double sample(const GrayImage& img, double x, double y, Interpolation mode);

/// Grows the canvas to target_w x target_h, placing the source content per
/// anchor and filling new pixels with background. center_vertical splits the
/// vertical slack floor(top)/ceil(bottom). Throws DimensionError when a
/// target is below the source size.
GrayImage pad_to(const GrayImage& img, int target_w, int target_h,
                 PadAnchor anchor);

/// Rescale to exact target dimensions. Pixel-centre mapping, so the identity
/// size is a pixel-identical no-op under bilinear.
GrayImage resize(const GrayImage& img, int target_w, int target_h,
                 Interpolation mode = Interpolation::bilinear);

/// Aspect-preserving rescale to the given height; the output width is
/// round_half_up(width * target_h / height).
GrayImage resize_height(const GrayImage& img, int target_h);

/// 255 - v, for ingesting scans with light backgrounds.
GrayImage invert(const GrayImage& img);

}  // namespace stenaug
