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

#include "stenaug/raster.hpp"

#include <cmath>
#include <string>

#include "stenaug/error.hpp"

namespace stenaug {

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 1 || h < 1)
    throw DimensionError("image dimensions must be at least 1x1, got " +
                         std::to_string(w) + "x" + std::to_string(h));
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

int round_half_up(double v) {
  return static_cast<int>(std::floor(v + 0.5));
}

std::uint8_t quantize(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

double sample_bilinear(const GrayImage& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double p00 = img.at_or(x0, y0);
  const double p10 = img.at_or(x0 + 1, y0);
  const double p01 = img.at_or(x0, y0 + 1);
  const double p11 = img.at_or(x0 + 1, y0 + 1);
  const double top = p00 * (1.0 - fx) + p10 * fx;
  const double bottom = p01 * (1.0 - fx) + p11 * fx;
  return top * (1.0 - fy) + bottom * fy;
}

double sample_nearest(const GrayImage& img, double x, double y) {
  return img.at_or(round_half_up(x), round_half_up(y));
}

double sample(const GrayImage& img, double x, double y, Interpolation mode) {
  return mode == Interpolation::bilinear ? sample_bilinear(img, x, y)
                                         : sample_nearest(img, x, y);
}

GrayImage pad_to(const GrayImage& img, int target_w, int target_h,
                 PadAnchor anchor) {
  if (target_w < img.width || target_h < img.height)
    throw DimensionError("pad target " + std::to_string(target_w) + "x" +
                         std::to_string(target_h) + " below source size " +
                         std::to_string(img.width) + "x" +
                         std::to_string(img.height));
  if (target_w == img.width && target_h == img.height) return img;

  int off_y = 0;
  if (anchor == PadAnchor::center_vertical)
    off_y = (target_h - img.height) / 2;  // top gets the floor half

  GrayImage out(target_w, target_h);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out(x, y + off_y) = img(x, y);
  return out;
}

GrayImage resize(const GrayImage& img, int target_w, int target_h,
                 Interpolation mode) {
  if (target_w < 1 || target_h < 1)
    throw DimensionError("resize target must be at least 1x1");
  if (target_w == img.width && target_h == img.height) return img;

  const double sx = static_cast<double>(img.width) / target_w;
  const double sy = static_cast<double>(img.height) / target_h;
  GrayImage out(target_w, target_h);
  for (int y = 0; y < target_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < target_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      out(x, y) = quantize(sample(img, src_x, src_y, mode));
    }
  }
  return out;
}

GrayImage resize_height(const GrayImage& img, int target_h) {
  if (target_h < 1) throw DimensionError("target height must be >= 1");
  const int target_w = round_half_up(static_cast<double>(img.width) *
                                     target_h / img.height);
  return resize(img, target_w, target_h);
}

GrayImage invert(const GrayImage& img) {
  GrayImage out = img;
  for (auto& v : out.data) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

}  // namespace stenaug
