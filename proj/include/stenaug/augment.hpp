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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stenaug/raster.hpp"
#include "stenaug/rng.hpp"

namespace stenaug {

enum class AugKind {
  none,
  rotation_random,
  rotation_fixed,
  dilation,
  erosion,
  shift,
  elastic,
  shear,
  scale,
  column_mask,
  pixel_dropout,
  gaussian_noise,
  gaussian_blur,
};

std::string_view to_string(AugKind kind);
AugKind aug_kind_from_string(std::string_view s);

enum class SeShape { square, disk };
enum class MorphOp { dilate, erode };

/// Flat structuring element as a set of pixel offsets relative to the anchor.
/// A square of width w anchors at floor((w-1)/2) on both axes, so even widths
/// are near-centred; a disk of radius r is {(dx,dy) : dx^2+dy^2 <= r^2},
/// centred and 4-fold symmetric.
struct StructuringElement {
  SeShape shape = SeShape::square;
  int size = 1;
  std::vector<std::pair<int, int>> offsets;

  static StructuringElement square(int width);
  static StructuringElement disk(int radius);
  StructuringElement reflected() const;
  bool contains(int dx, int dy) const;
};

/// One augmentation configuration: a named Table-row preset or a custom
/// parameterization. Only the fields for `kind` are meaningful.
struct AugmentConfig {
  std::string name = "custom";
  AugKind kind = AugKind::none;

  double angle_lo = 0.0, angle_hi = 0.0;  // rotation_random / shear, degrees
  double fixed_angle = 0.0;               // rotation_fixed, degrees
  SeShape se_shape = SeShape::square;     // dilation / erosion
  int se_size_lo = 1, se_size_hi = 1;
  double shift_x_lo = 0.0, shift_x_hi = 0.0;  // shift, pixels
  double shift_y_lo = 0.0, shift_y_hi = 0.0;
  double alpha_lo = 0.0, alpha_hi = 0.0;  // elastic amplitude
  double sigma_lo = 0.0, sigma_hi = 0.0;  // elastic smoothing std
  double scale_lo = 1.0, scale_hi = 1.0;  // scale factor range in (0, 1]
  double mask_rate = 0.0;                 // column_mask, fraction of columns
  double dropout_lo = 0.0, dropout_hi = 0.0;  // pixel_dropout rate range
  std::vector<double> noise_sigmas;           // gaussian_noise choice set
  double blur_sigma_lo = 0.0, blur_sigma_hi = 0.0;  // gaussian_blur (kernel 5)

  /// Ordered ranges, rates in [0,1], scale in (0,1], positive SE sizes.
  void validate() const;

  /// Resolves one of the named presets:
  ///   baseline, rot1.5, rot5, rot10, positive, negative, rot+2, rot-2,
  ///   square-dilation, disk-dilation, square-erosion, disk-erosion,
  ///   shift, elastic, shear, shear30, scale75, scale95,
  ///   mask10, mask40, noise, dropout, blur
  /// Unknown names raise ValueError.
  static AugmentConfig preset(const std::string& name);
  static bool is_preset(const std::string& name);

  /// The preset names in canonical table order (baseline first).
  static const std::vector<std::string>& preset_names();

  /// Resolves a preset name or the composite "combined-top3"
  /// (= rot1.5, shift, scale75 applied in sequence) into a config list.
  static std::vector<AugmentConfig> sequence(const std::string& name);

  /// Loads a custom config from a key/value file ("key = value" lines,
  /// '#' comments). Keys: name, type, and per-type parameters, e.g.
  ///   type = rotation        range = -3, 3
  ///   type = dilation        se = disk    size = 1, 4
  static AugmentConfig from_config_file(const std::filesystem::path& path);
};

/// Concrete values drawn for one application of a config. Carries everything
/// needed to re-apply the exact same transform (apply_params), including the
/// aux seed that drives per-pixel draws for elastic, dropout and noise.
struct SampledParams {
  std::string config;
  AugKind kind = AugKind::none;
  SeShape se_shape = SeShape::square;
  std::vector<std::pair<std::string, double>> values;
  std::vector<int> masked_columns;
  std::uint64_t aux_seed = 0;

  bool has(std::string_view key) const;
  double value(std::string_view key) const;  // ValueError when absent
  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------------------
// Individual operations
// ---------------------------------------------------------------------------

/// Rotates about the image centre onto the expanded bounding-box canvas
///   w' = ceil(w|cos| + h|sin|),  h' = ceil(w|sin| + h|cos|)
/// so no content is clipped; vacated pixels are background. Positive angles
/// turn the content clockwise in image coordinates (y down).
/// |angle| must be <= 45 degrees.
GrayImage rotate_expand(const GrayImage& img, double angle_deg);

/// Grayscale dilation (neighbourhood max) or erosion (neighbourhood min).
/// Outside the raster, dilation reads 0 and erosion reads 255, so borders
/// stay neutral. Output dimensions are unchanged.
GrayImage morphology(const GrayImage& img, MorphOp op,
                     const StructuringElement& se);

/// Translates by a possibly fractional (dx, dy); output(x,y) samples the
/// input at (x-dx, y-dy) bilinearly, vacated regions read background.
/// Requires |dx| < width and |dy| < height.
GrayImage shift(const GrayImage& img, double dx, double dy);

/// Horizontal shear: row y moves by (y_ref - y) * tan(angle), with y_ref
/// chosen so offsets are non-negative (bottom row for positive angles, top
/// row for negative). Width grows by ceil(h * |tan(angle)|); height is
/// unchanged. |angle| must be < 60 degrees.
GrayImage shear_horizontal(const GrayImage& img, double angle_deg);

/// Downscales both axes by factor in (0, 1], then replaces the content on an
/// original-height canvas, vertically centred (floor top / ceil bottom).
/// Output width is round(w * factor).
GrayImage scale_down(const GrayImage& img, double factor);

/// Elastic deformation: two per-pixel displacement fields drawn uniform in
/// [-1, 1], Gaussian-smoothed with std sigma (kernel truncated at 3 sigma),
/// scaled by alpha; output sampled bilinearly at the displaced coordinates.
GrayImage elastic(const GrayImage& img, double alpha, double sigma,
                  RngStream& rng);

/// Chooses exactly round(rate * width) distinct columns uniformly without
/// replacement; returned sorted.
std::vector<int> draw_mask_columns(int width, double rate, RngStream& rng);

GrayImage mask_columns(const GrayImage& img, double rate, RngStream& rng);
GrayImage mask_columns(const GrayImage& img, std::span<const int> columns);

/// Zeroes each pixel independently with probability rate (row-major draws).
GrayImage pixel_dropout(const GrayImage& img, double rate, RngStream& rng);

/// Additive Gaussian noise on the normalized [0,1] intensity scale, then
/// clamped: out = clamp(in/255 + N(0, sigma^2), 0, 1) * 255.
GrayImage gaussian_noise(const GrayImage& img, double sigma, RngStream& rng);

/// Separable 5-tap Gaussian, taps proportional to exp(-k^2 / (2 sigma^2))
/// for k in -2..2 and normalized to sum 1; borders replicate edges.
GrayImage gaussian_blur(const GrayImage& img, double sigma);
std::array<double, 5> gaussian_blur_taps(double sigma);

// ---------------------------------------------------------------------------
// Sampling and composition
// ---------------------------------------------------------------------------

/// Draws concrete parameters for one application. Real ranges sample
/// uniformly, SE sizes uniformly over integers, the noise sigma uniformly
/// over its choice set. image_width is needed for column masking.
SampledParams sample_params(const AugmentConfig& config, int image_width,
                            RngStream& rng);

/// Parameters at a range extreme (for preview sheets): high=false gives the
/// low end of every range, high=true the high end. Per-pixel aux seeds are
/// still drawn from rng.
SampledParams extreme_params(const AugmentConfig& config, int image_width,
                             bool high, RngStream& rng);

/// Re-applies previously drawn parameters; deterministic.
GrayImage apply_params(const GrayImage& img, const SampledParams& params);

std::pair<GrayImage, SampledParams> sample_and_apply(
    const AugmentConfig& config, const GrayImage& img, RngStream& rng);

/// Applies each config in order with an independent coin of probability
/// per_config_prob; returns the image and the trace of applied params.
/// One coin is drawn per config whether or not it lands.
std::pair<GrayImage, std::vector<SampledParams>> compose(
    const std::vector<AugmentConfig>& configs, double per_config_prob,
    const GrayImage& img, RngStream& rng);

}  // namespace stenaug
