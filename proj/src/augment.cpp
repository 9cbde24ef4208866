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

#include "stenaug/augment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "stenaug/error.hpp"

namespace stenaug {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

int ceil_int(double v) { return static_cast<int>(std::ceil(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// Kinds and structuring elements
// ---------------------------------------------------------------------------

std::string_view to_string(AugKind kind) {
  switch (kind) {
    case AugKind::none: return "none";
    case AugKind::rotation_random: return "rotation_random";
    case AugKind::rotation_fixed: return "rotation_fixed";
    case AugKind::dilation: return "dilation";
    case AugKind::erosion: return "erosion";
    case AugKind::shift: return "shift";
    case AugKind::elastic: return "elastic";
    case AugKind::shear: return "shear";
    case AugKind::scale: return "scale";
    case AugKind::column_mask: return "column_mask";
    case AugKind::pixel_dropout: return "pixel_dropout";
    case AugKind::gaussian_noise: return "gaussian_noise";
    case AugKind::gaussian_blur: return "gaussian_blur";
  }
  return "unknown";
}

AugKind aug_kind_from_string(std::string_view s) {
  static const std::map<std::string_view, AugKind> kMap = {
      {"none", AugKind::none},
      {"rotation_random", AugKind::rotation_random},
      {"rotation_fixed", AugKind::rotation_fixed},
      {"dilation", AugKind::dilation},
      {"erosion", AugKind::erosion},
      {"shift", AugKind::shift},
      {"elastic", AugKind::elastic},
      {"shear", AugKind::shear},
      {"scale", AugKind::scale},
      {"column_mask", AugKind::column_mask},
      {"pixel_dropout", AugKind::pixel_dropout},
      {"gaussian_noise", AugKind::gaussian_noise},
      {"gaussian_blur", AugKind::gaussian_blur},
  };
  auto it = kMap.find(s);
  if (it == kMap.end())
    throw ValueError("unknown augmentation kind: " + std::string(s));
  return it->second;
}

StructuringElement StructuringElement::square(int width) {
  if (width < 1) throw ValueError("square SE width must be >= 1");
  StructuringElement se;
  se.shape = SeShape::square;
  se.size = width;
  const int anchor = (width - 1) / 2;
  se.offsets.reserve(static_cast<std::size_t>(width) * width);
  for (int j = 0; j < width; ++j)
    for (int i = 0; i < width; ++i)
      se.offsets.emplace_back(i - anchor, j - anchor);
  return se;
}

StructuringElement StructuringElement::disk(int radius) {
  if (radius < 1) throw ValueError("disk SE radius must be >= 1");
  StructuringElement se;
  se.shape = SeShape::disk;
  se.size = radius;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) se.offsets.emplace_back(dx, dy);
  return se;
}

StructuringElement StructuringElement::reflected() const {
  StructuringElement se = *this;
  for (auto& [dx, dy] : se.offsets) {
    dx = -dx;
    dy = -dy;
  }
  return se;
}

bool StructuringElement::contains(int dx, int dy) const {
  return std::find(offsets.begin(), offsets.end(), std::make_pair(dx, dy)) !=
         offsets.end();
}

// ---------------------------------------------------------------------------
// Geometric operations
// ---------------------------------------------------------------------------

GrayImage rotate_expand(const GrayImage& img, double angle_deg) {
  if (std::abs(angle_deg) > 45.0)
    throw ValueError("rotation angle " + std::to_string(angle_deg) +
                     " outside the +-45 degree bound");
  if (angle_deg == 0.0) return img;

  const double rad = deg_to_rad(angle_deg);
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double ac = std::abs(c);
  const double as = std::abs(s);
  const int out_w = ceil_int(img.width * ac + img.height * as);
  const int out_h = ceil_int(img.width * as + img.height * ac);

  const double cx_src = (img.width - 1) / 2.0;
  const double cy_src = (img.height - 1) / 2.0;
  const double cx_dst = (out_w - 1) / 2.0;
  const double cy_dst = (out_h - 1) / 2.0;

  GrayImage out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const double dy = y - cy_dst;
    for (int x = 0; x < out_w; ++x) {
      const double dx = x - cx_dst;
      // inverse rotation of the destination offset back into source space
      const double sx = c * dx + s * dy + cx_src;
      const double sy = -s * dx + c * dy + cy_src;
      out(x, y) = quantize(sample_bilinear(img, sx, sy));
    }
  }
  return out;
}

GrayImage morphology(const GrayImage& img, MorphOp op,
                     const StructuringElement& se) {
  if (se.offsets.empty()) throw ValueError("empty structuring element");
  const bool dilate = op == MorphOp::dilate;
  const int outside = dilate ? 0 : 255;
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      int best = outside;
      for (const auto& [dx, dy] : se.offsets) {
        // dilation reflects the SE; irrelevant for symmetric elements but
        // keeps the erosion/dilation adjunction exact for even squares
        const int sx = dilate ? x - dx : x + dx;
        const int sy = dilate ? y - dy : y + dy;
        const int v = img.at_or(sx, sy, static_cast<std::uint8_t>(outside));
        best = dilate ? std::max(best, v) : std::min(best, v);
      }
      out(x, y) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

GrayImage shift(const GrayImage& img, double dx, double dy) {
  if (std::abs(dx) >= img.width || std::abs(dy) >= img.height)
    throw DimensionError("shift (" + std::to_string(dx) + ", " +
                         std::to_string(dy) + ") exceeds image size " +
                         std::to_string(img.width) + "x" +
                         std::to_string(img.height));
  if (dx == 0.0 && dy == 0.0) return img;
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out(x, y) = quantize(sample_bilinear(img, x - dx, y - dy));
  return out;
}

GrayImage shear_horizontal(const GrayImage& img, double angle_deg) {
  if (std::abs(angle_deg) >= 60.0)
    throw ValueError("shear angle " + std::to_string(angle_deg) +
                     " outside the +-60 degree bound");
  const double t = std::tan(deg_to_rad(angle_deg));
  if (t == 0.0) return img;

  const int out_w = img.width + ceil_int(img.height * std::abs(t));
  const double y_ref = t >= 0.0 ? img.height - 1 : 0.0;
  GrayImage out(out_w, img.height);
  for (int y = 0; y < img.height; ++y) {
    const double off = (y_ref - y) * t;  // >= 0 by choice of y_ref
    for (int x = 0; x < out_w; ++x)
      out(x, y) = quantize(sample_bilinear(img, x - off, y));
  }
  return out;
}

GrayImage scale_down(const GrayImage& img, double factor) {
  if (!(factor > 0.0) || factor > 1.0)
    throw ValueError("scale factor must lie in (0, 1], got " +
                     std::to_string(factor));
  if (factor == 1.0) return img;
  const int cw = std::max(1, round_half_up(img.width * factor));
  const int ch = std::max(1, round_half_up(img.height * factor));
  const GrayImage content = resize(img, cw, ch);
  return pad_to(content, cw, img.height, PadAnchor::center_vertical);
}

// ---------------------------------------------------------------------------
// Elastic deformation
// ---------------------------------------------------------------------------

namespace {

std::vector<double> normalized_gaussian_kernel(double sigma) {
  const int radius = ceil_int(3.0 * sigma);
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) /
                              (2.0 * sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable smoothing of a w x h field; values outside the field read 0.
void smooth_field(std::vector<double>& field, int w, int h, double sigma) {
  const auto kernel = normalized_gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(field.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sx = x + i;
        if (sx >= 0 && sx < w)
          acc += field[static_cast<std::size_t>(y) * w + sx] * kernel[i + radius];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int sy = y + i;
        if (sy >= 0 && sy < h)
          acc += tmp[static_cast<std::size_t>(sy) * w + x] * kernel[i + radius];
      }
      field[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
}

}  // namespace

GrayImage elastic(const GrayImage& img, double alpha, double sigma,
                  RngStream& rng) {
  if (alpha < 0.0) throw ValueError("elastic alpha must be >= 0");
  if (!(sigma > 0.0)) throw ValueError("elastic sigma must be > 0");

  const int w = img.width;
  const int h = img.height;
  std::vector<double> fx(img.pixel_count());
  std::vector<double> fy(img.pixel_count());
  // x field first, then y field, both row-major: part of the seed contract
  for (auto& v : fx) v = rng.uniform(-1.0, 1.0);
  for (auto& v : fy) v = rng.uniform(-1.0, 1.0);
  smooth_field(fx, w, h, sigma);
  smooth_field(fy, w, h, sigma);

  GrayImage out(w, h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      out(x, y) = quantize(
          sample_bilinear(img, x + alpha * fx[i], y + alpha * fy[i]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intensity operations
// ---------------------------------------------------------------------------

std::vector<int> draw_mask_columns(int width, double rate, RngStream& rng) {
  if (rate < 0.0 || rate > 1.0)
    throw ValueError("mask rate must lie in [0, 1], got " +
                     std::to_string(rate));
  const int count = round_half_up(rate * width);
  std::vector<int> idx(width);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = static_cast<int>(rng.uniform_int(i, width - 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> cols(idx.begin(), idx.begin() + count);
  std::sort(cols.begin(), cols.end());
  return cols;
}

GrayImage mask_columns(const GrayImage& img, std::span<const int> columns) {
  GrayImage out = img;
  for (int c : columns) {
    if (c < 0 || c >= img.width)
      throw DimensionError("masked column " + std::to_string(c) +
                           " outside image width " + std::to_string(img.width));
    for (int y = 0; y < img.height; ++y) out(c, y) = kBackground;
  }
  return out;
}

GrayImage mask_columns(const GrayImage& img, double rate, RngStream& rng) {
  const auto cols = draw_mask_columns(img.width, rate, rng);
  return mask_columns(img, cols);
}

GrayImage pixel_dropout(const GrayImage& img, double rate, RngStream& rng) {
  if (rate < 0.0 || rate > 1.0)
    throw ValueError("dropout rate must lie in [0, 1], got " +
                     std::to_string(rate));
  GrayImage out = img;
  for (auto& v : out.data)
    if (rng.uniform() < rate) v = kBackground;
  return out;
}

GrayImage gaussian_noise(const GrayImage& img, double sigma, RngStream& rng) {
  if (sigma < 0.0) throw ValueError("noise sigma must be >= 0");
  GrayImage out = img;
  for (auto& v : out.data) {
    const double noisy = v / 255.0 + rng.normal() * sigma;
    v = quantize(std::clamp(noisy, 0.0, 1.0) * 255.0);
  }
  return out;
}

std::array<double, 5> gaussian_blur_taps(double sigma) {
  if (!(sigma > 0.0)) throw ValueError("blur sigma must be > 0");
  std::array<double, 5> taps{};
  double sum = 0.0;
  for (int k = -2; k <= 2; ++k) {
    taps[k + 2] = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
    sum += taps[k + 2];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  const auto taps = gaussian_blur_taps(sigma);
  const int w = img.width;
  const int h = img.height;
  std::vector<double> tmp(img.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k)
        acc += img(std::clamp(x + k, 0, w - 1), y) * taps[k + 2];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k)
        acc += tmp[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x] *
               taps[k + 2];
      out(x, y) = quantize(acc);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configs and presets
// ---------------------------------------------------------------------------

void AugmentConfig::validate() const {
  auto ordered = [](double lo, double hi, const char* what) {
    if (lo > hi)
      throw ValueError(std::string(what) + " range has lo > hi");
  };
  switch (kind) {
    case AugKind::none:
      break;
    case AugKind::rotation_random:
    case AugKind::shear:
      ordered(angle_lo, angle_hi, "angle");
      break;
    case AugKind::rotation_fixed:
      break;
    case AugKind::dilation:
    case AugKind::erosion:
      if (se_size_lo < 1) throw ValueError("SE size must be >= 1");
      if (se_size_lo > se_size_hi) throw ValueError("SE size range has lo > hi");
      break;
    case AugKind::shift:
      ordered(shift_x_lo, shift_x_hi, "horizontal shift");
      ordered(shift_y_lo, shift_y_hi, "vertical shift");
      break;
    case AugKind::elastic:
      if (alpha_lo < 0.0) throw ValueError("elastic alpha must be >= 0");
      ordered(alpha_lo, alpha_hi, "alpha");
      if (!(sigma_lo > 0.0)) throw ValueError("elastic sigma must be > 0");
      ordered(sigma_lo, sigma_hi, "sigma");
      break;
    case AugKind::scale:
      if (!(scale_lo > 0.0) || scale_hi > 1.0)
        throw ValueError("scale factors must lie in (0, 1]");
      ordered(scale_lo, scale_hi, "scale");
      break;
    case AugKind::column_mask:
      if (mask_rate < 0.0 || mask_rate > 1.0)
        throw ValueError("mask rate must lie in [0, 1]");
      break;
    case AugKind::pixel_dropout:
      if (dropout_lo < 0.0 || dropout_hi > 1.0)
        throw ValueError("dropout rates must lie in [0, 1]");
      ordered(dropout_lo, dropout_hi, "dropout");
      break;
    case AugKind::gaussian_noise:
      if (noise_sigmas.empty()) throw ValueError("noise sigma set is empty");
      for (double s : noise_sigmas)
        if (s < 0.0) throw ValueError("noise sigma must be >= 0");
      break;
    case AugKind::gaussian_blur:
      if (!(blur_sigma_lo > 0.0)) throw ValueError("blur sigma must be > 0");
      ordered(blur_sigma_lo, blur_sigma_hi, "blur sigma");
      break;
  }
}

const std::vector<std::string>& AugmentConfig::preset_names() {
  static const std::vector<std::string> kNames = {
      "baseline",       "rot1.5",        "rot5",
      "rot10",          "positive",      "negative",
      "rot+2",          "rot-2",         "square-dilation",
      "disk-dilation",  "square-erosion", "disk-erosion",
      "shift",          "elastic",       "shear",
      "shear30",        "scale75",       "scale95",
      "mask10",         "mask40",        "noise",
      "dropout",        "blur",
  };
  return kNames;
}

bool AugmentConfig::is_preset(const std::string& name) {
  const auto& names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

AugmentConfig AugmentConfig::preset(const std::string& name) {
  AugmentConfig c;
  c.name = name;
  auto rotation = [&c](double lo, double hi) {
    c.kind = AugKind::rotation_random;
    c.angle_lo = lo;
    c.angle_hi = hi;
  };
  auto morph = [&c](AugKind kind, SeShape shape, int lo, int hi) {
    c.kind = kind;
    c.se_shape = shape;
    c.se_size_lo = lo;
    c.se_size_hi = hi;
  };

  if (name == "baseline") {
    c.kind = AugKind::none;
  } else if (name == "rot1.5") {
    rotation(-1.5, 1.5);
  } else if (name == "rot5") {
    rotation(-5.0, 5.0);
  } else if (name == "rot10") {
    rotation(-10.0, 10.0);
  } else if (name == "positive") {
    rotation(0.0, 1.5);
  } else if (name == "negative") {
    rotation(-1.5, 0.0);
  } else if (name == "rot+2") {
    c.kind = AugKind::rotation_fixed;
    c.fixed_angle = 2.0;
  } else if (name == "rot-2") {
    c.kind = AugKind::rotation_fixed;
    c.fixed_angle = -2.0;
  } else if (name == "square-dilation") {
    morph(AugKind::dilation, SeShape::square, 1, 4);
  } else if (name == "disk-dilation") {
    morph(AugKind::dilation, SeShape::disk, 1, 4);
  } else if (name == "square-erosion") {
    morph(AugKind::erosion, SeShape::square, 1, 3);
  } else if (name == "disk-erosion") {
    morph(AugKind::erosion, SeShape::disk, 1, 3);
  } else if (name == "shift") {
    c.kind = AugKind::shift;
    c.shift_x_lo = 0.0;
    c.shift_x_hi = 15.0;
    c.shift_y_lo = -3.5;
    c.shift_y_hi = 3.5;
  } else if (name == "elastic") {
    c.kind = AugKind::elastic;
    c.alpha_lo = 16.0;
    c.alpha_hi = 20.0;
    c.sigma_lo = 5.0;
    c.sigma_hi = 7.0;
  } else if (name == "shear") {
    c.kind = AugKind::shear;
    c.angle_lo = -5.0;
    c.angle_hi = 30.0;
  } else if (name == "shear30") {
    c.kind = AugKind::shear;
    c.angle_lo = -30.0;
    c.angle_hi = 30.0;
  } else if (name == "scale75") {
    c.kind = AugKind::scale;
    c.scale_lo = 0.75;
    c.scale_hi = 1.0;
  } else if (name == "scale95") {
    c.kind = AugKind::scale;
    c.scale_lo = 0.95;
    c.scale_hi = 1.0;
  } else if (name == "mask10") {
    c.kind = AugKind::column_mask;
    c.mask_rate = 0.10;
  } else if (name == "mask40") {
    c.kind = AugKind::column_mask;
    c.mask_rate = 0.40;
  } else if (name == "noise") {
    c.kind = AugKind::gaussian_noise;
    c.noise_sigmas = {0.08, 0.12, 0.18};
  } else if (name == "dropout") {
    c.kind = AugKind::pixel_dropout;
    c.dropout_lo = 0.0;
    c.dropout_hi = 0.20;
  } else if (name == "blur") {
    c.kind = AugKind::gaussian_blur;
    c.blur_sigma_lo = 0.1;
    c.blur_sigma_hi = 2.0;
  } else {
    throw ValueError("unknown preset: " + name);
  }
  return c;
}

std::vector<AugmentConfig> AugmentConfig::sequence(const std::string& name) {
  if (name == "combined-top3")
    return {preset("rot1.5"), preset("shift"), preset("scale75")};
  return {preset(name)};
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": not a number: '" + text + "'");
  }
}

std::vector<double> parse_numbers(const std::string& text,
                                  const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number(trim(item), where));
  if (out.empty()) throw ParseError(where + ": empty value");
  return out;
}

}  // namespace

AugmentConfig AugmentConfig::from_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such config file: " + path.string());
    throw Error("cannot open config file: " + path.string());
  }

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
  }

  auto take = [&kv](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    std::string v = take(key);
    if (v.empty())
      throw ParseError(path.string() + ": missing required key '" + key + "'");
    return v;
  };
  auto range_of = [&](const std::string& key) {
    const auto nums = parse_numbers(require(key), path.string() + ": " + key);
    if (nums.size() == 1) return std::make_pair(nums[0], nums[0]);
    if (nums.size() != 2)
      throw ParseError(path.string() + ": " + key +
                       " expects one or two comma-separated numbers");
    return std::make_pair(nums[0], nums[1]);
  };

  AugmentConfig c;
  if (std::string n = take("name"); !n.empty()) c.name = n;
  const std::string type = require("type");

  if (type == "none") {
    c.kind = AugKind::none;
  } else if (type == "rotation") {
    c.kind = AugKind::rotation_random;
    std::tie(c.angle_lo, c.angle_hi) = range_of("range");
  } else if (type == "rotation-fixed") {
    c.kind = AugKind::rotation_fixed;
    c.fixed_angle = parse_number(require("angle"), path.string() + ": angle");
  } else if (type == "dilation" || type == "erosion") {
    c.kind = type == "dilation" ? AugKind::dilation : AugKind::erosion;
    const std::string se = require("se");
    if (se == "square")
      c.se_shape = SeShape::square;
    else if (se == "disk")
      c.se_shape = SeShape::disk;
    else
      throw ParseError(path.string() + ": se must be 'square' or 'disk'");
    const auto [lo, hi] = range_of("size");
    c.se_size_lo = static_cast<int>(lo);
    c.se_size_hi = static_cast<int>(hi);
    if (lo != c.se_size_lo || hi != c.se_size_hi)
      throw ParseError(path.string() + ": SE sizes must be integers");
  } else if (type == "shift") {
    c.kind = AugKind::shift;
    std::tie(c.shift_x_lo, c.shift_x_hi) = range_of("horizontal");
    std::tie(c.shift_y_lo, c.shift_y_hi) = range_of("vertical");
  } else if (type == "elastic") {
    c.kind = AugKind::elastic;
    std::tie(c.alpha_lo, c.alpha_hi) = range_of("alpha");
    std::tie(c.sigma_lo, c.sigma_hi) = range_of("sigma");
  } else if (type == "shear") {
    c.kind = AugKind::shear;
    std::tie(c.angle_lo, c.angle_hi) = range_of("range");
  } else if (type == "scale") {
    c.kind = AugKind::scale;
    std::tie(c.scale_lo, c.scale_hi) = range_of("range");
  } else if (type == "column-mask") {
    c.kind = AugKind::column_mask;
    c.mask_rate = parse_number(require("rate"), path.string() + ": rate");
  } else if (type == "dropout") {
    c.kind = AugKind::pixel_dropout;
    std::tie(c.dropout_lo, c.dropout_hi) = range_of("rate");
  } else if (type == "noise") {
    c.kind = AugKind::gaussian_noise;
    c.noise_sigmas =
        parse_numbers(require("sigma"), path.string() + ": sigma");
  } else if (type == "blur") {
    c.kind = AugKind::gaussian_blur;
    std::tie(c.blur_sigma_lo, c.blur_sigma_hi) = range_of("sigma");
    if (std::string k = take("kernel"); !k.empty()) {
      if (parse_number(k, path.string() + ": kernel") != 5.0)
        throw ParseError(path.string() + ": only kernel = 5 is supported");
    }
  } else {
    throw ParseError(path.string() + ": unknown type '" + type + "'");
  }

  if (!kv.empty())
    throw ParseError(path.string() + ": unknown key '" + kv.begin()->first +
                     "' for type '" + type + "'");
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Sampling, application, composition
// ---------------------------------------------------------------------------

bool SampledParams::has(std::string_view key) const {
  for (const auto& [k, v] : values)
    if (k == key) return true;
  return false;
}

double SampledParams::value(std::string_view key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw ValueError("sampled params for '" + config + "' have no value '" +
                   std::string(key) + "'");
}

nlohmann::json SampledParams::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  j["kind"] = std::string(to_string(kind));
  nlohmann::json vals = nlohmann::json::object();
  for (const auto& [k, v] : values) vals[k] = v;
  j["values"] = vals;
  if (kind == AugKind::dilation || kind == AugKind::erosion)
    j["se_shape"] = se_shape == SeShape::square ? "square" : "disk";
  if (kind == AugKind::column_mask) j["masked_columns"] = masked_columns;
  if (kind == AugKind::elastic || kind == AugKind::pixel_dropout ||
      kind == AugKind::gaussian_noise)
    j["aux_seed"] = aux_seed;
  return j;
}

SampledParams sample_params(const AugmentConfig& config, int image_width,
                            RngStream& rng) {
  config.validate();
  SampledParams p;
  p.config = config.name;
  p.kind = config.kind;
  p.se_shape = config.se_shape;
  switch (config.kind) {
    case AugKind::none:
      break;
    case AugKind::rotation_random:
      p.values.emplace_back("angle",
                            rng.uniform(config.angle_lo, config.angle_hi));
      break;
    case AugKind::rotation_fixed:
      p.values.emplace_back("angle", config.fixed_angle);
      break;
    case AugKind::dilation:
    case AugKind::erosion:
      p.values.emplace_back(
          "se_size", static_cast<double>(
                         rng.uniform_int(config.se_size_lo, config.se_size_hi)));
      break;
    case AugKind::shift:
      p.values.emplace_back("dx",
                            rng.uniform(config.shift_x_lo, config.shift_x_hi));
      p.values.emplace_back("dy",
                            rng.uniform(config.shift_y_lo, config.shift_y_hi));
      break;
    case AugKind::elastic:
      p.values.emplace_back("alpha",
                            rng.uniform(config.alpha_lo, config.alpha_hi));
      p.values.emplace_back("sigma",
                            rng.uniform(config.sigma_lo, config.sigma_hi));
      p.aux_seed = rng.next_u64();
      break;
    case AugKind::shear:
      p.values.emplace_back("angle",
                            rng.uniform(config.angle_lo, config.angle_hi));
      break;
    case AugKind::scale:
      p.values.emplace_back("factor",
                            rng.uniform(config.scale_lo, config.scale_hi));
      break;
    case AugKind::column_mask:
      p.values.emplace_back("rate", config.mask_rate);
      p.masked_columns = draw_mask_columns(image_width, config.mask_rate, rng);
      break;
    case AugKind::pixel_dropout:
      p.values.emplace_back("rate",
                            rng.uniform(config.dropout_lo, config.dropout_hi));
      p.aux_seed = rng.next_u64();
      break;
    case AugKind::gaussian_noise: {
      const auto idx = rng.uniform_int(
          0, static_cast<std::int64_t>(config.noise_sigmas.size()) - 1);
      p.values.emplace_back("sigma", config.noise_sigmas[idx]);
      p.aux_seed = rng.next_u64();
      break;
    }
    case AugKind::gaussian_blur:
      p.values.emplace_back(
          "sigma", rng.uniform(config.blur_sigma_lo, config.blur_sigma_hi));
      break;
  }
  return p;
}

SampledParams extreme_params(const AugmentConfig& config, int image_width,
                             bool high, RngStream& rng) {
  config.validate();
  SampledParams p;
  p.config = config.name;
  p.kind = config.kind;
  p.se_shape = config.se_shape;
  auto pick = [high](double lo, double hi) { return high ? hi : lo; };
  switch (config.kind) {
    case AugKind::none:
      break;
    case AugKind::rotation_random:
      p.values.emplace_back("angle", pick(config.angle_lo, config.angle_hi));
      break;
    case AugKind::rotation_fixed:
      p.values.emplace_back("angle", config.fixed_angle);
      break;
    case AugKind::dilation:
    case AugKind::erosion:
      p.values.emplace_back("se_size",
                            static_cast<double>(high ? config.se_size_hi
                                                     : config.se_size_lo));
      break;
    case AugKind::shift:
      p.values.emplace_back("dx", pick(config.shift_x_lo, config.shift_x_hi));
      p.values.emplace_back("dy", pick(config.shift_y_lo, config.shift_y_hi));
      break;
    case AugKind::elastic:
      p.values.emplace_back("alpha", pick(config.alpha_lo, config.alpha_hi));
      p.values.emplace_back("sigma", pick(config.sigma_lo, config.sigma_hi));
      p.aux_seed = rng.next_u64();
      break;
    case AugKind::shear:
      p.values.emplace_back("angle", pick(config.angle_lo, config.angle_hi));
      break;
    case AugKind::scale:
      p.values.emplace_back("factor", pick(config.scale_lo, config.scale_hi));
      break;
    case AugKind::column_mask:
      p.values.emplace_back("rate", config.mask_rate);
      p.masked_columns = draw_mask_columns(image_width, config.mask_rate, rng);
      break;
    case AugKind::pixel_dropout:
      p.values.emplace_back("rate", pick(config.dropout_lo, config.dropout_hi));
      p.aux_seed = rng.next_u64();
      break;
    case AugKind::gaussian_noise: {
      const auto [lo, hi] = std::minmax_element(config.noise_sigmas.begin(),
                                                config.noise_sigmas.end());
      p.values.emplace_back("sigma", high ? *hi : *lo);
      p.aux_seed = rng.next_u64();
      break;
    }
    case AugKind::gaussian_blur:
      p.values.emplace_back("sigma",
                            pick(config.blur_sigma_lo, config.blur_sigma_hi));
      break;
  }
  return p;
}

GrayImage apply_params(const GrayImage& img, const SampledParams& p) {
  switch (p.kind) {
    case AugKind::none:
      return img;
    case AugKind::rotation_random:
    case AugKind::rotation_fixed:
      return rotate_expand(img, p.value("angle"));
    case AugKind::dilation:
    case AugKind::erosion: {
      const int size = static_cast<int>(p.value("se_size"));
      const StructuringElement se = p.se_shape == SeShape::square
                                        ? StructuringElement::square(size)
                                        : StructuringElement::disk(size);
      return morphology(
          img, p.kind == AugKind::dilation ? MorphOp::dilate : MorphOp::erode,
          se);
    }
    case AugKind::shift:
      return shift(img, p.value("dx"), p.value("dy"));
    case AugKind::elastic: {
      RngStream field_rng(p.aux_seed);
      return elastic(img, p.value("alpha"), p.value("sigma"), field_rng);
    }
    case AugKind::shear:
      return shear_horizontal(img, p.value("angle"));
    case AugKind::scale:
      return scale_down(img, p.value("factor"));
    case AugKind::column_mask:
      return mask_columns(img, p.masked_columns);
    case AugKind::pixel_dropout: {
      RngStream drop_rng(p.aux_seed);
      return pixel_dropout(img, p.value("rate"), drop_rng);
    }
    case AugKind::gaussian_noise: {
      RngStream noise_rng(p.aux_seed);
      return gaussian_noise(img, p.value("sigma"), noise_rng);
    }
    case AugKind::gaussian_blur:
      return gaussian_blur(img, p.value("sigma"));
  }
  throw ValueError("unhandled augmentation kind");
}

std::pair<GrayImage, SampledParams> sample_and_apply(
    const AugmentConfig& config, const GrayImage& img, RngStream& rng) {
  SampledParams p = sample_params(config, img.width, rng);
  return {apply_params(img, p), std::move(p)};
}

std::pair<GrayImage, std::vector<SampledParams>> compose(
    const std::vector<AugmentConfig>& configs, double per_config_prob,
    const GrayImage& img, RngStream& rng) {
  if (per_config_prob < 0.0 || per_config_prob > 1.0)
    throw ValueError("composition probability must lie in [0, 1]");
  GrayImage current = img;
  std::vector<SampledParams> trace;
  for (const auto& config : configs) {
    const bool apply = rng.uniform() < per_config_prob;
    if (!apply) continue;
    auto [next, params] = sample_and_apply(config, current, rng);
    current = std::move(next);
    trace.push_back(std::move(params));
  }
  return {std::move(current), std::move(trace)};
}

}  // namespace stenaug
