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

#include "stenaug/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "stenaug/error.hpp"

namespace stenaug {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors via longjmp; the handler stores the message in the
// error_ptr string owned by the caller. Each setjmp region below lives in a
// helper whose locals are all trivial, so the jump never skips destructors.
void capture_error(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) err->assign(msg);
  png_longjmp(png, 1);
}

void ignore_warning(png_structp, png_const_charp) {}

struct ReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::string err;
  ~ReadState() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

struct WriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::string err;
  ~WriteState() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
  }
};

bool read_header(png_structp png, png_infop info, std::FILE* f) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  return true;
}

bool apply_read_transforms(png_structp png, png_infop info, int color_type,
                           int bit_depth) {
  if (setjmp(png_jmpbuf(png))) return false;
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  return true;
}

bool read_rows(png_structp png, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool write_all(png_structp png, png_infop info, std::FILE* f, int width,
               int height, png_bytep* rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, f);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

GrayImage read_png(const std::filesystem::path& path, bool luma_convert) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) {
    if (!std::filesystem::exists(path))
      throw FileNotFoundError("no such file: " + path.string());
    throw Error("cannot open for reading: " + path.string());
  }

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw UnsupportedFormatError("not a PNG file: " + path.string());

  ReadState s;
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &s.err, capture_error,
                                 ignore_warning);
  if (!s.png) throw Error("png_create_read_struct failed");
  s.info = png_create_info_struct(s.png);
  if (!s.info) throw Error("png_create_info_struct failed");

  if (!read_header(s.png, s.info, file.get()))
    throw Error("libpng: " + s.err + " (" + path.string() + ")");

  const png_uint_32 w = png_get_image_width(s.png, s.info);
  const png_uint_32 h = png_get_image_height(s.png, s.info);
  const int bit_depth = png_get_bit_depth(s.png, s.info);
  const int color_type = png_get_color_type(s.png, s.info);

  if (bit_depth == 16)
    throw UnsupportedFormatError("16-bit PNG not supported: " + path.string());

  const bool is_gray = color_type == PNG_COLOR_TYPE_GRAY ||
                       color_type == PNG_COLOR_TYPE_GRAY_ALPHA;
  if (!is_gray && !luma_convert)
    throw UnsupportedFormatError(
        "color PNG rejected (enable luma conversion to accept): " +
        path.string());

  if (!apply_read_transforms(s.png, s.info, color_type, bit_depth))
    throw Error("libpng: " + s.err + " (" + path.string() + ")");

  const int channels = png_get_channels(s.png, s.info);
  if (channels != 1 && channels != 3)
    throw UnsupportedFormatError("unexpected channel count " +
                                 std::to_string(channels) + ": " +
                                 path.string());

  std::vector<unsigned char> rowbuf(static_cast<std::size_t>(w) * channels * h);
  std::vector<png_bytep> rows(h);
  for (png_uint_32 y = 0; y < h; ++y)
    rows[y] = rowbuf.data() + static_cast<std::size_t>(y) * w * channels;

  if (!read_rows(s.png, rows.data()))
    throw Error("libpng: " + s.err + " (" + path.string() + ")");

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  if (channels == 1) {
    img.data.assign(rowbuf.begin(), rowbuf.end());
  } else {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      const double r = rowbuf[3 * i];
      const double g = rowbuf[3 * i + 1];
      const double b = rowbuf[3 * i + 2];
      img.data[i] = quantize(0.299 * r + 0.587 * g + 0.114 * b);
    }
  }
  return img;
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw Error("cannot open for writing: " + path.string());

  WriteState s;
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &s.err, capture_error,
                                  ignore_warning);
  if (!s.png) throw Error("png_create_write_struct failed");
  s.info = png_create_info_struct(s.png);
  if (!s.info) throw Error("png_create_info_struct failed");

  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = const_cast<png_bytep>(img.data.data() +
                                    static_cast<std::size_t>(y) * img.width);

  if (!write_all(s.png, s.info, file.get(), img.width, img.height, rows.data()))
    throw Error("libpng: " + s.err + " (" + path.string() + ")");
}

}  // namespace stenaug
