// Copyright 2026 The ShadowKit Authors
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

#include "shadowkit/image.h"

#include <png.h>

#include <cmath>
#include <cstring>

#include "shadowkit/error.h"
#include "shadowkit/json_io.h"

namespace shadowkit {

void FillMask(Image& image, const Mask& mask, Rgb color) {
  if (image.width != mask.width || image.height != mask.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                    " does not match image " + std::to_string(image.width) + "x" +
                    std::to_string(image.height));
  }
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (!mask.bits[i]) continue;
    image.rgb[3 * i] = color.r;
    image.rgb[3 * i + 1] = color.g;
    image.rgb[3 * i + 2] = color.b;
  }
}

namespace {

struct PngWriteState {
  std::string out;
};

void WriteCallback(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->out.append(reinterpret_cast<const char*>(data), length);
}

void FlushCallback(png_structp) {}

[[noreturn]] void PngError(png_structp, png_const_charp message) {
  throw Error(ErrorCode::kImageDecodeError, std::string("libpng: ") + message);
}

void PngWarning(png_structp, png_const_charp) {}

// Rows must already be packed for the given bit depth and color type.
std::string EncodeRows(int width, int height, int bit_depth, int color_type,
                       const std::vector<std::vector<std::uint8_t>>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, PngError, PngWarning);
  if (!png) throw Error(ErrorCode::kIoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  PngWriteState state;
  try {
    png_set_write_fn(png, &state, WriteCallback, FlushCallback);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (const auto& row : rows) png_write_row(png, row.data());
    png_write_end(png, nullptr);
  } catch (const Error& e) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIoError, e.what());
  }
  png_destroy_write_struct(&png, &info);
  return std::move(state.out);
}

struct PngReadState {
  std::string_view data;
  std::size_t pos = 0;
};

void ReadCallback(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->pos + length > state->data.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, state->data.data() + state->pos, length);
  state->pos += length;
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // after expansion: 1 (gray) or 3 (RGB)
  int bit_depth = 8;
  std::vector<std::vector<std::uint8_t>> rows;
};

// Decodes to gray or RGB at 8 bits, or keeps 16-bit gray when asked.
Decoded DecodeRows(std::string_view bytes, bool keep_16bit_gray) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8)) {
    throw Error(ErrorCode::kImageDecodeError, "not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, PngError, PngWarning);
  if (!png) throw Error(ErrorCode::kImageDecodeError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngReadState state{bytes, 0};
  Decoded d;
  try {
    png_set_read_fn(png, &state, ReadCallback);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    const bool gray = (color & PNG_COLOR_MASK_COLOR) == 0;
    if (depth == 16) {
      if (keep_16bit_gray && gray) {
        png_set_swap(png);  // host-endian uint16
      } else {
        png_set_strip_16(png);
      }
    }
    png_read_update_info(png, info);
    d.width = static_cast<int>(png_get_image_width(png, info));
    d.height = static_cast<int>(png_get_image_height(png, info));
    d.channels = png_get_channels(png, info);
    d.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    d.rows.assign(d.height, std::vector<std::uint8_t>(rowbytes));
    for (auto& row : d.rows) png_read_row(png, row.data(), nullptr);
    png_read_end(png, nullptr);
  } catch (const Error&) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

}  // namespace

std::string EncodePng(const Image& image) {
  std::vector<std::vector<std::uint8_t>> rows(image.height);
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  for (int y = 0; y < image.height; ++y) {
    rows[y].assign(image.rgb.begin() + y * stride, image.rgb.begin() + (y + 1) * stride);
  }
  return EncodeRows(image.width, image.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

Image DecodePng(std::string_view bytes) {
  const Decoded d = DecodeRows(bytes, false);
  Image img(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      if (d.channels == 1) {
        const std::uint8_t g = d.rows[y][x];
        img.set(x, y, {g, g, g});
      } else if (d.channels == 3) {
        img.set(x, y, {d.rows[y][3 * x], d.rows[y][3 * x + 1], d.rows[y][3 * x + 2]});
      } else {
        throw Error(ErrorCode::kImageDecodeError, "unsupported PNG channel layout");
      }
    }
  }
  return img;
}

std::string EncodeMaskPng(const Mask& mask) {
  std::vector<std::vector<std::uint8_t>> rows(mask.height,
                                              std::vector<std::uint8_t>((mask.width + 7) / 8, 0));
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) rows[y][x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }
  }
  return EncodeRows(mask.width, mask.height, 1, PNG_COLOR_TYPE_GRAY, rows);
}

Mask DecodeMaskPng(std::string_view bytes) {
  const Decoded d = DecodeRows(bytes, false);
  if (d.channels != 1) throw Error(ErrorCode::kImageDecodeError, "mask PNG must be grayscale");
  Mask m(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) m.set(x, y, d.rows[y][x] >= 128);
  }
  return m;
}

std::string EncodeDepthPng(const DepthBuffer& depth) {
  std::vector<std::vector<std::uint8_t>> rows(depth.height,
                                              std::vector<std::uint8_t>(depth.width * 2, 0));
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      const double d = depth.at(x, y);
      std::uint16_t mm = 0;
      if (std::isfinite(d) && d > 0.0) {
        mm = static_cast<std::uint16_t>(std::clamp(std::lround(d * 1000.0), 1L, 65535L));
      }
      rows[y][2 * x] = static_cast<std::uint8_t>(mm >> 8);  // PNG is big-endian
      rows[y][2 * x + 1] = static_cast<std::uint8_t>(mm & 0xff);
    }
  }
  return EncodeRows(depth.width, depth.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

DepthBuffer DecodeDepthPng(std::string_view bytes) {
  const Decoded d = DecodeRows(bytes, true);
  if (d.channels != 1 || d.bit_depth != 16) {
    throw Error(ErrorCode::kImageDecodeError, "depth PNG must be 16-bit grayscale");
  }
  DepthBuffer out(d.width, d.height);
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      std::uint16_t mm;
      std::memcpy(&mm, d.rows[y].data() + 2 * x, 2);
      if (mm != 0) out.at(x, y) = mm / 1000.0;
    }
  }
  return out;
}

Image ReadPng(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorCode::kMissingFile, "missing image " + path.string());
  }
  return DecodePng(ReadTextFile(path));
}

void WritePng(const std::filesystem::path& path, const Image& image) {
  WriteTextFile(path, EncodePng(image));
}

}  // namespace shadowkit
