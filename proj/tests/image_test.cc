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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "shadowkit/error.h"
#include "test_support.h"

namespace shadowkit {
namespace {

using testing::CaptureCode;

// Writes a PNG straight through libpng so decoding is checked against an
// encoder that is not ours.
std::string WriteRawPng(int w, int h, int color_type, int bit_depth,
                        const std::vector<std::vector<std::uint8_t>>& rows,
                        const std::vector<png_color>& palette = {}) {
  std::string out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    ADD_FAILURE() << "libpng write failed";
    return {};
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t n) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<char*>(data), n);
      },
      nullptr);
  png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  if (!palette.empty()) {
    png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
  }
  png_write_info(png, info);
  for (const auto& row : rows) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image RandomImage(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Image img(w, h);
  for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng());
  return img;
}

TEST(PngTest, RgbRoundTrip) {
  for (auto [w, h] : {std::pair{1, 1}, {7, 3}, {64, 64}, {240, 240}}) {
    const Image img = RandomImage(w, h, w * 1000 + h);
    const std::string bytes = EncodePng(img);
    EXPECT_EQ(DecodePng(bytes), img);
    EXPECT_EQ(EncodePng(img), bytes);  // no timestamps or other drift
  }
}

TEST(PngTest, DecodesForeignFormats) {
  const int w = 3, h = 2;
  // Gray 8.
  {
    std::vector<std::vector<std::uint8_t>> rows{{0, 100, 255}, {1, 2, 3}};
    const Image img = DecodePng(WriteRawPng(w, h, PNG_COLOR_TYPE_GRAY, 8, rows));
    EXPECT_EQ(img.at(1, 0), (Rgb{100, 100, 100}));
    EXPECT_EQ(img.at(2, 1), (Rgb{3, 3, 3}));
  }
  // RGBA 8: alpha dropped.
  {
    std::vector<std::vector<std::uint8_t>> rows(h, std::vector<std::uint8_t>(w * 4));
    for (int x = 0; x < w; ++x) {
      rows[0][4 * x] = 10 * x;
      rows[0][4 * x + 1] = 20;
      rows[0][4 * x + 2] = 30;
      rows[0][4 * x + 3] = 0;
    }
    const Image img = DecodePng(WriteRawPng(w, h, PNG_COLOR_TYPE_RGBA, 8, rows));
    EXPECT_EQ(img.at(2, 0), (Rgb{20, 20, 30}));
  }
  // RGB 16: high byte kept.
  {
    std::vector<std::vector<std::uint8_t>> rows(h, std::vector<std::uint8_t>(w * 6, 0));
    rows[1][0] = 0xAB;
    rows[1][1] = 0xFF;
    const Image img = DecodePng(WriteRawPng(w, h, PNG_COLOR_TYPE_RGB, 16, rows));
    EXPECT_EQ(img.at(0, 1).r, 0xAB);
  }
  // Palette.
  {
    std::vector<png_color> pal{{1, 2, 3}, {200, 100, 50}};
    std::vector<std::vector<std::uint8_t>> rows{{0, 1, 0}, {1, 1, 0}};
    const Image img = DecodePng(WriteRawPng(w, h, PNG_COLOR_TYPE_PALETTE, 8, rows, pal));
    EXPECT_EQ(img.at(1, 0), (Rgb{200, 100, 50}));
    EXPECT_EQ(img.at(2, 1), (Rgb{1, 2, 3}));
  }
}

TEST(PngTest, CorruptInputThrowsDecodeError) {
  EXPECT_EQ(CaptureCode([] { DecodePng(""); }), ErrorCode::kImageDecodeError);
  EXPECT_EQ(CaptureCode([] { DecodePng("not a png at all"); }), ErrorCode::kImageDecodeError);
  const std::string good = EncodePng(RandomImage(16, 16, 3));
  EXPECT_EQ(CaptureCode([&] { DecodePng(good.substr(0, good.size() / 2)); }),
            ErrorCode::kImageDecodeError);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    std::string bad = good;
    const int flips = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < flips; ++k) bad[8 + rng() % (bad.size() - 8)] ^= 1 << (rng() % 8);
    // Either decodes (flip landed somewhere harmless) or reports a decode error.
    try {
      DecodePng(bad);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kImageDecodeError);
    }
  }
}

TEST(PngTest, MaskRoundTrip) {
  std::mt19937_64 rng(9);
  Mask m(37, 11);
  for (auto& b : m.bits) b = rng() % 2;
  EXPECT_EQ(DecodeMaskPng(EncodeMaskPng(m)), m);
  EXPECT_EQ(CaptureCode([] { DecodeMaskPng("xx"); }), ErrorCode::kImageDecodeError);
}

TEST(PngTest, DepthRoundTripsToTheMillimeter) {
  DepthBuffer d(5, 2);
  d.values = {0.0004, 0.0006, 1.2344, 1.2346, 65.535, 70.0, 0.5, 2.0,
              std::numeric_limits<double>::infinity(), 0.001};
  const DepthBuffer back = DecodeDepthPng(EncodeDepthPng(d));
  ASSERT_EQ(back.width, 5);
  ASSERT_EQ(back.height, 2);
  // Positive depths never collapse into the empty code.
  EXPECT_DOUBLE_EQ(back.values[0], 0.001);
  EXPECT_DOUBLE_EQ(back.values[1], 0.001);
  EXPECT_DOUBLE_EQ(back.values[2], 1.234);
  EXPECT_DOUBLE_EQ(back.values[3], 1.235);
  EXPECT_DOUBLE_EQ(back.values[4], 65.535);
  EXPECT_DOUBLE_EQ(back.values[5], 65.535);  // saturated
  EXPECT_TRUE(std::isinf(back.values[8]));
  EXPECT_DOUBLE_EQ(back.values[9], 0.001);
}

TEST(PngTest, FilesAndErrors) {
  testing::TempDir dir;
  const Image img = RandomImage(9, 4, 11);
  WritePng(dir.path() / "a.png", img);
  EXPECT_EQ(ReadPng(dir.path() / "a.png"), img);
  EXPECT_EQ(CaptureCode([&] { ReadPng(dir.path() / "missing.png"); }), ErrorCode::kMissingFile);
}

TEST(FillMaskTest, FillsOnlyMaskedPixels) {
  Image img = RandomImage(6, 5, 12);
  const Image before = img;
  Mask m(6, 5);
  m.bits[7] = m.bits[29] = 1;
  FillMask(img, m, {1, 2, 3});
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 6; ++x) {
      EXPECT_EQ(img.at(x, y), m.at(x, y) ? (Rgb{1, 2, 3}) : before.at(x, y));
    }
  }
  EXPECT_EQ(CaptureCode([&] { FillMask(img, Mask(5, 5), {}); }), ErrorCode::kDimensionMismatch);
}

}  // namespace
}  // namespace shadowkit
