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

#ifndef SHADOWKIT_IMAGE_H_
#define SHADOWKIT_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "shadowkit/render.h"

namespace shadowkit {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// 8-bit RGB, row-major, interleaved.
struct Image {
  Image() = default;
  Image(int w, int h, Rgb fill = {})
      : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < rgb.size(); i += 3) {
      rgb[i] = fill.r;
      rgb[i + 1] = fill.g;
      rgb[i + 2] = fill.b;
    }
  }

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Rgb at(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  }

  bool operator==(const Image&) const = default;
};

// Sets every masked pixel to `color`. Throws Error(kDimensionMismatch).
void FillMask(Image& image, const Mask& mask, Rgb color);

// PNG codecs. Encoding is deterministic (fixed compression settings, no
// timestamps). Decoding accepts gray, gray+alpha, RGB, RGBA and palette
// images at 8 or 16 bits and throws Error(kImageDecodeError) otherwise.
std::string EncodePng(const Image& image);
Image DecodePng(std::string_view bytes);
// 1-bit grayscale; set pixels are white.
std::string EncodeMaskPng(const Mask& mask);
Mask DecodeMaskPng(std::string_view bytes);
// 16-bit grayscale in millimeters, 0 meaning empty (+inf). Values are
// rounded to the nearest millimeter, kept at 1 mm or more when positive,
// and saturate at 65535.
std::string EncodeDepthPng(const DepthBuffer& depth);
DepthBuffer DecodeDepthPng(std::string_view bytes);

// File helpers. Reading a missing file throws Error(kMissingFile).
Image ReadPng(const std::filesystem::path& path);
void WritePng(const std::filesystem::path& path, const Image& image);

}  // namespace shadowkit

#endif  // SHADOWKIT_IMAGE_H_
