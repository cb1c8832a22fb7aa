/*
 * Copyright 2026 The pseudobox Authors. All rights reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pseudobox/mask.hpp"

#include <algorithm>
#include <cmath>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

namespace
{

// Absorbs rounding in the shrink rectangle so that integer endpoints survive.
constexpr double kPixelTolerance = 1e-9;

}  // namespace

InstanceMask::InstanceMask(int id, std::string class_name, int height, int width,
                           std::vector<std::uint8_t> pixels)
: id_(id), class_name_(std::move(class_name)), height_(height), width_(width),
  pixels_(std::move(pixels))
{
  if (height_ <= 0 || width_ <= 0) {
    throw InputError("mask " + std::to_string(id_) + " has nonpositive image size");
  }
  if (pixels_.size() != static_cast<std::size_t>(height_) * width_) {
    throw InputError("mask " + std::to_string(id_) + " pixel buffer does not match H x W");
  }
  bool any = false;
  bounds_ = {width_, -1, height_, -1};
  for (int v = 0; v < height_; ++v) {
    for (int u = 0; u < width_; ++u) {
      if (pixels_[static_cast<std::size_t>(v) * width_ + u] == 0) {
        continue;
      }
      pixels_[static_cast<std::size_t>(v) * width_ + u] = 1;
      any = true;
      bounds_.u_min = std::min(bounds_.u_min, u);
      bounds_.u_max = std::max(bounds_.u_max, u);
      bounds_.v_min = std::min(bounds_.v_min, v);
      bounds_.v_max = std::max(bounds_.v_max, v);
    }
  }
  if (!any) {
    throw InputError("mask " + std::to_string(id_) + " is empty");
  }
}

InstanceMask InstanceMask::rectangle(int id, std::string class_name, int height, int width,
                                     const PixelBounds & bounds)
{
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(std::max(height, 0)) *
                                   std::max(width, 0));
  const int u0 = std::max(bounds.u_min, 0);
  const int u1 = std::min(bounds.u_max, width - 1);
  const int v0 = std::max(bounds.v_min, 0);
  const int v1 = std::min(bounds.v_max, height - 1);
  for (int v = v0; v <= v1; ++v) {
    std::fill_n(pixels.begin() + static_cast<std::ptrdiff_t>(v) * width + u0,
                std::max(0, u1 - u0 + 1), std::uint8_t{1});
  }
  return InstanceMask(id, std::move(class_name), height, width, std::move(pixels));
}

std::size_t InstanceMask::pixel_count() const noexcept
{
  return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
}

ShrunkMask shrink_mask(const InstanceMask & mask, double shrink)
{
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw ConfigError("mask shrink factor must lie in (0, 1], got " + std::to_string(shrink));
  }
  const PixelBounds & b = mask.bounds();
  const double du = b.u_max - b.u_min;
  const double dv = b.v_max - b.v_min;

  ShrunkMask out;
  out.source_id = mask.id();
  out.u_lo = b.u_min + 0.5 * (1.0 - shrink) * du;
  out.u_hi = b.u_min + 0.5 * (1.0 + shrink) * du;
  out.v_lo = b.v_min + 0.5 * (1.0 - shrink) * dv;
  out.v_hi = b.v_min + 0.5 * (1.0 + shrink) * dv;
  out.height = mask.height();
  out.width = mask.width();
  out.pixels.assign(mask.pixels().size(), 0);

  const int u0 = std::max(b.u_min, static_cast<int>(std::ceil(out.u_lo - kPixelTolerance)));
  const int u1 = std::min(b.u_max, static_cast<int>(std::floor(out.u_hi + kPixelTolerance)));
  const int v0 = std::max(b.v_min, static_cast<int>(std::ceil(out.v_lo - kPixelTolerance)));
  const int v1 = std::min(b.v_max, static_cast<int>(std::floor(out.v_hi + kPixelTolerance)));
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * out.width + u;
      if (mask.pixels()[idx] != 0) {
        out.pixels[idx] = 1;
        ++out.retained;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> decode_rle(std::span<const std::int64_t> counts, int height, int width)
{
  if (height <= 0 || width <= 0) {
    throw InputError("RLE decode needs a positive image size");
  }
  const std::size_t total = static_cast<std::size_t>(height) * width;
  std::vector<std::uint8_t> pixels(total, 0);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (std::int64_t run : counts) {
    if (run < 0) {
      throw InputError("RLE run length is negative");
    }
    if (pos + static_cast<std::size_t>(run) > total) {
      throw InputError("RLE runs exceed the image size");
    }
    if (value != 0) {
      for (std::size_t k = pos; k < pos + static_cast<std::size_t>(run); ++k) {
        // column-major index k -> (u = k / H, v = k % H)
        const std::size_t u = k / height;
        const std::size_t v = k % height;
        pixels[v * width + u] = 1;
      }
    }
    pos += static_cast<std::size_t>(run);
    value ^= 1;
  }
  if (pos != total) {
    throw InputError("RLE runs cover " + std::to_string(pos) + " of " + std::to_string(total) +
                     " pixels");
  }
  return pixels;
}

std::vector<std::int64_t> encode_rle(std::span<const std::uint8_t> pixels, int height, int width)
{
  const std::size_t total = static_cast<std::size_t>(height) * width;
  if (height <= 0 || width <= 0 || pixels.size() != total) {
    throw InputError("RLE encode needs an H x W pixel buffer");
  }
  std::vector<std::int64_t> counts;
  std::uint8_t value = 0;
  std::int64_t run = 0;
  for (int u = 0; u < width; ++u) {
    for (int v = 0; v < height; ++v) {
      const std::uint8_t p = pixels[static_cast<std::size_t>(v) * width + u] != 0 ? 1 : 0;
      if (p != value) {
        counts.push_back(run);
        run = 0;
        value = p;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

}  // namespace pseudobox
