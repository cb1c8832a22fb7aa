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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pseudobox
{

struct PixelBounds
{
  int u_min = 0;
  int u_max = 0;
  int v_min = 0;
  int v_max = 0;
};

/// Binary foreground mask of one image instance. Pixels are stored row-major,
/// `pixels[v * width + u]`, with u the column and v the row.
class InstanceMask
{
public:
  /// Throws InputError on a size mismatch, nonpositive dimensions or an empty mask.
  InstanceMask(int id, std::string class_name, int height, int width,
               std::vector<std::uint8_t> pixels);

  /// Filled axis-aligned rectangle, inclusive bounds clipped to the image.
  static InstanceMask rectangle(int id, std::string class_name, int height, int width,
                                const PixelBounds & bounds);

  int id() const noexcept { return id_; }
  const std::string & class_name() const noexcept { return class_name_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  const PixelBounds & bounds() const noexcept { return bounds_; }
  const std::vector<std::uint8_t> & pixels() const noexcept { return pixels_; }

  bool at(int u, int v) const noexcept
  {
    return u >= 0 && v >= 0 && u < width_ && v < height_ &&
           pixels_[static_cast<std::size_t>(v) * width_ + u] != 0;
  }

  std::size_t pixel_count() const noexcept;

private:
  int id_;
  std::string class_name_;
  int height_;
  int width_;
  std::vector<std::uint8_t> pixels_;
  PixelBounds bounds_;
};

/// Central retained rectangle of a mask intersected with the mask itself.
/// The rectangle bounds are continuous pixel coordinates, inclusive.
struct ShrunkMask
{
  int source_id = 0;
  double u_lo = 0.0;
  double u_hi = 0.0;
  double v_lo = 0.0;
  double v_hi = 0.0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major, same layout as InstanceMask
  std::size_t retained = 0;

  bool empty() const noexcept { return retained == 0; }
  double center_u() const noexcept { return 0.5 * (u_lo + u_hi); }
  double center_v() const noexcept { return 0.5 * (v_lo + v_hi); }

  bool at(int u, int v) const noexcept
  {
    return u >= 0 && v >= 0 && u < width && v < height &&
           pixels[static_cast<std::size_t>(v) * width + u] != 0;
  }
};

/// Keeps u in [u_min + (1-g)/2 * du, u_min + (1+g)/2 * du], likewise for v,
/// and drops every mask pixel outside that rectangle.
/// Throws ConfigError unless 0 < shrink <= 1.
ShrunkMask shrink_mask(const InstanceMask & mask, double shrink);

/// COCO uncompressed RLE: column-major run lengths, starting with a run of zeros.
std::vector<std::uint8_t> decode_rle(std::span<const std::int64_t> counts, int height, int width);
std::vector<std::int64_t> encode_rle(std::span<const std::uint8_t> pixels, int height, int width);

}  // namespace pseudobox
