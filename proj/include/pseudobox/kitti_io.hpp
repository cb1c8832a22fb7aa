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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseudobox/calibration.hpp"
#include "pseudobox/eval.hpp"
#include "pseudobox/geometry.hpp"
#include "pseudobox/mask.hpp"
#include "pseudobox/scoring.hpp"

namespace pseudobox
{

/// Raw little-endian float32 quadruples (x, y, z, intensity), 16 bytes per point.
/// Throws MalformedFileError for a truncated file or non-finite values.
PointCloud read_point_cloud(const std::filesystem::path & path);
void write_point_cloud(const std::filesystem::path & path, const PointCloud & cloud);

/// KITTI object calibration: requires `P2:`, `R0_rect:` and `Tr_velo_to_cam:`;
/// other keys are ignored. An optional `image_size: H W` line sets the image size.
CalibrationSet read_calib(const std::filesystem::path & path);
CalibrationSet parse_calib(const std::string & text, const std::string & source = "<string>");
void write_calib(const std::filesystem::path & path, const CalibrationSet & calib);

/// One parsed KITTI label line, geometry converted back to the LiDAR frame.
struct KittiLabel
{
  LabeledBox labeled;
  double alpha = 0.0;
  std::array<double, 4> bbox{};  // left, top, right, bottom (pixels)
  bool has_score = false;
};

/// Formats one KITTI label line for a LiDAR-frame box. `projected` reports
/// whether any corner lies in front of the camera (false => 2D box is zeros).
std::string format_label_line(const std::string & class_name, const OrientedBox3D & box,
                              double score, const CalibrationSet & calib,
                              bool * projected = nullptr);

void write_labels(const std::filesystem::path & path, std::span<const ScoredProposal> labels,
                  const CalibrationSet & calib);
void write_labels(const std::filesystem::path & path, std::span<const LabeledBox> labels,
                  const CalibrationSet & calib);

/// Parses 15- or 16-column KITTI lines; `DontCare` lines are skipped.
/// Throws MalformedFileError with the offending line number.
std::vector<KittiLabel> read_labels(const std::filesystem::path & path,
                                    const CalibrationSet & calib);
std::vector<KittiLabel> parse_labels(const std::string & text, const CalibrationSet & calib,
                                     const std::string & source = "<string>");

/// Per-frame mask document: {"image_size": [H, W], "instances": [{id, class, rle}]}.
struct MaskDocument
{
  int height = 0;
  int width = 0;
  std::vector<InstanceMask> instances;
};

MaskDocument read_masks(const std::filesystem::path & path);
MaskDocument parse_masks(const std::string & text, const std::string & source = "<string>");
void write_masks(const std::filesystem::path & path, const MaskDocument & doc);
std::string format_masks(const MaskDocument & doc);

/// Everything the pipeline needs for one frame.
struct FrameBundle
{
  std::string frame_id;
  PointCloud cloud;
  CalibrationSet calib;
  std::vector<InstanceMask> masks;
  std::optional<std::vector<LabeledBox>> ground_truth;
};

/// root/{velodyne,calib,masks,label_2}/<frame>.{bin,txt,json,txt}
struct DatasetLayout
{
  std::filesystem::path root;

  std::filesystem::path velodyne(const std::string & frame) const;
  std::filesystem::path calib(const std::string & frame) const;
  std::filesystem::path masks(const std::string & frame) const;
  std::filesystem::path labels(const std::string & frame) const;

  /// Frame ids with a point cloud file, sorted.
  std::vector<std::string> frames() const;

  /// Reads cloud, calibration, masks and (if present) ground truth. The
  /// calibration image size is taken from the mask document when absent;
  /// a mismatch raises InputError.
  FrameBundle load(const std::string & frame) const;

  /// Writes every part of the bundle; ground truth only when present.
  void store(const FrameBundle & bundle) const;
};

std::string format_frame_id(std::size_t index);

}  // namespace pseudobox
