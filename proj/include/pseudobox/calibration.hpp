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

#include <vector>

#include <Eigen/Core>

#include "pseudobox/geometry.hpp"

namespace pseudobox
{

using Matrix34 = Eigen::Matrix<double, 3, 4>;

/// Camera projection (P), rectification (R) and LiDAR-to-camera extrinsic (T)
/// in the KITTI convention. The image size is not part of the KITTI
/// calibration file; it is read from an optional `image_size:` line or taken
/// from the frame's mask document.
struct CalibrationSet
{
  Matrix34 projection = Matrix34::Zero();
  Eigen::Matrix3d rectification = Eigen::Matrix3d::Identity();
  Matrix34 lidar_to_camera = Matrix34::Zero();
  int image_height = 0;
  int image_width = 0;

  /// Throws InputError on non-finite entries or a singular rectification/extrinsic.
  void validate() const;

  /// LiDAR point to rectified camera coordinates: R * T * [p; 1].
  Point3 lidar_to_rect(const Point3 & p) const;
  /// Inverse of lidar_to_rect.
  Point3 rect_to_lidar(const Point3 & p) const;
  /// Rotates a direction (no translation) from LiDAR to rectified camera.
  Point3 lidar_direction_to_rect(const Point3 & d) const;
  Point3 rect_direction_to_lidar(const Point3 & d) const;
};

struct ProjectedPoint
{
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool valid = false;
};

/// Pinhole projection of a rectified-camera point. `valid` requires positive
/// depth and a pixel inside [0, W) x [0, H).
ProjectedPoint project_rect_point(const Point3 & rect, const CalibrationSet & calib);

std::vector<ProjectedPoint> project_points(const PointCloud & cloud, const CalibrationSet & calib);

}  // namespace pseudobox
