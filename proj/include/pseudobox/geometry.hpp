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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pseudobox
{

using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;

/// LiDAR returns in the sensor frame: x forward, y left, z up (meters).
/// `intensity` is either empty or has one entry per point.
struct PointCloud
{
  std::vector<Point3> points;
  std::vector<float> intensity;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  /// Throws InputError on non-finite coordinates or a mismatched intensity channel.
  void validate() const;
};

/// Oriented box in the LiDAR frame. `length` runs along the heading
/// (cos yaw, sin yaw, 0), `width` along the left normal, `height` along +z.
/// Yaw is counterclockwise from +x and kept in [-pi/2, pi/2).
class OrientedBox3D
{
public:
  /// Throws std::invalid_argument unless all extents are positive and every value is finite.
  OrientedBox3D(const Point3 & center, double length, double width, double height, double yaw);

  const Point3 & center() const noexcept { return center_; }
  double length() const noexcept { return length_; }
  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  double yaw() const noexcept { return yaw_; }

  double volume() const noexcept { return length_ * width_ * height_; }
  double bev_area() const noexcept { return length_ * width_; }
  double z_min() const noexcept { return center_.z() - 0.5 * height_; }
  double z_max() const noexcept { return center_.z() + 0.5 * height_; }

  /// Same box with every extent multiplied by the given factors, center and yaw kept.
  OrientedBox3D scaled(double length_factor, double width_factor, double height_factor) const;

  bool operator==(const OrientedBox3D & other) const = default;

private:
  Point3 center_;
  double length_;
  double width_;
  double height_;
  double yaw_;
};

/// Maps any angle onto [-pi/2, pi/2) by multiples of pi. A rectangle is
/// symmetric under a half turn, so the box keeps the same point set.
double canonical_yaw(double yaw);

/// Wraps an angle onto [-pi, pi).
double wrap_angle(double angle);

/// Corner order: bottom face first (z = -h/2), then top face, each face in
/// counterclockwise order starting at (+l/2, +w/2):
///   0 (+,+,-) 1 (-,+,-) 2 (-,-,-) 3 (+,-,-)
///   4 (+,+,+) 5 (-,+,+) 6 (-,-,+) 7 (+,-,+)
std::array<Point3, 8> box_corners(const OrientedBox3D & box);

/// Footprint polygon (counterclockwise) in the horizontal plane.
std::array<Point2, 4> box_footprint(const OrientedBox3D & box);

Point3 to_box_frame(const Point3 & p, const OrientedBox3D & box);
Point3 from_box_frame(const Point3 & local, const OrientedBox3D & box);

/// Boundary inclusive. `slack` widens every half-extent by that many meters.
bool point_in_box(const Point3 & p, const OrientedBox3D & box, double slack = 0.0);

/// Indices of cloud points inside the box, ascending.
std::vector<std::size_t> points_in_box(const PointCloud & cloud, const OrientedBox3D & box,
                                       double slack = 0.0);

/// Class template of normalized (l, w, h) proportions.
struct MetaShape
{
  std::string class_name;
  double length = 0.0;  // normalized, the three sum to 1
  double width = 0.0;
  double height = 0.0;
  double raw_length = 0.0;  // meters, for reference
  double raw_width = 0.0;
  double raw_height = 0.0;

  /// Throws ConfigError unless all extents are positive and finite.
  static MetaShape from_extents(std::string class_name, double length, double width,
                                double height);
};

}  // namespace pseudobox
