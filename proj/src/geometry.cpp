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

#include "pseudobox/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

void PointCloud::validate() const
{
  if (!intensity.empty() && intensity.size() != points.size()) {
    throw InputError("point cloud intensity channel has " + std::to_string(intensity.size()) +
                     " entries for " + std::to_string(points.size()) + " points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw InputError("point " + std::to_string(i) + " has non-finite coordinates");
    }
  }
}

double canonical_yaw(double yaw)
{
  constexpr double pi = std::numbers::pi;
  double y = yaw - pi * std::floor((yaw + 0.5 * pi) / pi);
  // floor() can leave y a rounding step outside the half-open range
  if (y >= 0.5 * pi) {
    y -= pi;
  }
  if (y < -0.5 * pi) {
    y += pi;
  }
  return y;
}

double wrap_angle(double angle)
{
  constexpr double pi = std::numbers::pi;
  double a = angle - 2.0 * pi * std::floor((angle + pi) / (2.0 * pi));
  if (a >= pi) {
    a -= 2.0 * pi;
  }
  return a;
}

OrientedBox3D::OrientedBox3D(const Point3 & center, double length, double width, double height,
                             double yaw)
: center_(center), length_(length), width_(width), height_(height), yaw_(0.0)
{
  if (!center.allFinite() || !std::isfinite(yaw)) {
    throw std::invalid_argument("box center and yaw must be finite");
  }
  if (!(length > 0.0) || !(width > 0.0) || !(height > 0.0) || !std::isfinite(length) ||
      !std::isfinite(width) || !std::isfinite(height)) {
    std::ostringstream os;
    os << "box extents must be positive and finite, got (" << length << ", " << width << ", "
       << height << ")";
    throw std::invalid_argument(os.str());
  }
  yaw_ = canonical_yaw(yaw);
}

OrientedBox3D OrientedBox3D::scaled(double length_factor, double width_factor,
                                    double height_factor) const
{
  return OrientedBox3D(center_, length_ * length_factor, width_ * width_factor,
                       height_ * height_factor, yaw_);
}

std::array<Point3, 8> box_corners(const OrientedBox3D & box)
{
  static constexpr std::array<std::array<double, 3>, 8> signs{{
    {+1, +1, -1}, {-1, +1, -1}, {-1, -1, -1}, {+1, -1, -1},
    {+1, +1, +1}, {-1, +1, +1}, {-1, -1, +1}, {+1, -1, +1},
  }};
  std::array<Point3, 8> corners;
  for (std::size_t i = 0; i < 8; ++i) {
    const Point3 local(signs[i][0] * 0.5 * box.length(), signs[i][1] * 0.5 * box.width(),
                       signs[i][2] * 0.5 * box.height());
    corners[i] = from_box_frame(local, box);
  }
  return corners;
}

std::array<Point2, 4> box_footprint(const OrientedBox3D & box)
{
  const auto corners = box_corners(box);
  return {corners[0].head<2>(), corners[1].head<2>(), corners[2].head<2>(), corners[3].head<2>()};
}

Point3 to_box_frame(const Point3 & p, const OrientedBox3D & box)
{
  const double c = std::cos(box.yaw());
  const double s = std::sin(box.yaw());
  const Point3 d = p - box.center();
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z()};
}

Point3 from_box_frame(const Point3 & local, const OrientedBox3D & box)
{
  const double c = std::cos(box.yaw());
  const double s = std::sin(box.yaw());
  return box.center() +
         Point3(c * local.x() - s * local.y(), s * local.x() + c * local.y(), local.z());
}

bool point_in_box(const Point3 & p, const OrientedBox3D & box, double slack)
{
  const Point3 q = to_box_frame(p, box);
  return std::abs(q.x()) <= 0.5 * box.length() + slack &&
         std::abs(q.y()) <= 0.5 * box.width() + slack &&
         std::abs(q.z()) <= 0.5 * box.height() + slack;
}

std::vector<std::size_t> points_in_box(const PointCloud & cloud, const OrientedBox3D & box,
                                       double slack)
{
  // Cheap circumscribed-sphere rejection before the exact test.
  const double radius =
    0.5 * std::sqrt(box.length() * box.length() + box.width() * box.width() +
                    box.height() * box.height()) +
    std::abs(slack) * 2.0;
  const double radius_sq = radius * radius;
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3 & p = cloud.points[i];
    if ((p - box.center()).squaredNorm() > radius_sq) {
      continue;
    }
    if (point_in_box(p, box, slack)) {
      inside.push_back(i);
    }
  }
  return inside;
}

MetaShape MetaShape::from_extents(std::string class_name, double length, double width,
                                  double height)
{
  for (double v : {length, width, height}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("meta shape for '" + class_name + "' needs positive finite extents");
    }
  }
  const double total = length + width + height;
  MetaShape m;
  m.class_name = std::move(class_name);
  m.length = length / total;
  m.width = width / total;
  m.height = height / total;
  m.raw_length = length;
  m.raw_width = width;
  m.raw_height = height;
  return m;
}

}  // namespace pseudobox
