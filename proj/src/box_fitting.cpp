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

#include "pseudobox/box_fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

void FitParams::validate() const
{
  if (!(yaw_step_deg > 0.0 && yaw_step_deg <= 90.0)) {
    throw ConfigError("fit yaw step must lie in (0, 90] degrees");
  }
  if (!(min_edge_distance > 0.0)) {
    throw ConfigError("fit min edge distance must be positive");
  }
  if (!(min_extent > 0.0)) {
    throw ConfigError("fit min extent must be positive");
  }
}

namespace
{

struct Extents
{
  double min1 = std::numeric_limits<double>::infinity();
  double max1 = -std::numeric_limits<double>::infinity();
  double min2 = std::numeric_limits<double>::infinity();
  double max2 = -std::numeric_limits<double>::infinity();
};

Extents project_extents(std::span<const Point3> points, double c, double s)
{
  Extents e;
  for (const Point3 & p : points) {
    const double c1 = p.x() * c + p.y() * s;
    const double c2 = -p.x() * s + p.y() * c;
    e.min1 = std::min(e.min1, c1);
    e.max1 = std::max(e.max1, c1);
    e.min2 = std::min(e.min2, c2);
    e.max2 = std::max(e.max2, c2);
  }
  return e;
}

}  // namespace

double closeness_criterion(std::span<const Point3> points, double yaw, double min_edge_distance)
{
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const Extents e = project_extents(points, c, s);
  double q = 0.0;
  for (const Point3 & p : points) {
    const double c1 = p.x() * c + p.y() * s;
    const double c2 = -p.x() * s + p.y() * c;
    const double d1 = std::min(e.max1 - c1, c1 - e.min1);
    const double d2 = std::min(e.max2 - c2, c2 - e.min2);
    q += 1.0 / std::max(std::min(d1, d2), min_edge_distance);
  }
  return q;
}

OrientedBox3D fit_box(std::span<const Point3> points, const FitParams & params)
{
  params.validate();
  if (points.size() < 3) {
    throw DegenerateClusterError("box fit needs at least 3 points, got " +
                                 std::to_string(points.size()));
  }

  const double step = params.yaw_step_deg * std::numbers::pi / 180.0;
  const int steps = static_cast<int>(std::ceil(90.0 / params.yaw_step_deg - 1e-9));
  double best_yaw = 0.0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    const double yaw = k * step;
    const double q = closeness_criterion(points, yaw, params.min_edge_distance);
    if (q > best_q) {
      best_q = q;
      best_yaw = yaw;
    }
  }

  const double c = std::cos(best_yaw);
  const double s = std::sin(best_yaw);
  const Extents e = project_extents(points, c, s);
  double ext1 = e.max1 - e.min1;
  double ext2 = e.max2 - e.min2;
  if (ext1 < params.min_extent && ext2 < params.min_extent) {
    throw DegenerateClusterError("cluster footprint is degenerate");
  }
  double z_min = std::numeric_limits<double>::infinity();
  double z_max = -std::numeric_limits<double>::infinity();
  for (const Point3 & p : points) {
    z_min = std::min(z_min, p.z());
    z_max = std::max(z_max, p.z());
  }

  const double m1 = 0.5 * (e.min1 + e.max1);
  const double m2 = 0.5 * (e.min2 + e.max2);
  const Point3 center(m1 * c - m2 * s, m1 * s + m2 * c, 0.5 * (z_min + z_max));
  ext1 = std::max(ext1, params.min_extent);
  ext2 = std::max(ext2, params.min_extent);
  const double height = std::max(z_max - z_min, params.min_extent);

  if (ext2 > ext1) {
    return OrientedBox3D(center, ext2, ext1, height, best_yaw + 0.5 * std::numbers::pi);
  }
  return OrientedBox3D(center, ext1, ext2, height, best_yaw);
}

}  // namespace pseudobox
