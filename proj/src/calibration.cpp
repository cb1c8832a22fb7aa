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

#include "pseudobox/calibration.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

void CalibrationSet::validate() const
{
  if (!projection.allFinite() || !rectification.allFinite() || !lidar_to_camera.allFinite()) {
    throw InputError("calibration contains non-finite entries");
  }
  if (std::abs(rectification.determinant()) < 1e-12 ||
      std::abs(lidar_to_camera.leftCols<3>().determinant()) < 1e-12) {
    throw InputError("calibration rotation part is singular");
  }
  if (image_height < 0 || image_width < 0) {
    throw InputError("calibration image size is negative");
  }
}

Point3 CalibrationSet::lidar_to_rect(const Point3 & p) const
{
  return rectification * (lidar_to_camera * p.homogeneous());
}

Point3 CalibrationSet::rect_to_lidar(const Point3 & p) const
{
  const Point3 cam = rectification.inverse() * p;
  const Eigen::Matrix3d rot = lidar_to_camera.leftCols<3>();
  return rot.inverse() * (cam - lidar_to_camera.col(3));
}

Point3 CalibrationSet::lidar_direction_to_rect(const Point3 & d) const
{
  return rectification * (lidar_to_camera.leftCols<3>() * d);
}

Point3 CalibrationSet::rect_direction_to_lidar(const Point3 & d) const
{
  const Eigen::Matrix3d rot = lidar_to_camera.leftCols<3>();
  return rot.inverse() * (rectification.inverse() * d);
}

ProjectedPoint project_rect_point(const Point3 & rect, const CalibrationSet & calib)
{
  ProjectedPoint out;
  out.depth = rect.z();
  const Eigen::Vector3d h = calib.projection * rect.homogeneous();
  if (!(rect.z() > 0.0) || !(h.z() > 0.0)) {
    return out;
  }
  out.u = h.x() / h.z();
  out.v = h.y() / h.z();
  out.valid = out.u >= 0.0 && out.v >= 0.0 && out.u < calib.image_width &&
              out.v < calib.image_height;
  return out;
}

std::vector<ProjectedPoint> project_points(const PointCloud & cloud, const CalibrationSet & calib)
{
  std::vector<ProjectedPoint> out;
  out.reserve(cloud.size());
  for (const Point3 & p : cloud.points) {
    out.push_back(project_rect_point(calib.lidar_to_rect(p), calib));
  }
  return out;
}

}  // namespace pseudobox
