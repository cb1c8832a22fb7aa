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

#include <span>

#include "pseudobox/geometry.hpp"

namespace pseudobox
{

struct FitParams
{
  double yaw_step_deg = 1.0;
  /// Lower clamp on per-point edge distance in the closeness criterion (m).
  double min_edge_distance = 0.01;
  /// Extents below this are treated as zero; also the floor applied to l, w, h.
  double min_extent = 1e-3;

  void validate() const;
};

/// Closeness score of one candidate heading: sum over points of the inverse
/// distance to the nearer rectangle edge, with both axes considered.
double closeness_criterion(std::span<const Point3> points, double yaw, double min_edge_distance);

/// Search-based L-shape rectangle fit. Yaw is scanned over [0, 90) degrees,
/// the footprint is the min/max extent in the best frame, the height is the
/// z range. Every input point lies inside the returned box. The longer
/// footprint side is reported as the length.
/// Throws DegenerateClusterError for fewer than 3 points or a footprint whose
/// extent is below `min_extent` on both horizontal axes.
OrientedBox3D fit_box(std::span<const Point3> points, const FitParams & params = {});

}  // namespace pseudobox
