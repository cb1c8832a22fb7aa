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

#include <cstddef>
#include <span>
#include <vector>

#include "pseudobox/geometry.hpp"

namespace pseudobox
{

inline constexpr int kNoise = -1;

/// Density-based clustering with Euclidean distance in 3D.
///
/// A point is core when at least `min_pts` points (itself included) lie
/// within `eps`. Clusters are grown breadth-first from unvisited core points
/// taken in ascending input index, so labels are numbered 0, 1, ... in order
/// of each cluster's lowest-index core point. A border point reachable from
/// several clusters joins the first one whose expansion reaches it.
/// Returns one label per input point, kNoise for noise.
///
/// Neighbour queries use a uniform hash grid with cell size `eps`.
/// Throws ConfigError unless eps > 0 and min_pts >= 1.
std::vector<int> dbscan(std::span<const Point3> points, double eps, std::size_t min_pts);

}  // namespace pseudobox
