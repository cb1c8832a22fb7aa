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
#include <vector>

#include "pseudobox/geometry.hpp"

namespace pseudobox
{

using Polygon2 = std::vector<Point2>;

/// Shoelace area; positive for counterclockwise vertex order.
double signed_area(std::span<const Point2> polygon);

/// Sutherland-Hodgman: clips `subject` against every edge of the convex,
/// counterclockwise `clip` polygon. Returns an empty polygon when disjoint.
Polygon2 clip_convex(std::span<const Point2> subject, std::span<const Point2> clip);

/// Area of the overlap of two box footprints.
double bev_intersection_area(const OrientedBox3D & a, const OrientedBox3D & b);

}  // namespace pseudobox
