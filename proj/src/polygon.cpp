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

#include "pseudobox/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace pseudobox
{

namespace
{

double cross(const Point2 & a, const Point2 & b, const Point2 & p)
{
  return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

Point2 intersect(const Point2 & p, const Point2 & q, const Point2 & a, const Point2 & b)
{
  const double dp = cross(a, b, p);
  const double dq = cross(a, b, q);
  const double t = dp / (dp - dq);
  return p + t * (q - p);
}

}  // namespace

double signed_area(std::span<const Point2> polygon)
{
  const std::size_t n = polygon.size();
  if (n < 3) {
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 & a = polygon[i];
    const Point2 & b = polygon[(i + 1) % n];
    acc += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * acc;
}

Polygon2 clip_convex(std::span<const Point2> subject, std::span<const Point2> clip)
{
  Polygon2 output(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !output.empty(); ++e) {
    const Point2 & a = clip[e];
    const Point2 & b = clip[(e + 1) % m];
    Polygon2 input;
    input.swap(output);
    const std::size_t n = input.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 & cur = input[i];
      const Point2 & prev = input[(i + n - 1) % n];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) {
          output.push_back(intersect(prev, cur, a, b));
        }
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(intersect(prev, cur, a, b));
      }
    }
  }
  if (output.size() < 3) {
    output.clear();
  }
  return output;
}

double bev_intersection_area(const OrientedBox3D & a, const OrientedBox3D & b)
{
  // Quick reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length(), a.width());
  const double rb = 0.5 * std::hypot(b.length(), b.width());
  if ((a.center().head<2>() - b.center().head<2>()).norm() > ra + rb) {
    return 0.0;
  }
  const auto fa = box_footprint(a);
  const auto fb = box_footprint(b);
  const Polygon2 overlap = clip_convex(fa, fb);
  return std::max(0.0, signed_area(overlap));
}

}  // namespace pseudobox
