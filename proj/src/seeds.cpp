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

#include "pseudobox/seeds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

std::vector<SeedPointSet> extract_seed_points(const PointCloud & cloud,
                                              std::span<const InstanceMask> masks,
                                              const CalibrationSet & calib, double shrink)
{
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw ConfigError("mask shrink factor must lie in (0, 1], got " + std::to_string(shrink));
  }
  if (masks.empty()) {
    return {};
  }
  for (const InstanceMask & m : masks) {
    if (m.height() != calib.image_height || m.width() != calib.image_width) {
      throw InputError("mask " + std::to_string(m.id()) + " is " + std::to_string(m.height()) +
                       "x" + std::to_string(m.width()) + " but calibration image is " +
                       std::to_string(calib.image_height) + "x" +
                       std::to_string(calib.image_width));
    }
  }

  // Process in instance-id order so that output order and tie-breaks agree.
  std::vector<std::size_t> order(masks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return masks[a].id() < masks[b].id(); });

  std::vector<ShrunkMask> shrunk;
  shrunk.reserve(masks.size());
  for (std::size_t k : order) {
    shrunk.push_back(shrink_mask(masks[k], shrink));
  }

  std::vector<SeedPointSet> sets(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    sets[s].instance_id = masks[order[s]].id();
    sets[s].class_name = masks[order[s]].class_name();
  }

  const std::vector<ProjectedPoint> proj = project_points(cloud, calib);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (!proj[i].valid) {
      continue;
    }
    const int u = static_cast<int>(std::floor(proj[i].u));
    const int v = static_cast<int>(std::floor(proj[i].v));
    std::size_t best = shrunk.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < shrunk.size(); ++s) {
      if (shrunk[s].empty() || !shrunk[s].at(u, v)) {
        continue;
      }
      const double du = proj[i].u - shrunk[s].center_u();
      const double dv = proj[i].v - shrunk[s].center_v();
      const double d = du * du + dv * dv;
      // strict '<' keeps the lower instance id on exact ties
      if (d < best_dist) {
        best_dist = d;
        best = s;
      }
    }
    if (best < shrunk.size()) {
      sets[best].indices.push_back(i);
    }
  }

  std::erase_if(sets, [](const SeedPointSet & s) { return s.indices.empty(); });
  return sets;
}

}  // namespace pseudobox
