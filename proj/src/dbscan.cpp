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

#include "pseudobox/dbscan.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

namespace
{

struct CellKey
{
  std::int64_t x, y, z;
  bool operator==(const CellKey &) const = default;
};

struct CellKeyHash
{
  std::size_t operator()(const CellKey & k) const noexcept
  {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::uint64_t>(k.z) * 83492791ULL;
    return static_cast<std::size_t>(h);
  }
};

class HashGrid
{
public:
  HashGrid(std::span<const Point3> points, double cell) : points_(points), cell_(cell)
  {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key(points[i])].push_back(i);
    }
  }

  /// Neighbours within `radius` (inclusive), in a fixed deterministic order.
  void query(std::size_t i, double radius, std::vector<std::size_t> & out) const
  {
    out.clear();
    const Point3 & p = points_[i];
    const CellKey c = key(p);
    const double r2 = radius * radius;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
          if (it == cells_.end()) {
            continue;
          }
          for (std::size_t j : it->second) {
            if ((points_[j] - p).squaredNorm() <= r2) {
              out.push_back(j);
            }
          }
        }
      }
    }
  }

private:
  CellKey key(const Point3 & p) const
  {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  std::span<const Point3> points_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells_;
};

constexpr int kUnvisited = -2;

}  // namespace

std::vector<int> dbscan(std::span<const Point3> points, double eps, std::size_t min_pts)
{
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ConfigError("dbscan eps must be positive and finite");
  }
  if (min_pts < 1) {
    throw ConfigError("dbscan min_pts must be at least 1");
  }

  const std::size_t n = points.size();
  std::vector<int> labels(n, kUnvisited);
  if (n == 0) {
    return labels;
  }
  const HashGrid grid(points, eps);

  std::vector<std::size_t> neighbors;
  std::vector<std::size_t> inner;
  std::deque<std::size_t> frontier;
  int next_label = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) {
      continue;
    }
    grid.query(i, eps, neighbors);
    if (neighbors.size() < min_pts) {
      // may still be claimed later as a border point
      labels[i] = kNoise;
      continue;
    }
    const int label = next_label++;
    labels[i] = label;
    frontier.assign(neighbors.begin(), neighbors.end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.front();
      frontier.pop_front();
      if (labels[j] == kNoise) {
        labels[j] = label;  // border point
        continue;
      }
      if (labels[j] != kUnvisited) {
        continue;
      }
      labels[j] = label;
      grid.query(j, eps, inner);
      if (inner.size() >= min_pts) {
        for (std::size_t q : inner) {
          if (labels[q] == kUnvisited || labels[q] == kNoise) {
            frontier.push_back(q);
          }
        }
      }
    }
  }
  return labels;
}

}  // namespace pseudobox
