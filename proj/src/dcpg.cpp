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

#include "pseudobox/dcpg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pseudobox/dbscan.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/log.hpp"

namespace pseudobox
{

void DcpgParams::validate() const
{
  if (!(r_init > 0.0)) {
    throw ConfigError("r_init must be positive");
  }
  if (!(delta > 0.0)) {
    throw ConfigError("delta must be positive");
  }
  if (min_pts < 1) {
    throw ConfigError("min_pts must be at least 1");
  }
  if (!(neighborhood_radius > 0.0)) {
    throw ConfigError("neighborhood radius must be positive");
  }
  if (max_radii < 1) {
    throw ConfigError("max_radii must be at least 1");
  }
  if (!(min_seed_containment > 0.0 && min_seed_containment <= 1.0)) {
    throw ConfigError("min_seed_containment must lie in (0, 1]");
  }
}

double radius_schedule(std::size_t t, std::size_t n, double r_init, double delta)
{
  if (n == 0 || t < 1 || t > n) {
    throw std::out_of_range("radius index " + std::to_string(t) + " outside 1.." +
                            std::to_string(n));
  }
  return r_init * static_cast<double>(t) / static_cast<double>(n) + delta;
}

std::vector<std::size_t> scheduled_indices(std::size_t n, std::size_t cap)
{
  std::vector<std::size_t> out;
  if (n == 0) {
    return out;
  }
  if (cap == 0 || n <= cap) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{1});
    return out;
  }
  if (cap == 1) {
    return {n};
  }
  for (std::size_t j = 0; j < cap; ++j) {
    const double t = 1.0 + static_cast<double>(j) * static_cast<double>(n - 1) /
                             static_cast<double>(cap - 1);
    const auto idx = static_cast<std::size_t>(std::llround(t));
    if (out.empty() || out.back() != idx) {
      out.push_back(idx);
    }
  }
  return out;
}

namespace
{

Point3 seed_centroid(const PointCloud & cloud, const SeedPointSet & seeds)
{
  Point3 c = Point3::Zero();
  for (std::size_t i : seeds.indices) {
    c += cloud.points.at(i);
  }
  return c / static_cast<double>(seeds.indices.size());
}

bool near_equal(const OrientedBox3D & a, const OrientedBox3D & b)
{
  constexpr double tol = 1e-6;
  return (a.center() - b.center()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(a.length() - b.length()) <= tol && std::abs(a.width() - b.width()) <= tol &&
         std::abs(a.height() - b.height()) <= tol && std::abs(a.yaw() - b.yaw()) <= tol;
}

}  // namespace

std::vector<std::size_t> neighborhood(const PointCloud & cloud, const SeedPointSet & seeds,
                                      double radius)
{
  if (seeds.indices.empty()) {
    throw std::invalid_argument("neighborhood needs at least one seed point");
  }
  const Point3 centroid = seed_centroid(cloud, seeds);
  const double r2 = radius * radius;
  std::vector<std::uint8_t> keep(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if ((cloud.points[i] - centroid).squaredNorm() <= r2) {
      keep[i] = 1;
    }
  }
  for (std::size_t i : seeds.indices) {
    keep[i] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] != 0) {
      out.push_back(i);
    }
  }
  return out;
}

std::optional<int> select_cluster(std::span<const int> labels,
                                  std::span<const std::size_t> seed_positions)
{
  std::map<int, std::size_t> seed_votes;
  for (std::size_t pos : seed_positions) {
    const int label = labels[pos];
    if (label != kNoise) {
      ++seed_votes[label];
    }
  }
  if (seed_votes.empty()) {
    return std::nullopt;
  }
  std::map<int, std::size_t> sizes;
  for (int label : labels) {
    if (seed_votes.contains(label)) {
      ++sizes[label];
    }
  }
  // std::map iterates labels ascending, so strict comparisons keep the lower label.
  int best = seed_votes.begin()->first;
  for (const auto & [label, votes] : seed_votes) {
    const std::size_t best_votes = seed_votes[best];
    if (votes > best_votes || (votes == best_votes && sizes[label] > sizes[best])) {
      best = label;
    }
  }
  return best;
}

std::vector<Proposal> generate_proposals(const PointCloud & cloud,
                                         std::span<const SeedPointSet> seed_sets,
                                         const DcpgParams & params, const FitParams & fit)
{
  params.validate();
  fit.validate();
  std::vector<Proposal> out;

  for (const SeedPointSet & seeds : seed_sets) {
    if (seeds.indices.empty()) {
      continue;
    }
    const std::vector<std::size_t> local_to_global =
      neighborhood(cloud, seeds, params.neighborhood_radius);
    std::vector<Point3> local;
    local.reserve(local_to_global.size());
    for (std::size_t g : local_to_global) {
      local.push_back(cloud.points[g]);
    }

    // Seeds ordered by distance to their centroid, index as tiebreak.
    const Point3 centroid = seed_centroid(cloud, seeds);
    std::vector<std::size_t> ordered = seeds.indices;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
      const double da = (cloud.points[a] - centroid).squaredNorm();
      const double db = (cloud.points[b] - centroid).squaredNorm();
      return da != db ? da < db : a < b;
    });
    std::vector<std::size_t> seed_positions;
    seed_positions.reserve(ordered.size());
    for (std::size_t g : ordered) {
      const auto it = std::lower_bound(local_to_global.begin(), local_to_global.end(), g);
      seed_positions.push_back(static_cast<std::size_t>(it - local_to_global.begin()));
    }

    const std::size_t n = seeds.indices.size();
    const std::size_t needed = static_cast<std::size_t>(
      std::ceil(params.min_seed_containment * static_cast<double>(n) - 1e-9));

    for (std::size_t t : scheduled_indices(n, params.max_radii)) {
      const double eps = radius_schedule(t, n, params.r_init, params.delta);
      const std::vector<int> labels = dbscan(local, eps, params.min_pts);
      const std::optional<int> chosen = select_cluster(labels, seed_positions);
      if (!chosen) {
        continue;
      }
      std::vector<Point3> cluster_points;
      std::vector<std::size_t> cluster;
      for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] == *chosen) {
          cluster_points.push_back(local[j]);
          cluster.push_back(local_to_global[j]);
        }
      }
      std::optional<OrientedBox3D> box;
      try {
        box = fit_box(cluster_points, fit);
      } catch (const DegenerateClusterError & e) {
        logger()->debug("instance {} radius {:.3f}: skipped cluster ({})", seeds.instance_id,
                        eps, e.what());
        continue;
      }
      std::size_t contained = 0;
      for (std::size_t g : seeds.indices) {
        if (point_in_box(cloud.points[g], *box, 1e-6)) {
          ++contained;
        }
      }
      if (contained < needed) {
        continue;
      }
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Proposal & p) {
        return near_equal(p.box, *box);
      });
      if (duplicate) {
        continue;
      }
      out.push_back(Proposal{*box, seeds.instance_id, seeds.class_name, eps, t,
                             std::move(cluster)});
    }
  }
  return out;
}

}  // namespace pseudobox
