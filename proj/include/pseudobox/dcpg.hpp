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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pseudobox/box_fitting.hpp"
#include "pseudobox/geometry.hpp"
#include "pseudobox/seeds.hpp"

namespace pseudobox
{

struct DcpgParams
{
  double r_init = 1.0;          // meters
  double delta = 0.1;           // meters, keeps the smallest radius away from zero
  std::size_t min_pts = 3;
  double neighborhood_radius = 8.0;  // meters around the seed centroid
  std::size_t max_radii = 16;        // cap on radii evaluated per instance
  double min_seed_containment = 0.5;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
};

/// One box candidate produced by clustering around an instance's seeds.
struct Proposal
{
  OrientedBox3D box;
  int instance_id = 0;
  std::string class_name;
  double radius = 0.0;  // clustering radius that produced this box
  std::size_t radius_index = 0;  // t in 1..N
  std::vector<std::size_t> cluster;  // indices into the frame cloud, ascending
};

/// r = r_init * t / n + delta, for t in 1..n. Throws std::out_of_range otherwise.
double radius_schedule(std::size_t t, std::size_t n, double r_init, double delta);

/// The radius indices actually evaluated: all of 1..n when n <= cap, otherwise
/// `cap` indices spread uniformly over 1..n with both endpoints included.
std::vector<std::size_t> scheduled_indices(std::size_t n, std::size_t cap);

/// Points within `radius` (inclusive) of the seed centroid, plus the seeds.
/// Ascending indices. Throws std::invalid_argument for an empty seed set.
std::vector<std::size_t> neighborhood(const PointCloud & cloud, const SeedPointSet & seeds,
                                      double radius);

/// Cluster holding the most seeds; ties go to the larger cluster, then to the
/// lower label. `seed_positions` index into `labels`. nullopt if every seed is noise.
std::optional<int> select_cluster(std::span<const int> labels,
                                  std::span<const std::size_t> seed_positions);

/// Runs the multi-radius clustering and box fitting for every seed set.
/// Proposals are ordered by instance, then by radius index; exact duplicates
/// (all box parameters within 1e-6) are dropped.
std::vector<Proposal> generate_proposals(const PointCloud & cloud,
                                         std::span<const SeedPointSet> seed_sets,
                                         const DcpgParams & params,
                                         const FitParams & fit = {});

}  // namespace pseudobox
