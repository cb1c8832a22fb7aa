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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pseudobox/dcpg.hpp"
#include "pseudobox/geometry.hpp"

namespace pseudobox
{

struct ScoreParams
{
  double mu = 0.8;     // mean of the boundary-distance prior
  double sigma = 0.2;  // its standard deviation
  double lambda1 = 0.5;  // weight of the distribution score
  double lambda2 = 0.5;  // weight of the meta-shape score
  double nms_iou = 0.1;  // BEV IoU above which lower-scored boxes are dropped
  bool boundary_uses_height = false;

  void validate() const;
};

using MetaShapeTable = std::map<std::string, MetaShape>;

/// Car / Pedestrian / Cyclist templates from typical KITTI object sizes.
MetaShapeTable default_meta_shapes();

struct ScoredProposal
{
  Proposal proposal;
  double distribution = 0.0;  // raw s_dc
  double meta_shape = 0.0;    // raw s_msc
  double distribution_norm = 0.0;
  double meta_shape_norm = 0.0;
  double ds = 0.0;
};

/// Normalized distance from the box's vertical axis: max(|x'|/(l/2), |y'|/(w/2)),
/// optionally also |z'|/(h/2). 0 on the axis, 1 on the lateral faces.
/// Throws std::domain_error for a point outside the box.
double boundary_distance(const Point3 & p, const OrientedBox3D & box,
                         bool use_height = false);

/// Log-density of N(mu, sigma) at x.
double gaussian_log_density(double x, double mu, double sigma);

/// Mean Gaussian log-likelihood of the boundary distances of the points
/// inside the box. Throws EmptyForegroundError when no point is inside.
double distribution_score(const OrientedBox3D & box, const PointCloud & cloud,
                          const ScoreParams & params = {});
/// Same, over an explicit set of points (each must be inside the box).
double distribution_score(const OrientedBox3D & box, std::span<const Point3> inside,
                          const ScoreParams & params = {});

/// KL(meta || box proportions) over normalized (l, w, h).
double shape_kl_divergence(const OrientedBox3D & box, const MetaShape & meta);

/// exp(-KL): 1 when the box has exactly the template proportions.
double meta_shape_score(const OrientedBox3D & box, const MetaShape & meta);

/// Throws ConfigError when the class has no template.
const MetaShape & lookup_meta_shape(const MetaShapeTable & table, const std::string & class_name);

/// Min-max normalizes each raw channel to [0, 1] across the given set; a
/// constant channel maps to 1. Fills the *_norm fields and ds.
void normalize_scores(std::span<ScoredProposal> scored, const ScoreParams & params);

double ds_score(double distribution_norm, double meta_shape_norm, double lambda1, double lambda2);

/// Raw scores, per-set normalization and DS for every proposal. Proposals
/// with an empty foreground are dropped (logged).
std::vector<ScoredProposal> score_proposals(const PointCloud & cloud,
                                            std::span<const Proposal> proposals,
                                            const MetaShapeTable & metas,
                                            const ScoreParams & params);

/// Rotated footprint IoU by convex polygon clipping.
double bev_iou(const OrientedBox3D & a, const OrientedBox3D & b);

/// Greedy suppression ordered by DS (desc), then BEV area (desc), then
/// instance id (asc). A box is dropped when its BEV IoU with any kept box
/// exceeds the threshold. Returned in keep order.
std::vector<ScoredProposal> nms(std::vector<ScoredProposal> scored, double iou_threshold);

}  // namespace pseudobox
