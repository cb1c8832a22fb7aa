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

#include "pseudobox/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pseudobox/errors.hpp"
#include "pseudobox/log.hpp"
#include "pseudobox/polygon.hpp"

namespace pseudobox
{

void ScoreParams::validate() const
{
  if (!(sigma > 0.0) || !std::isfinite(mu)) {
    throw ConfigError("score prior needs finite mu and positive sigma");
  }
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda1 + lambda2 > 0.0)) {
    throw ConfigError("DS weights must be nonnegative with a positive sum");
  }
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) {
    throw ConfigError("NMS IoU threshold must lie in (0, 1)");
  }
}

MetaShapeTable default_meta_shapes()
{
  MetaShapeTable table;
  for (auto m : {MetaShape::from_extents("Car", 3.89, 1.62, 1.53),
                 MetaShape::from_extents("Pedestrian", 0.88, 0.65, 1.77),
                 MetaShape::from_extents("Cyclist", 1.77, 0.57, 1.72)}) {
    table.emplace(m.class_name, m);
  }
  return table;
}

double boundary_distance(const Point3 & p, const OrientedBox3D & box, bool use_height)
{
  if (!point_in_box(p, box)) {
    throw std::domain_error("boundary distance requested for a point outside the box");
  }
  const Point3 q = to_box_frame(p, box);
  double d = std::max(std::abs(q.x()) / (0.5 * box.length()), std::abs(q.y()) / (0.5 * box.width()));
  if (use_height) {
    d = std::max(d, std::abs(q.z()) / (0.5 * box.height()));
  }
  return d;
}

double gaussian_log_density(double x, double mu, double sigma)
{
  const double z = (x - mu) / sigma;
  return -std::log(sigma * std::sqrt(2.0 * std::numbers::pi)) - 0.5 * z * z;
}

double distribution_score(const OrientedBox3D & box, std::span<const Point3> inside,
                          const ScoreParams & params)
{
  if (inside.empty()) {
    throw EmptyForegroundError("no points inside the proposal box");
  }
  double acc = 0.0;
  for (const Point3 & p : inside) {
    acc += gaussian_log_density(boundary_distance(p, box, params.boundary_uses_height), params.mu,
                                params.sigma);
  }
  return acc / static_cast<double>(inside.size());
}

double distribution_score(const OrientedBox3D & box, const PointCloud & cloud,
                          const ScoreParams & params)
{
  std::vector<Point3> inside;
  for (std::size_t i : points_in_box(cloud, box)) {
    inside.push_back(cloud.points[i]);
  }
  return distribution_score(box, inside, params);
}

double shape_kl_divergence(const OrientedBox3D & box, const MetaShape & meta)
{
  const double total = box.length() + box.width() + box.height();
  const double ref[3] = {meta.length, meta.width, meta.height};
  const double est[3] = {box.length() / total, box.width() / total, box.height() / total};
  double kl = 0.0;
  for (int i = 0; i < 3; ++i) {
    kl += ref[i] * std::log(ref[i] / est[i]);
  }
  // Tiny negative values are rounding noise around a perfect match.
  return std::max(kl, 0.0);
}

double meta_shape_score(const OrientedBox3D & box, const MetaShape & meta)
{
  return std::exp(-shape_kl_divergence(box, meta));
}

const MetaShape & lookup_meta_shape(const MetaShapeTable & table, const std::string & class_name)
{
  const auto it = table.find(class_name);
  if (it == table.end()) {
    throw ConfigError("no meta shape configured for class '" + class_name + "'");
  }
  return it->second;
}

namespace
{

template <typename Get, typename Set>
void min_max_normalize(std::span<ScoredProposal> scored, Get get, Set set)
{
  if (scored.empty()) {
    return;
  }
  double lo = get(scored.front());
  double hi = lo;
  for (const auto & s : scored) {
    lo = std::min(lo, get(s));
    hi = std::max(hi, get(s));
  }
  for (auto & s : scored) {
    set(s, hi > lo ? (get(s) - lo) / (hi - lo) : 1.0);
  }
}

}  // namespace

void normalize_scores(std::span<ScoredProposal> scored, const ScoreParams & params)
{
  min_max_normalize(
    scored, [](const ScoredProposal & s) { return s.distribution; },
    [](ScoredProposal & s, double v) { s.distribution_norm = v; });
  min_max_normalize(
    scored, [](const ScoredProposal & s) { return s.meta_shape; },
    [](ScoredProposal & s, double v) { s.meta_shape_norm = v; });
  for (auto & s : scored) {
    s.ds = ds_score(s.distribution_norm, s.meta_shape_norm, params.lambda1, params.lambda2);
  }
}

double ds_score(double distribution_norm, double meta_shape_norm, double lambda1, double lambda2)
{
  return lambda1 * distribution_norm + lambda2 * meta_shape_norm;
}

std::vector<ScoredProposal> score_proposals(const PointCloud & cloud,
                                            std::span<const Proposal> proposals,
                                            const MetaShapeTable & metas,
                                            const ScoreParams & params)
{
  params.validate();
  std::vector<ScoredProposal> scored;
  scored.reserve(proposals.size());
  for (const Proposal & p : proposals) {
    const MetaShape & meta = lookup_meta_shape(metas, p.class_name);
    ScoredProposal s{p};
    try {
      s.distribution = distribution_score(p.box, cloud, params);
    } catch (const EmptyForegroundError &) {
      logger()->info("event=discard_proposal reason=empty_foreground instance={}", p.instance_id);
      continue;
    }
    s.meta_shape = meta_shape_score(p.box, meta);
    scored.push_back(std::move(s));
  }
  normalize_scores(scored, params);
  return scored;
}

double bev_iou(const OrientedBox3D & a, const OrientedBox3D & b)
{
  const double inter = bev_intersection_area(a, b);
  const double uni = a.bev_area() + b.bev_area() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace pseudobox
