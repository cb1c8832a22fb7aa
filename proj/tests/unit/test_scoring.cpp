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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "../oracles.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/scoring.hpp"

using namespace pseudobox;
using doctest::Approx;

namespace
{

const double kPeak = -std::log(0.2 * std::sqrt(2 * std::numbers::pi));

ScoredProposal scored(const OrientedBox3D & box, double ds, int instance = 0)
{
  ScoredProposal s{Proposal{box, instance, "Car", 1.0, 1, {}}};
  s.ds = ds;
  return s;
}

}  // namespace

TEST_CASE("boundary distance")
{
  const OrientedBox3D box(Point3(1, 1, 0), 4, 2, 1, 0.3);
  CHECK(boundary_distance(box.center(), box) == Approx(0.0));
  CHECK(boundary_distance(from_box_frame(Point3(2, 0.2, 0), box), box) == Approx(1.0));
  CHECK(boundary_distance(from_box_frame(Point3(1, 0.5, 0), box), box) == Approx(0.5));
  CHECK(boundary_distance(from_box_frame(Point3(0.4, -0.9, 0.3), box), box) == Approx(0.9));
  // Height only counts when asked for.
  CHECK(boundary_distance(from_box_frame(Point3(0, 0, 0.45), box), box) == Approx(0.0));
  CHECK(boundary_distance(from_box_frame(Point3(0, 0, 0.45), box), box, true) == Approx(0.9));
  CHECK_THROWS_AS(boundary_distance(from_box_frame(Point3(3, 0, 0), box), box), std::domain_error);
}

TEST_CASE("distribution score closed forms")
{
  CHECK(gaussian_log_density(0.8, 0.8, 0.2) == Approx(kPeak).epsilon(1e-12));
  const OrientedBox3D box(Point3::Zero(), 4, 2, 1, 0);
  const std::vector<Point3> at_mean{{1.6, 0, 0}, {0, -0.8, 0}};
  const std::vector<Point3> one_sigma{{1.2, 0, 0}, {0, 0.6, 0}};
  const std::vector<Point3> mixed{{1.2, 0, 0}, {2.0, 0, 0}};
  CHECK(std::abs(distribution_score(box, at_mean) - kPeak) < 1e-9);
  CHECK(std::abs(distribution_score(box, one_sigma) - (kPeak - 0.5)) < 1e-9);
  // Per-point summation.
  const double per_point =
    0.5 * (gaussian_log_density(0.6, 0.8, 0.2) + gaussian_log_density(1.0, 0.8, 0.2));
  CHECK(std::abs(distribution_score(box, mixed) - per_point) < 1e-12);
  CHECK_THROWS_AS(distribution_score(box, std::vector<Point3>{}), EmptyForegroundError);
}

TEST_CASE("distribution score over a cloud uses only inside points")
{
  const OrientedBox3D box(Point3::Zero(), 4, 2, 1, 0);
  PointCloud cloud;
  cloud.points = {{1.6, 0, 0}, {10, 0, 0}, {0, 0.8, 0.2}};
  CHECK(std::abs(distribution_score(box, cloud) - kPeak) < 1e-9);
  PointCloud outside;
  outside.points = {{10, 0, 0}};
  CHECK_THROWS_AS(distribution_score(box, outside), EmptyForegroundError);
}

TEST_CASE("meta-shape score")
{
  const MetaShape meta = MetaShape::from_extents("Car", 5, 3, 2);
  const OrientedBox3D cube(Point3::Zero(), 1, 1, 1, 0);
  const double kl = 0.5 * std::log(1.5) + 0.3 * std::log(0.9) + 0.2 * std::log(0.6);
  CHECK(shape_kl_divergence(cube, meta) == Approx(kl).epsilon(1e-12));
  CHECK(kl == Approx(0.0689593).epsilon(1e-6));
  CHECK(meta_shape_score(cube, meta) == Approx(0.93336).epsilon(1e-5));
  const OrientedBox3D match(Point3(1, 2, 3), 2.5, 1.5, 1.0, 1.2);
  CHECK(meta_shape_score(match, meta) == Approx(1.0).epsilon(1e-12));
  const OrientedBox3D odd(Point3::Zero(), 3.1, 0.4, 2.2, 0);
  CHECK(meta_shape_score(odd, meta) == doctest::Approx(meta_shape_score(odd.scaled(2, 2, 2), meta)).epsilon(1e-12));
  CHECK(meta_shape_score(odd, meta) < meta_shape_score(match, meta));
}

TEST_CASE("meta-shape table")
{
  const MetaShapeTable table = default_meta_shapes();
  CHECK(table.contains("Car"));
  CHECK(table.contains("Pedestrian"));
  CHECK(table.contains("Cyclist"));
  CHECK_THROWS_AS(lookup_meta_shape(table, "Tram"), ConfigError);
}

TEST_CASE("min-max normalization")
{
  const OrientedBox3D box(Point3::Zero(), 1, 1, 1, 0);
  std::vector<ScoredProposal> s(3, scored(box, 0));
  s[0].distribution = -1;
  s[1].distribution = 0;
  s[2].distribution = 1;
  for (auto & p : s) {
    p.meta_shape = 0.4;
  }
  normalize_scores(s, ScoreParams{});
  CHECK(s[0].distribution_norm == Approx(0.0));
  CHECK(s[1].distribution_norm == Approx(0.5));
  CHECK(s[2].distribution_norm == Approx(1.0));
  CHECK(s[1].meta_shape_norm == Approx(1.0));
  CHECK(s[1].ds == Approx(0.75));

  std::vector<ScoredProposal> one(1, scored(box, 0));
  one[0].distribution = -7;
  one[0].meta_shape = 0.1;
  normalize_scores(one, ScoreParams{});
  CHECK(one[0].distribution_norm == 1.0);
  CHECK(one[0].meta_shape_norm == 1.0);
}

TEST_CASE("normalization preserves order")
{
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  const OrientedBox3D box(Point3::Zero(), 1, 1, 1, 0);
  std::vector<ScoredProposal> s(50, scored(box, 0));
  for (auto & p : s) {
    p.distribution = n(rng);
    p.meta_shape = std::exp(-std::abs(n(rng)));
  }
  const auto raw = s;
  normalize_scores(s, ScoreParams{});
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK((raw[i].distribution < raw[j].distribution) ==
            (s[i].distribution_norm < s[j].distribution_norm));
      CHECK((raw[i].meta_shape < raw[j].meta_shape) == (s[i].meta_shape_norm < s[j].meta_shape_norm));
    }
  }
}

TEST_CASE("ds combination")
{
  CHECK(ds_score(1, 1, 0.5, 0.5) == Approx(1.0));
  CHECK(ds_score(0, 0, 0.5, 0.5) == Approx(0.0));
  CHECK(ds_score(1, 0, 0.3, 0.7) == Approx(0.3));
  const ScoreParams p;
  CHECK(p.lambda1 == 0.5);
  CHECK(p.lambda2 == 0.5);
  CHECK(p.mu == 0.8);
  CHECK(p.sigma == 0.2);
  ScoreParams bad;
  bad.lambda1 = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.lambda1 = bad.lambda2 = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.sigma = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.nms_iou = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("score_proposals drops empty boxes")
{
  PointCloud cloud;
  cloud.points = {{1.6, 0, 0}, {0, 0.8, 0}, {-1.5, 0.1, 0.2}};
  std::vector<Proposal> props{
    {OrientedBox3D(Point3::Zero(), 4, 2, 1.5, 0), 0, "Car", 1, 1, {}},
    {OrientedBox3D(Point3(50, 0, 0), 4, 2, 1.5, 0), 1, "Car", 1, 1, {}},
  };
  const auto out = score_proposals(cloud, props, default_meta_shapes(), ScoreParams{});
  REQUIRE(out.size() == 1);
  CHECK(out[0].proposal.instance_id == 0);
  CHECK(out[0].ds == Approx(1.0));
}

TEST_CASE("bev iou")
{
  const OrientedBox3D a(Point3::Zero(), 1, 1, 1, 0);
  CHECK(bev_iou(a, a) == Approx(1.0));
  CHECK(bev_iou(a, OrientedBox3D(Point3(3, 0, 0), 1, 1, 1, 0)) == 0.0);
  CHECK(bev_iou(a, OrientedBox3D(Point3(0.5, 0, 0), 1, 1, 1, 0)) == Approx(1.0 / 3));
  // Height does not matter in bird's-eye view.
  CHECK(bev_iou(a, OrientedBox3D(Point3(0, 0, 10), 1, 1, 1, 0)) == Approx(1.0));
}

TEST_CASE("bev iou agrees with sampling")
{
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(-1, 1);
  std::uniform_real_distribution<double> ext(0.5, 3);
  std::uniform_real_distribution<double> ang(-3, 3);
  for (int i = 0; i < 5; ++i) {
    const OrientedBox3D a(Point3(pos(rng), pos(rng), 0), ext(rng), ext(rng), 1, ang(rng));
    const OrientedBox3D b(Point3(pos(rng), pos(rng), 0), ext(rng), ext(rng), 1, ang(rng));
    CHECK(std::abs(bev_iou(a, b) - oracle::monte_carlo_bev_iou(a, b, 400, i)) < 2e-3);
  }
}

TEST_CASE("nms")
{
  const OrientedBox3D a(Point3::Zero(), 4, 2, 1, 0);
  CHECK(nms({scored(a, 0.3)}, 0.1).size() == 1);
  const auto kept = nms({scored(a, 0.8, 1), scored(a, 0.9, 2)}, 0.1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].ds == 0.9);
  // Disjoint boxes both survive, best first.
  const OrientedBox3D far(Point3(20, 0, 0), 4, 2, 1, 0);
  const auto both = nms({scored(a, 0.2), scored(far, 0.7)}, 0.1);
  REQUIRE(both.size() == 2);
  CHECK(both[0].ds == 0.7);
  // Equal scores: the larger footprint wins.
  const OrientedBox3D big(Point3::Zero(), 5, 2, 1, 0);
  const auto tie = nms({scored(a, 0.5), scored(big, 0.5)}, 0.1);
  REQUIRE(tie.size() == 1);
  CHECK(tie[0].proposal.box == big);
}

TEST_CASE("nms equals the greedy oracle")
{
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pos(-5, 5);
  std::uniform_real_distribution<double> ext(0.5, 4);
  std::uniform_real_distribution<double> ang(-3, 3);
  std::uniform_int_distribution<int> level(0, 4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScoredProposal> props;
    for (int i = 0; i < 25; ++i) {
      props.push_back(scored(OrientedBox3D(Point3(pos(rng), pos(rng), 0), ext(rng), ext(rng), 1,
                                           ang(rng)),
                             level(rng) / 4.0, i % 3));
    }
    const auto kept = nms(props, 0.2);
    const auto expect = oracle::greedy_nms(props, 0.2);
    REQUIRE(kept.size() == expect.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      CHECK(kept[k].proposal.box == props[expect[k]].proposal.box);
    }
  }
}
