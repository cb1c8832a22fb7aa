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

#include <doctest.h>

#include "pseudobox/errors.hpp"
#include "pseudobox/kitti_io.hpp"
#include "pseudobox/polygon.hpp"
#include "pseudobox/synth.hpp"

using namespace pseudobox;

TEST_CASE("counter rng is a pure function of its key")
{
  CounterRng a(1, 2, 3);
  CounterRng b(1, 2, 3);
  CounterRng c(1, 2, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  CounterRng d(7, 0, 0);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("scenes are deterministic")
{
  SynthConfig cfg;
  cfg.seed = 21;
  const SynthScene a = sample_scene(cfg, 4);
  const SynthScene b = sample_scene(cfg, 4);
  CHECK(a.bundle.cloud.points == b.bundle.cloud.points);
  CHECK(a.bundle.cloud.intensity == b.bundle.cloud.intensity);
  CHECK(a.point_labels == b.point_labels);
  CHECK(format_masks({375, 1242, a.bundle.masks}) == format_masks({375, 1242, b.bundle.masks}));
  const SynthScene other = sample_scene(cfg, 5);
  CHECK(other.bundle.cloud.points != a.bundle.cloud.points);
}

TEST_CASE("object points lie near the box surface")
{
  SynthConfig cfg;
  cfg.seed = 2;
  cfg.clutter_points = 0;
  cfg.min_objects = cfg.max_objects = 1;
  for (std::size_t frame = 0; frame < 10; ++frame) {
    const SynthScene scene = sample_scene(cfg, frame);
    const OrientedBox3D & box = scene.bundle.ground_truth->front().box;
    const double tol = 3 * cfg.surface_noise;
    for (const Point3 & p : scene.bundle.cloud.points) {
      const Point3 local = to_box_frame(p, box).cwiseAbs();
      const Point3 half(0.5 * box.length(), 0.5 * box.width(), 0.5 * box.height());
      const Point3 gap = (local - half).cwiseAbs();
      CHECK(point_in_box(p, box, tol));
      CHECK(gap.minCoeff() <= tol);
    }
  }
}

TEST_CASE("object counts and spacing")
{
  SynthConfig cfg;
  cfg.seed = 8;
  cfg.min_objects = 2;
  cfg.max_objects = 4;
  for (std::size_t frame = 0; frame < 100; ++frame) {
    const SynthScene scene = sample_scene(cfg, frame);
    const auto & gt = *scene.bundle.ground_truth;
    CHECK(gt.size() >= 2);
    CHECK(gt.size() <= 4);
    for (std::size_t i = 0; i < gt.size(); ++i) {
      for (std::size_t j = i + 1; j < gt.size(); ++j) {
        CHECK(bev_intersection_area(gt[i].box, gt[j].box) == 0.0);
      }
    }
  }
}

TEST_CASE("oracle masks cover their objects")
{
  SynthConfig cfg;
  cfg.seed = 13;
  for (std::size_t frame = 0; frame < 10; ++frame) {
    const SynthScene scene = sample_scene(cfg, frame);
    const auto & b = scene.bundle;
    const auto projected = project_points(b.cloud, b.calib);
    for (const InstanceMask & m : b.masks) {
      for (std::size_t i = 0; i < scene.point_labels.size(); ++i) {
        if (scene.point_labels[i] == m.id() && projected[i].valid) {
          CHECK(m.at(static_cast<int>(projected[i].u), static_cast<int>(projected[i].v)));
        }
      }
    }
  }
}

TEST_CASE("objects outside the view get no mask")
{
  const CalibrationSet calib = SynthConfig::default_camera();
  const std::vector<LabeledBox> boxes{{"Car", OrientedBox3D(Point3(-15, 0, -1), 4, 2, 1.5, 0), 1},
                                      {"Car", OrientedBox3D(Point3(15, 0, -1), 4, 2, 1.5, 0), 1}};
  PointCloud cloud;
  cloud.points = {{-15, 0, -1}, {-13, 0.5, -1}, {15, 0, -1}, {13, 0.5, -1}};
  const auto masks = render_oracle_masks(boxes, calib, cloud);
  REQUIRE(masks.size() == 1);
  CHECK(masks[0].id() == 1);
}

TEST_CASE("noisy masks with zero inflation equal clean masks")
{
  SynthConfig cfg;
  cfg.seed = 4;
  const SynthScene scene = sample_scene(cfg, 0);
  const auto & b = scene.bundle;
  MaskRenderOptions clean;
  MaskRenderOptions noisy;
  noisy.noisy = true;
  noisy.inflation = 0.0;
  const auto m1 = render_oracle_masks(*b.ground_truth, b.calib, b.cloud, clean);
  const auto m2 = render_oracle_masks(*b.ground_truth, b.calib, b.cloud, noisy);
  REQUIRE(m1.size() == m2.size());
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m1[i].pixels() == m2[i].pixels());
  }
  noisy.inflation = 0.5;
  const auto m3 = render_oracle_masks(*b.ground_truth, b.calib, b.cloud, noisy);
  for (std::size_t i = 0; i < m1.size(); ++i) {
    CHECK(m3[i].pixel_count() >= m1[i].pixel_count());
  }
}

TEST_CASE("occlusion removes hidden points")
{
  SynthConfig cfg;
  cfg.seed = 11;
  cfg.layout = SceneLayout::kOccludedPair;
  cfg.pair_lateral = {0.0, 0.0};
  cfg.clutter_points = 0;
  const SynthScene open = sample_scene(cfg, 0);
  cfg.occlusion = true;
  const SynthScene hidden = sample_scene(cfg, 0);
  const auto count = [](const SynthScene & s, int id) {
    return std::count(s.point_labels.begin(), s.point_labels.end(), id);
  };
  CHECK(count(hidden, 0) == count(open, 0));
  CHECK(count(hidden, 1) < count(open, 1));
}

TEST_CASE("misassignment fraction")
{
  const std::vector<int> labels{0, 0, 1, -1};
  const std::vector<SeedPointSet> seeds{{0, "Car", {0, 1, 2}}, {1, "Car", {3}}};
  CHECK(misassigned_fraction(seeds, labels) == doctest::Approx(0.5));
  CHECK(misassigned_fraction({}, labels) == 0.0);
}

TEST_CASE("invalid synth configs")
{
  SynthConfig cfg;
  cfg.min_objects = 5;
  cfg.max_objects = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.surface_noise = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.min_objects = cfg.max_objects = 40;
  cfg.max_attempts = 50;
  CHECK_THROWS_AS(sample_scene(cfg, 0), SceneTooDenseError);
}
