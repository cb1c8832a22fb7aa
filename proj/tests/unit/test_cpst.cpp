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
#include <random>

#include <doctest.h>

#include "pseudobox/calibration.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/mask.hpp"
#include "pseudobox/seeds.hpp"
#include "pseudobox/synth.hpp"

using namespace pseudobox;
using doctest::Approx;

namespace
{

CalibrationSet pinhole(double f, double cu, double cv, int h = 400, int w = 800)
{
  CalibrationSet c;
  c.projection << f, 0, cu, 0, 0, f, cv, 0, 0, 0, 1, 0;
  c.lidar_to_camera << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0;
  c.image_height = h;
  c.image_width = w;
  return c;
}

}  // namespace

TEST_CASE("shrink keeps the central rectangle")
{
  const auto mask = InstanceMask::rectangle(0, "Car", 300, 300, {100, 200, 50, 150});
  const ShrunkMask s = shrink_mask(mask, 0.3);
  CHECK(s.u_lo == Approx(135));
  CHECK(s.u_hi == Approx(165));
  CHECK(s.v_lo == Approx(85));
  CHECK(s.v_hi == Approx(115));
  CHECK(s.retained == 31 * 31);
  CHECK(s.at(135, 85));
  CHECK(s.at(165, 115));
  CHECK_FALSE(s.at(134, 100));
  CHECK_FALSE(s.at(150, 116));
}

TEST_CASE("shrink with gamma one is the identity")
{
  std::vector<std::uint8_t> px(40 * 50, 0);
  for (int v = 5; v < 30; ++v) {
    for (int u = 10 + v % 3; u < 40; ++u) {
      px[v * 50 + u] = 1;
    }
  }
  const InstanceMask mask(3, "Pedestrian", 40, 50, px);
  const ShrunkMask s = shrink_mask(mask, 1.0);
  CHECK(s.pixels == mask.pixels());
  CHECK(s.retained == mask.pixel_count());
}

TEST_CASE("shrink intersects with the mask")
{
  // A ring: the central rectangle holds no set pixels.
  std::vector<std::uint8_t> px(20 * 20, 1);
  for (int v = 5; v < 15; ++v) {
    for (int u = 5; u < 15; ++u) {
      px[v * 20 + u] = 0;
    }
  }
  const InstanceMask ring(0, "Car", 20, 20, px);
  CHECK(shrink_mask(ring, 0.3).empty());
}

TEST_CASE("single pixel mask survives any shrink")
{
  const auto mask = InstanceMask::rectangle(1, "Car", 10, 10, {4, 4, 7, 7});
  for (double g : {0.01, 0.3, 1.0}) {
    const ShrunkMask s = shrink_mask(mask, g);
    CHECK(s.retained == 1);
    CHECK(s.at(4, 7));
  }
}

TEST_CASE("shrink factor range")
{
  const auto mask = InstanceMask::rectangle(1, "Car", 10, 10, {1, 5, 1, 5});
  CHECK_THROWS_AS(shrink_mask(mask, 0.0), ConfigError);
  CHECK_THROWS_AS(shrink_mask(mask, 1.5), ConfigError);
  CHECK_THROWS_AS(shrink_mask(mask, NAN), ConfigError);
}

TEST_CASE("masks validate their pixels")
{
  CHECK_THROWS_AS(InstanceMask(0, "Car", 2, 2, {1, 0, 0}), InputError);
  CHECK_THROWS_AS(InstanceMask(0, "Car", 2, 2, {0, 0, 0, 0}), InputError);
  const InstanceMask m(0, "Car", 2, 3, {0, 1, 0, 0, 1, 1});
  CHECK(m.bounds().u_min == 1);
  CHECK(m.bounds().u_max == 2);
  CHECK(m.bounds().v_min == 0);
  CHECK(m.bounds().v_max == 1);
  CHECK(m.pixel_count() == 3);
}

TEST_CASE("rle is column-major and starts with zeros")
{
  // 2x3 image, row-major:
  //   0 1 1
  //   1 1 0
  // Column-major order: 0 1 | 1 1 | 1 0
  const std::vector<std::uint8_t> px{0, 1, 1, 1, 1, 0};
  const auto counts = encode_rle(px, 2, 3);
  CHECK(counts == std::vector<std::int64_t>{1, 4, 1});
  CHECK(decode_rle(counts, 2, 3) == px);
  const std::vector<std::uint8_t> lead{1, 0, 0, 0};
  CHECK(encode_rle(lead, 2, 2) == std::vector<std::int64_t>{0, 1, 3});
  CHECK_THROWS_AS(decode_rle(std::vector<std::int64_t>{1, 2}, 2, 3), InputError);
}

TEST_CASE("rle round trip on random masks")
{
  std::mt19937 rng(4);
  std::bernoulli_distribution bit(0.3);
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint8_t> px(17 * 23);
    for (auto & p : px) {
      p = bit(rng) ? 1 : 0;
    }
    CHECK(decode_rle(encode_rle(px, 17, 23), 17, 23) == px);
  }
}

TEST_CASE("projection")
{
  const CalibrationSet c = pinhole(700, 400, 200);
  const ProjectedPoint pp = project_rect_point(Point3(0, 0, 12), c);
  CHECK(pp.valid);
  CHECK(pp.u == Approx(400));
  CHECK(pp.v == Approx(200));
  CHECK(pp.depth == Approx(12));
  CHECK_FALSE(project_rect_point(Point3(0, 0, -5), c).valid);
  CHECK_FALSE(project_rect_point(Point3(100, 0, 1), c).valid);  // off image
}

TEST_CASE("projection matches a step-by-step matrix chain")
{
  CalibrationSet c = SynthConfig::default_camera();
  c.rectification = Eigen::AngleAxisd(0.01, Eigen::Vector3d(0.3, 1, 0.2).normalized())
                      .toRotationMatrix();
  c.projection(0, 3) = 44.8;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> x(5, 40);
  std::uniform_real_distribution<double> y(-10, 10);
  std::uniform_real_distribution<double> z(-2, 1);
  PointCloud cloud;
  for (int i = 0; i < 200; ++i) {
    cloud.points.emplace_back(x(rng), y(rng), z(rng));
  }
  const auto projected = project_points(cloud, c);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Eigen::Vector4d h;
    h << cloud.points[i], 1.0;
    const Eigen::Vector3d cam = c.lidar_to_camera * h;
    const Eigen::Vector3d rect = c.rectification * cam;
    Eigen::Vector4d rh;
    rh << rect, 1.0;
    const Eigen::Vector3d img = c.projection * rh;
    const double u = img.x() / img.z();
    const double v = img.y() / img.z();
    if (projected[i].valid) {
      CHECK(std::abs(projected[i].u - u) < 1e-9);
      CHECK(std::abs(projected[i].v - v) < 1e-9);
    } else {
      CHECK((u < 0 || v < 0 || u >= c.image_width || v >= c.image_height || img.z() <= 0));
    }
    CHECK((c.rect_to_lidar(c.lidar_to_rect(cloud.points[i])) - cloud.points[i]).norm() < 1e-9);
  }
}

TEST_CASE("calibration validation")
{
  CalibrationSet c = pinhole(700, 400, 200);
  c.rectification.setZero();
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("seed extraction")
{
  const CalibrationSet c = pinhole(100, 50, 50, 100, 100);
  PointCloud cloud;
  cloud.points = {{0, 0, 10}, {1, 0, 10}, {-4.5, -4.5, 10}, {0, 0, -10}, {4, 4, 10}};
  cloud.intensity.assign(cloud.size(), 0.0f);

  SUBCASE("no masks")
  {
    CHECK(extract_seed_points(cloud, {}, c, 0.3).empty());
  }
  SUBCASE("whole image")
  {
    const std::vector<InstanceMask> masks{
      InstanceMask::rectangle(7, "Car", 100, 100, {0, 99, 0, 99})};
    const auto seeds = extract_seed_points(cloud, masks, c, 1.0);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0].instance_id == 7);
    CHECK(seeds[0].class_name == "Car");
    CHECK(seeds[0].indices == std::vector<std::size_t>{0, 1, 2, 4});
    const auto shrunk = extract_seed_points(cloud, masks, c, 0.3);
    REQUIRE(shrunk.size() == 1);
    CHECK(shrunk[0].indices == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("overlap goes to the nearest center")
  {
    const std::vector<InstanceMask> masks{
      InstanceMask::rectangle(1, "Car", 100, 100, {0, 70, 0, 99}),
      InstanceMask::rectangle(2, "Car", 100, 100, {48, 99, 0, 99})};
    const auto seeds = extract_seed_points(cloud, masks, c, 1.0);
    REQUIRE(seeds.size() == 2);
    // Point 0 projects to u = 50: center 35 vs 73.5.
    CHECK(seeds[0].indices == std::vector<std::size_t>{0, 2});
    CHECK(seeds[1].indices == std::vector<std::size_t>{1, 4});
  }
  SUBCASE("equal distance goes to the lower id")
  {
    const std::vector<InstanceMask> masks{
      InstanceMask::rectangle(5, "Car", 100, 100, {40, 60, 40, 60}),
      InstanceMask::rectangle(4, "Car", 100, 100, {40, 60, 40, 60})};
    const auto seeds = extract_seed_points(cloud, masks, c, 1.0);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0].instance_id == 4);
  }
  SUBCASE("size mismatch")
  {
    const std::vector<InstanceMask> masks{
      InstanceMask::rectangle(0, "Car", 50, 100, {0, 10, 0, 10})};
    CHECK_THROWS_AS(extract_seed_points(cloud, masks, c, 1.0), InputError);
  }
}

TEST_CASE("clean synthetic masks capture every object point at gamma one")
{
  const auto overlaps = [](const InstanceMask & a, const InstanceMask & b) {
    const PixelBounds & p = a.bounds();
    const PixelBounds & q = b.bounds();
    return p.u_min <= q.u_max && q.u_min <= p.u_max && p.v_min <= q.v_max && q.v_min <= p.v_max;
  };
  std::size_t checked = 0;
  SynthConfig cfg;
  cfg.seed = 3;
  for (std::size_t frame = 0; frame < 10; ++frame) {
    const SynthScene scene = sample_scene(cfg, frame);
    const auto & b = scene.bundle;
    const auto seeds = extract_seed_points(b.cloud, b.masks, b.calib, 1.0);
    const auto projected = project_points(b.cloud, b.calib);
    for (const InstanceMask & mask : b.masks) {
      // Masks that overlap in the image compete for points; skip those.
      const bool alone = std::none_of(b.masks.begin(), b.masks.end(), [&](const InstanceMask & o) {
        return &o != &mask && overlaps(o, mask);
      });
      if (!alone) {
        continue;
      }
      ++checked;
      const auto k = static_cast<std::size_t>(mask.id());
      std::size_t own = 0;
      std::size_t visible = 0;
      for (std::size_t i = 0; i < scene.point_labels.size(); ++i) {
        visible += scene.point_labels[i] == static_cast<int>(k) && projected[i].valid ? 1 : 0;
      }
      for (const auto & s : seeds) {
        if (s.instance_id != static_cast<int>(k)) {
          continue;
        }
        for (std::size_t i : s.indices) {
          own += scene.point_labels[i] == static_cast<int>(k) ? 1 : 0;
        }
      }
      CHECK(static_cast<double>(own) >= 0.99 * static_cast<double>(visible));
    }
  }
  CHECK(checked >= 10);
}
