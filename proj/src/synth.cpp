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

#include "pseudobox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pseudobox/errors.hpp"
#include "pseudobox/polygon.hpp"

namespace pseudobox
{

namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream ids that cannot collide with per-object streams (object index < 2^32).
constexpr std::uint64_t kSceneStream = 1ULL << 40;
constexpr std::uint64_t kClutterStream = (1ULL << 40) + 1;
constexpr std::uint64_t kMaskStreamBase = 1ULL << 41;

struct Face
{
  Point3 center;  // box frame
  Point3 normal;
  Point3 axis_u;  // half-extent vectors spanning the face
  Point3 axis_v;
  double area;
};

std::array<Face, 6> box_faces(const OrientedBox3D & box)
{
  const double hl = 0.5 * box.length();
  const double hw = 0.5 * box.width();
  const double hh = 0.5 * box.height();
  const Point3 ex(1, 0, 0);
  const Point3 ey(0, 1, 0);
  const Point3 ez(0, 0, 1);
  return {{
    {hl * ex, ex, hw * ey, hh * ez, 4 * hw * hh},
    {-hl * ex, -ex, hw * ey, hh * ez, 4 * hw * hh},
    {hw * ey, ey, hl * ex, hh * ez, 4 * hl * hh},
    {-hw * ey, -ey, hl * ex, hh * ez, 4 * hl * hh},
    {hh * ez, ez, hl * ex, hw * ey, 4 * hl * hw},
    {-hh * ez, -ez, hl * ex, hw * ey, 4 * hl * hw},
  }};
}

Point3 rotate_yaw(const Point3 & v, double yaw)
{
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
}

/// Surface samples on the faces that look toward the sensor at the origin,
/// pushed along the face normal by a normal variate truncated at 3 sigma.
void sample_surface(const OrientedBox3D & box, std::size_t count, double noise, CounterRng & rng,
                    std::vector<Point3> & out)
{
  std::vector<Face> visible;
  double total_area = 0.0;
  for (const Face & f : box_faces(box)) {
    const Point3 world_center = from_box_frame(f.center, box);
    const Point3 world_normal = rotate_yaw(f.normal, box.yaw());
    if (world_normal.dot(world_center) < 0.0) {
      visible.push_back(f);
      total_area += f.area;
    }
  }
  if (visible.empty()) {
    return;
  }
  for (std::size_t i = 0; i < count; ++i) {
    double pick = rng.uniform() * total_area;
    std::size_t k = 0;
    while (k + 1 < visible.size() && pick >= visible[k].area) {
      pick -= visible[k].area;
      ++k;
    }
    const Face & f = visible[k];
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    double z = rng.normal();
    while (std::abs(z) > 3.0) {
      z = rng.normal();
    }
    const double n = noise * z;
    const Point3 local = f.center + a * f.axis_u + b * f.axis_v + n * f.normal;
    out.push_back(from_box_frame(local, box));
  }
}

/// True when the sight line from the sensor at the origin to p crosses the box
/// before reaching p.
bool shadowed(const Point3 & p, const OrientedBox3D & box)
{
  const Point3 o = to_box_frame(Point3::Zero(), box);
  const Point3 d = to_box_frame(p, box) - o;
  const Point3 half(0.5 * box.length(), 0.5 * box.width(), 0.5 * box.height());
  double enter = 0.0;
  double exit = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      if (std::abs(o[a]) > half[a]) {
        return false;
      }
      continue;
    }
    double t0 = (-half[a] - o[a]) / d[a];
    double t1 = (half[a] - o[a]) / d[a];
    if (t0 > t1) {
      std::swap(t0, t1);
    }
    enter = std::max(enter, t0);
    exit = std::min(exit, t1);
    if (enter > exit) {
      return false;
    }
  }
  return enter < 1.0;
}

bool footprints_clear(const OrientedBox3D & a, const OrientedBox3D & b, double gap)
{
  const OrientedBox3D ga(a.center(), a.length() + gap, a.width() + gap, a.height(), a.yaw());
  const OrientedBox3D gb(b.center(), b.length() + gap, b.width() + gap, b.height(), b.yaw());
  return bev_intersection_area(ga, gb) <= 0.0;
}

const ClassSpec & pick_class(const std::vector<ClassSpec> & classes, CounterRng & rng)
{
  double total = 0.0;
  for (const auto & c : classes) {
    total += c.weight;
  }
  double pick = rng.uniform() * total;
  for (const auto & c : classes) {
    if (pick < c.weight) {
      return c;
    }
    pick -= c.weight;
  }
  return classes.back();
}

const ClassSpec & find_class(const std::vector<ClassSpec> & classes, const std::string & name)
{
  for (const auto & c : classes) {
    if (c.name == name) {
      return c;
    }
  }
  return classes.front();
}

OrientedBox3D make_box(const ClassSpec & spec, double x, double y, double ground_z,
                       CounterRng & rng)
{
  const double l = rng.uniform(spec.length[0], spec.length[1]);
  const double w = rng.uniform(spec.width[0], spec.width[1]);
  const double h = rng.uniform(spec.height[0], spec.height[1]);
  const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return OrientedBox3D(Point3(x, y, ground_z + 0.5 * h), l, w, h, yaw);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream)
: key_(splitmix64(seed ^ splitmix64(frame ^ splitmix64(stream))))
{
}

std::uint64_t CounterRng::next()
{
  return splitmix64(key_ + 0x632BE59BD9B4E019ULL * ++counter_);
}

double CounterRng::uniform()
{
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::normal()
{
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::integer(std::uint64_t lo, std::uint64_t hi)
{
  if (hi <= lo) {
    return lo;
  }
  const std::uint64_t span = hi - lo + 1;
  return lo + static_cast<std::uint64_t>(uniform() * static_cast<double>(span)) % span;
}

std::vector<ClassSpec> SynthConfig::default_classes()
{
  return {
    {"Car", 0.6, {3.4, 4.6}, {1.5, 1.9}, {1.4, 1.7}},
    {"Pedestrian", 0.2, {0.6, 1.0}, {0.5, 0.8}, {1.6, 1.9}},
    {"Cyclist", 0.2, {1.5, 1.9}, {0.5, 0.7}, {1.6, 1.8}},
  };
}

CalibrationSet SynthConfig::default_camera()
{
  CalibrationSet c;
  c.projection << 721.5377, 0.0, 609.5593, 0.0,  //
    0.0, 721.5377, 172.854, 0.0,                 //
    0.0, 0.0, 1.0, 0.0;
  c.rectification.setIdentity();
  // LiDAR (x fwd, y left, z up) to camera (x right, y down, z fwd).
  c.lidar_to_camera << 0.0, -1.0, 0.0, 0.0,  //
    0.0, 0.0, -1.0, -0.08,                   //
    1.0, 0.0, 0.0, -0.27;
  c.image_height = 375;
  c.image_width = 1242;
  return c;
}

void SynthConfig::validate() const
{
  if (min_objects > max_objects || max_objects == 0) {
    throw ConfigError("synth object count range is empty");
  }
  if (min_points_per_object > max_points_per_object || max_points_per_object == 0) {
    throw ConfigError("synth points-per-object range is empty");
  }
  if (classes.empty()) {
    throw ConfigError("synth needs at least one class");
  }
  for (const auto & c : classes) {
    for (const auto & r : {c.length, c.width, c.height}) {
      if (!(r[0] > 0.0) || r[1] < r[0]) {
        throw ConfigError("synth class '" + c.name + "' has an empty extent range");
      }
    }
    if (!(c.weight >= 0.0)) {
      throw ConfigError("synth class weights must be nonnegative");
    }
  }
  if (!(surface_noise >= 0.0)) {
    throw ConfigError("synth surface noise must be nonnegative");
  }
  if (!(x_max > x_min) || !(x_min > 0.0) || !(lateral_ratio > 0.0)) {
    throw ConfigError("synth scene extent is empty");
  }
  if (!(min_gap >= 0.0) || !(clutter_clearance >= 0.0) || !(mask_inflation >= 0.0)) {
    throw ConfigError("synth gaps and inflation must be nonnegative");
  }
  camera.validate();
}

SynthScene sample_scene(const SynthConfig & config, std::size_t frame_index)
{
  config.validate();
  CounterRng scene_rng(config.seed, frame_index, kSceneStream);

  std::vector<LabeledBox> gt;
  std::size_t attempts = 0;
  auto exhausted = [&] {
    return ++attempts > config.max_attempts;
  };

  if (config.layout == SceneLayout::kOccludedPair) {
    const ClassSpec & car = find_class(config.classes, "Car");
    while (gt.size() < 2) {
      if (exhausted()) {
        throw SceneTooDenseError("could not place an occluded pair");
      }
      gt.clear();
      CounterRng rng_a(config.seed, frame_index, 2 * attempts);
      CounterRng rng_b(config.seed, frame_index, 2 * attempts + 1);
      const double xa = rng_a.uniform(8.0, 14.0);
      const double ya = rng_a.uniform(-2.0, 2.0);
      const OrientedBox3D a = make_box(car, xa, ya, config.ground_z, rng_a);
      const double side = rng_b.uniform() < 0.5 ? -1.0 : 1.0;
      const double xb = xa + rng_b.uniform(config.pair_depth[0], config.pair_depth[1]);
      const double yb = ya + side * rng_b.uniform(config.pair_lateral[0], config.pair_lateral[1]);
      const OrientedBox3D b = make_box(car, xb, yb, config.ground_z, rng_b);
      if (!footprints_clear(a, b, config.min_gap)) {
        continue;
      }
      gt.push_back({car.name, a, 1.0});
      gt.push_back({car.name, b, 1.0});
    }
  } else {
    const auto count = static_cast<std::size_t>(
      scene_rng.integer(config.min_objects, config.max_objects));
    for (std::size_t k = 0; k < count; ++k) {
      CounterRng rng(config.seed, frame_index, k);
      bool placed = false;
      while (!placed) {
        if (exhausted()) {
          throw SceneTooDenseError("could not place " + std::to_string(count) +
                                   " objects within the attempt budget");
        }
        const ClassSpec & spec = pick_class(config.classes, rng);
        const double x = rng.uniform(config.x_min, config.x_max);
        const double y = rng.uniform(-config.lateral_ratio * x, config.lateral_ratio * x);
        const OrientedBox3D box = make_box(spec, x, y, config.ground_z, rng);
        placed = std::all_of(gt.begin(), gt.end(), [&](const LabeledBox & other) {
          return footprints_clear(box, other.box, config.min_gap);
        });
        if (placed) {
          gt.push_back({spec.name, box, 1.0});
        }
      }
    }
  }

  SynthScene scene;
  FrameBundle & bundle = scene.bundle;
  bundle.frame_id = format_frame_id(frame_index);
  bundle.calib = config.camera;

  for (std::size_t k = 0; k < gt.size(); ++k) {
    CounterRng rng(config.seed, frame_index, kMaskStreamBase - 1 - k);
    const auto n = static_cast<std::size_t>(
      rng.integer(config.min_points_per_object, config.max_points_per_object));
    std::vector<Point3> surface;
    sample_surface(gt[k].box, n, config.surface_noise, rng, surface);
    for (const Point3 & p : surface) {
      const float intensity = static_cast<float>(rng.uniform(0.2, 0.9));
      const bool hidden = std::any_of(gt.begin(), gt.end(), [&](const LabeledBox & other) {
        return config.occlusion && &other != &gt[k] && shadowed(p, other.box);
      });
      if (!hidden) {
        bundle.cloud.points.push_back(p);
        bundle.cloud.intensity.push_back(intensity);
        scene.point_labels.push_back(static_cast<int>(k));
      }
    }
  }

  CounterRng clutter_rng(config.seed, frame_index, kClutterStream);
  const double y_span = config.lateral_ratio * config.x_max;
  for (std::size_t i = 0; i < config.clutter_points; ++i) {
    for (int tries = 0; tries < 100; ++tries) {
      const Point3 p(clutter_rng.uniform(config.x_min - 3.0, config.x_max + 3.0),
                     clutter_rng.uniform(-y_span, y_span),
                     clutter_rng.uniform(config.ground_z, config.clutter_z_max));
      const bool clear = std::none_of(gt.begin(), gt.end(), [&](const LabeledBox & b) {
        return point_in_box(p, b.box, config.clutter_clearance) ||
               (config.occlusion && shadowed(p, b.box));
      });
      if (clear) {
        bundle.cloud.points.push_back(p);
        bundle.cloud.intensity.push_back(static_cast<float>(clutter_rng.uniform(0.0, 0.3)));
        scene.point_labels.push_back(-1);
        break;
      }
    }
  }

  MaskRenderOptions opts;
  opts.margin_px = config.mask_margin_px;
  opts.noisy = config.noisy_masks;
  opts.inflation = config.mask_inflation;
  opts.membership_slack = std::max(0.1, 4.0 * config.surface_noise);
  opts.seed = config.seed;
  opts.frame = frame_index;
  bundle.masks = render_oracle_masks(gt, bundle.calib, bundle.cloud, opts);
  bundle.ground_truth = std::move(gt);
  return scene;
}

std::vector<InstanceMask> render_oracle_masks(std::span<const LabeledBox> boxes,
                                              const CalibrationSet & calib,
                                              const PointCloud & cloud,
                                              const MaskRenderOptions & options)
{
  calib.validate();
  const std::vector<ProjectedPoint> proj = project_points(cloud, calib);
  std::vector<InstanceMask> masks;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    PixelBounds b{calib.image_width, -1, calib.image_height, -1};
    bool any = false;
    for (std::size_t i : points_in_box(cloud, boxes[k].box, options.membership_slack)) {
      if (!proj[i].valid) {
        continue;
      }
      any = true;
      const int u = static_cast<int>(std::floor(proj[i].u));
      const int v = static_cast<int>(std::floor(proj[i].v));
      b.u_min = std::min(b.u_min, u);
      b.u_max = std::max(b.u_max, u);
      b.v_min = std::min(b.v_min, v);
      b.v_max = std::max(b.v_max, v);
    }
    if (!any) {
      continue;
    }
    int grow[4] = {options.margin_px, options.margin_px, options.margin_px, options.margin_px};
    if (options.noisy && options.inflation > 0.0) {
      CounterRng rng(options.seed, options.frame, kMaskStreamBase + k);
      const double du = b.u_max - b.u_min + 1;
      const double dv = b.v_max - b.v_min + 1;
      grow[0] += static_cast<int>(std::floor(rng.uniform(0.0, options.inflation) * du));
      grow[1] += static_cast<int>(std::floor(rng.uniform(0.0, options.inflation) * du));
      grow[2] += static_cast<int>(std::floor(rng.uniform(0.0, options.inflation) * dv));
      grow[3] += static_cast<int>(std::floor(rng.uniform(0.0, options.inflation) * dv));
    }
    const PixelBounds dilated{b.u_min - grow[0], b.u_max + grow[1], b.v_min - grow[2],
                              b.v_max + grow[3]};
    masks.push_back(InstanceMask::rectangle(static_cast<int>(k), boxes[k].class_name,
                                            calib.image_height, calib.image_width, dilated));
  }
  return masks;
}

double misassigned_fraction(std::span<const SeedPointSet> seeds, std::span<const int> point_labels)
{
  std::size_t total = 0;
  std::size_t wrong = 0;
  for (const SeedPointSet & s : seeds) {
    for (std::size_t i : s.indices) {
      ++total;
      if (point_labels[i] != s.instance_id) {
        ++wrong;
      }
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(total);
}

}  // namespace pseudobox
