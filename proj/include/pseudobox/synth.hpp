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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pseudobox/calibration.hpp"
#include "pseudobox/eval.hpp"
#include "pseudobox/kitti_io.hpp"
#include "pseudobox/mask.hpp"
#include "pseudobox/seeds.hpp"

namespace pseudobox
{

/// Counter-based generator: the n-th draw is a pure function of
/// (seed, frame, stream, n), so any object of any frame can be generated
/// independently of the others. Distributions are implemented here rather
/// than with <random> so that output is identical across standard libraries.
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [lo, hi].
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi);

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct ClassSpec
{
  std::string name;
  double weight = 1.0;
  std::array<double, 2> length{};  // meters, [lo, hi]
  std::array<double, 2> width{};
  std::array<double, 2> height{};
};

enum class SceneLayout
{
  kScatter,       // objects anywhere in the field of view, with a minimum gap
  kOccludedPair,  // two cars, the second behind the first and partly hidden by it
};

struct SynthConfig
{
  std::uint64_t seed = 0;
  std::size_t min_objects = 1;
  std::size_t max_objects = 5;
  std::vector<ClassSpec> classes = default_classes();
  std::size_t min_points_per_object = 150;
  std::size_t max_points_per_object = 600;
  double surface_noise = 0.02;  // sigma along the face normal, meters
  std::size_t clutter_points = 150;
  double clutter_clearance = 0.5;  // clutter kept this far outside every box
  double x_min = 6.0;              // forward range of object centers
  double x_max = 35.0;
  double lateral_ratio = 0.6;      // |y| <= ratio * x
  double ground_z = -1.73;
  double clutter_z_max = 0.5;
  double min_gap = 1.5;            // footprint clearance between objects
  std::size_t max_attempts = 2000;
  SceneLayout layout = SceneLayout::kScatter;
  // Occluded pair: the rear car's offset from the front car, meters.
  std::array<double, 2> pair_depth{5.5, 8.0};
  std::array<double, 2> pair_lateral{4.0, 6.0};
  // Drop points whose sight line from the sensor crosses another box.
  bool occlusion = false;
  int mask_margin_px = 2;
  bool noisy_masks = false;
  double mask_inflation = 0.25;  // max per-side growth as a fraction of the mask extent
  CalibrationSet camera = default_camera();

  void validate() const;

  static std::vector<ClassSpec> default_classes();
  /// KITTI-like camera: 375 x 1242 image, forward-looking, identity rectification.
  static CalibrationSet default_camera();
};

struct SynthScene
{
  FrameBundle bundle;
  /// Generating ground-truth index per point, -1 for clutter.
  std::vector<int> point_labels;
};

struct MaskRenderOptions
{
  int margin_px = 2;
  bool noisy = false;
  double inflation = 0.0;
  double membership_slack = 0.1;  // meters, for attributing points to a box
  std::uint64_t seed = 0;
  std::uint64_t frame = 0;
};

/// Throws SceneTooDenseError when object placement exhausts its attempt budget.
SynthScene sample_scene(const SynthConfig & config, std::size_t frame_index);

/// One mask per visible box: the pixel bounding rectangle of the box's
/// projected points, dilated by the margin (and, in noisy mode, grown by a
/// random amount per side). Mask ids are box indices; invisible boxes are skipped.
std::vector<InstanceMask> render_oracle_masks(std::span<const LabeledBox> boxes,
                                              const CalibrationSet & calib,
                                              const PointCloud & cloud,
                                              const MaskRenderOptions & options = {});

/// Share of seeds whose generating box differs from their instance id.
double misassigned_fraction(std::span<const SeedPointSet> seeds,
                            std::span<const int> point_labels);

}  // namespace pseudobox
