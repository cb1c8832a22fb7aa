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
#include <span>
#include <string>
#include <vector>

#include "pseudobox/calibration.hpp"
#include "pseudobox/geometry.hpp"
#include "pseudobox/mask.hpp"

namespace pseudobox
{

/// Confident foreground points of one image instance, as indices into the
/// frame's point cloud (ascending).
struct SeedPointSet
{
  int instance_id = 0;
  std::string class_name;
  std::vector<std::size_t> indices;

  std::size_t count() const noexcept { return indices.size(); }
};

/// Projects the cloud and keeps, per mask, the points whose pixel is set in
/// the shrunk mask. A point covered by several shrunk masks goes to the one
/// whose retained-rectangle center is nearest (ties to the lower id).
/// Results are ordered by instance id; instances without seeds are omitted.
/// Throws InputError when a mask's image size differs from the calibration.
std::vector<SeedPointSet> extract_seed_points(const PointCloud & cloud,
                                              std::span<const InstanceMask> masks,
                                              const CalibrationSet & calib, double shrink);

}  // namespace pseudobox
