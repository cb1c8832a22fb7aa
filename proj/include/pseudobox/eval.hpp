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
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pseudobox/geometry.hpp"

namespace pseudobox
{

/// A box with its class, as found in label files (score is 1 for ground truth).
struct LabeledBox
{
  std::string class_name;
  OrientedBox3D box;
  double score = 1.0;
};

struct FrameLabels
{
  std::string frame_id;
  std::vector<LabeledBox> labels;        // pseudo-labels
  std::vector<LabeledBox> ground_truth;
};

struct Match
{
  std::size_t label = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct FrameMatches
{
  std::string frame_id;
  std::vector<Match> matches;
  std::size_t num_labels = 0;
  std::size_t num_gt = 0;
};

/// IoU buckets over pseudo-labels: [0, 0.5], (0.5, 0.7), [0.7, 1].
inline constexpr std::size_t kNumBuckets = 3;

struct QualityReport
{
  std::vector<double> thresholds{0.3, 0.5, 0.7};
  std::vector<double> recall;
  std::vector<std::size_t> recalled;  // matched GT count per threshold
  std::size_t total_gt = 0;
  std::size_t total_labels = 0;
  std::array<std::size_t, kNumBuckets> bucket_counts{};
  std::array<double, kNumBuckets> bucket_percent{};
  std::vector<FrameMatches> frames;
};

/// Footprint overlap times vertical overlap, over the union of volumes.
double iou3d(const OrientedBox3D & a, const OrientedBox3D & b);

/// Greedy one-to-one matching between same-class boxes by descending 3D IoU
/// (ties by label index, then GT index). Only pairs with positive IoU match.
std::vector<Match> match_frame(std::span<const LabeledBox> labels,
                               std::span<const LabeledBox> ground_truth);

std::size_t iou_bucket(double iou);

/// Percentages of each bucket; all zeros when the counts are all zero.
std::array<double, kNumBuckets> bucket_percentages(const std::array<std::size_t, kNumBuckets> & counts);

/// Rounds a percentage to two decimals, as printed in quality tables.
double round_percent(double percent);

QualityReport match_and_recall(std::span<const FrameLabels> frames,
                               std::span<const double> thresholds = std::vector<double>{0.3, 0.5,
                                                                                        0.7});

/// Human-readable table of recalls and buckets.
std::string format_report_table(const QualityReport & report);
/// Machine-readable JSON document with the same content plus per-frame matches.
std::string format_report_json(const QualityReport & report);

}  // namespace pseudobox
