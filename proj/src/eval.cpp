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

#include "pseudobox/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pseudobox/polygon.hpp"

namespace pseudobox
{

double iou3d(const OrientedBox3D & a, const OrientedBox3D & b)
{
  const double dz = std::min(a.z_max(), b.z_max()) - std::max(a.z_min(), b.z_min());
  if (dz <= 0.0) {
    return 0.0;
  }
  const double inter = bev_intersection_area(a, b) * dz;
  const double uni = a.volume() + b.volume() - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Match> match_frame(std::span<const LabeledBox> labels,
                               std::span<const LabeledBox> ground_truth)
{
  std::vector<Match> candidates;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < ground_truth.size(); ++j) {
      if (labels[i].class_name != ground_truth[j].class_name) {
        continue;
      }
      const double iou = iou3d(labels[i].box, ground_truth[j].box);
      if (iou > 0.0) {
        candidates.push_back({i, j, iou});
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Match & a, const Match & b) {
    if (a.iou != b.iou) {
      return a.iou > b.iou;
    }
    return a.label != b.label ? a.label < b.label : a.gt < b.gt;
  });
  std::vector<bool> label_used(labels.size(), false);
  std::vector<bool> gt_used(ground_truth.size(), false);
  std::vector<Match> matches;
  for (const Match & m : candidates) {
    if (label_used[m.label] || gt_used[m.gt]) {
      continue;
    }
    label_used[m.label] = true;
    gt_used[m.gt] = true;
    matches.push_back(m);
  }
  return matches;
}

std::size_t iou_bucket(double iou)
{
  if (iou <= 0.5) {
    return 0;
  }
  return iou < 0.7 ? 1 : 2;
}

std::array<double, kNumBuckets> bucket_percentages(
  const std::array<std::size_t, kNumBuckets> & counts)
{
  std::size_t total = 0;
  for (std::size_t c : counts) {
    total += c;
  }
  std::array<double, kNumBuckets> pct{};
  if (total == 0) {
    return pct;
  }
  for (std::size_t i = 0; i < kNumBuckets; ++i) {
    pct[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return pct;
}

double round_percent(double percent)
{
  return std::round(percent * 100.0) / 100.0;
}

QualityReport match_and_recall(std::span<const FrameLabels> frames,
                               std::span<const double> thresholds)
{
  QualityReport report;
  report.thresholds.assign(thresholds.begin(), thresholds.end());
  report.recalled.assign(thresholds.size(), 0);
  for (const FrameLabels & f : frames) {
    FrameMatches fm;
    fm.frame_id = f.frame_id;
    fm.num_labels = f.labels.size();
    fm.num_gt = f.ground_truth.size();
    fm.matches = match_frame(f.labels, f.ground_truth);

    std::vector<double> label_iou(f.labels.size(), 0.0);
    for (const Match & m : fm.matches) {
      label_iou[m.label] = m.iou;
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        if (m.iou >= thresholds[t]) {
          ++report.recalled[t];
        }
      }
    }
    for (double iou : label_iou) {
      ++report.bucket_counts[iou_bucket(iou)];
    }
    report.total_gt += fm.num_gt;
    report.total_labels += fm.num_labels;
    report.frames.push_back(std::move(fm));
  }
  report.recall.resize(thresholds.size(), 0.0);
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    report.recall[t] = report.total_gt == 0 ? 0.0
                                            : static_cast<double>(report.recalled[t]) /
                                                static_cast<double>(report.total_gt);
  }
  report.bucket_percent = bucket_percentages(report.bucket_counts);
  return report;
}

std::string format_report_table(const QualityReport & report)
{
  std::ostringstream os;
  os << fmt::format("frames: {}  pseudo-labels: {}  ground truth: {}\n", report.frames.size(),
                    report.total_labels, report.total_gt);
  os << "\nRecall";
  for (double t : report.thresholds) {
    os << fmt::format(" | @IoU {:.1f}", t);
  }
  os << "\n      ";
  for (double r : report.recall) {
    os << fmt::format(" | {:>8.4f}", r);
  }
  os << "\n\n         | IoU<=0.5 | 0.5<IoU<0.7 | IoU>=0.7\n";
  os << fmt::format("Num.     | {:>8} | {:>11} | {:>8}\n", report.bucket_counts[0],
                    report.bucket_counts[1], report.bucket_counts[2]);
  os << fmt::format("Per. (%) | {:>8.2f} | {:>11.2f} | {:>8.2f}\n", report.bucket_percent[0],
                    report.bucket_percent[1], report.bucket_percent[2]);
  return os.str();
}

std::string format_report_json(const QualityReport & report)
{
  nlohmann::ordered_json doc;
  doc["frames"] = report.frames.size();
  doc["total_labels"] = report.total_labels;
  doc["total_gt"] = report.total_gt;
  nlohmann::ordered_json recall = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
    recall.push_back({{"iou", report.thresholds[t]},
                      {"recall", report.recall[t]},
                      {"matched_gt", report.recalled[t]}});
  }
  doc["recall"] = recall;
  static constexpr const char * kBucketNames[kNumBuckets] = {"iou_le_0.5", "iou_0.5_0.7",
                                                             "iou_ge_0.7"};
  nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < kNumBuckets; ++b) {
    buckets.push_back({{"bucket", kBucketNames[b]},
                       {"count", report.bucket_counts[b]},
                       {"percent", round_percent(report.bucket_percent[b])}});
  }
  doc["buckets"] = buckets;
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (const FrameMatches & f : report.frames) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const Match & m : f.matches) {
      pairs.push_back({{"label", m.label}, {"gt", m.gt}, {"iou", m.iou}});
    }
    frames.push_back({{"frame", f.frame_id},
                      {"labels", f.num_labels},
                      {"gt", f.num_gt},
                      {"matches", pairs}});
  }
  doc["per_frame"] = frames;
  return doc.dump(2) + "\n";
}

}  // namespace pseudobox
