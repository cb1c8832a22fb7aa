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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "pseudobox/config.hpp"
#include "pseudobox/eval.hpp"
#include "pseudobox/kitti_io.hpp"
#include "pseudobox/scoring.hpp"
#include "pseudobox/synth.hpp"

namespace pseudobox
{

struct FrameResult
{
  std::string frame_id;
  std::size_t seed_sets = 0;
  std::size_t seed_points = 0;
  std::size_t proposals = 0;
  std::size_t scored = 0;
  std::vector<ScoredProposal> kept;
  bool ok = true;
  std::string error;
};

/// seeds -> multi-radius proposals -> DS scores -> NMS for one frame.
FrameResult process_frame(const FrameBundle & bundle, const PipelineConfig & config);

/// Scores caller-supplied proposals and runs NMS (used by `score` and tests).
std::vector<ScoredProposal> rescore(const PointCloud & cloud, std::span<const Proposal> proposals,
                                    const PipelineConfig & config);

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
/// rethrown after all workers finish (the first by index wins).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> & fn);

struct RunSummary
{
  std::string config_hash;
  std::vector<FrameResult> frames;
  std::size_t failed = 0;

  std::size_t total(std::size_t FrameResult::*field) const;
};

/// Labels go to <output_dir>/label_2/<frame>.txt, the manifest to
/// <output_dir>/manifest.json. A failed frame is logged and skipped.
RunSummary cmd_generate(const PipelineConfig & config);

/// Re-scores KITTI-format proposals found in `proposal_dir`, writing the kept
/// boxes like cmd_generate.
RunSummary cmd_score(const PipelineConfig & config, const std::filesystem::path & proposal_dir);

/// Evaluates `label_dir` against `gt_dir` on the frames present in both.
/// Calibration is read from the config's dataset root. Writes
/// <output_dir>/report.txt and <output_dir>/report.json.
QualityReport cmd_eval(const PipelineConfig & config, const std::filesystem::path & label_dir,
                       const std::filesystem::path & gt_dir);

/// Writes `frames` synthetic frames in the dataset layout under `root`.
void cmd_synth(const SynthConfig & config, const std::filesystem::path & root,
               std::size_t frames, std::size_t workers = 1);

std::string format_manifest(const RunSummary & summary, const PipelineConfig & config);

}  // namespace pseudobox
