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
#include <string>

#include "pseudobox/box_fitting.hpp"
#include "pseudobox/dcpg.hpp"
#include "pseudobox/scoring.hpp"
#include "pseudobox/synth.hpp"

namespace pseudobox
{

/// Everything `generate`, `score` and `eval` need. Defaults reproduce the
/// reference settings: shrink 0.3, r_init 1 m, delta 0.1 m, 8 m neighbourhood,
/// N(0.8, 0.2) boundary prior and equal DS weights.
struct PipelineConfig
{
  std::filesystem::path dataset_root = ".";
  std::filesystem::path output_dir = "output";
  double shrink = 0.3;
  DcpgParams dcpg;
  FitParams fit;
  ScoreParams score;
  MetaShapeTable metas = default_meta_shapes();
  std::size_t workers = 1;
  bool strict = false;
  bool export_clusters = false;

  void validate() const;

  /// Sorted `key=value` lines of every parameter that can change results.
  /// Execution settings (workers, strict, output_dir, export_clusters) are excluded.
  std::string canonical() const;
  /// SHA-256 hex digest of canonical().
  std::string hash() const;
};

/// Applies one `key=value` setting. Throws ConfigError for unknown keys or bad values.
void apply_setting(PipelineConfig & config, const std::string & key, const std::string & value);
void apply_setting(SynthConfig & config, const std::string & key, const std::string & value);

/// Splits "key=value"; throws ConfigError without '='.
std::pair<std::string, std::string> split_assignment(const std::string & text);

/// Key-value document: one `key = value` per line, '#' starts a comment.
template <typename Config>
void apply_config_text(Config & config, const std::string & text, const std::string & source);

PipelineConfig load_pipeline_config(const std::filesystem::path & path);
SynthConfig load_synth_config(const std::filesystem::path & path);

}  // namespace pseudobox
