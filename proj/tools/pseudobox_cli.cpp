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

// Batch front end: synth -> generate -> eval, plus re-scoring of existing proposals.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "pseudobox/config.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/eval.hpp"
#include "pseudobox/log.hpp"
#include "pseudobox/pipeline.hpp"

namespace
{

template <typename Config>
void apply_overrides(Config & config, const std::vector<std::string> & sets)
{
  for (const auto & s : sets) {
    const auto [key, value] = pseudobox::split_assignment(s);
    pseudobox::apply_setting(config, key, value);
  }
}

pseudobox::PipelineConfig pipeline_config(const std::string & path,
                                          const std::vector<std::string> & sets,
                                          std::optional<std::size_t> workers)
{
  pseudobox::PipelineConfig config =
    path.empty() ? pseudobox::PipelineConfig{} : pseudobox::load_pipeline_config(path);
  apply_overrides(config, sets);
  if (workers) {
    config.workers = *workers;
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Pseudo-label generation from LiDAR point clouds and 2D instance masks"};
  app.require_subcommand(1);

  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log per-frame progress to stderr");

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::size_t> workers;
  bool strict = false;

  auto add_common = [&](CLI::App * cmd) {
    cmd->add_option("--config", config_path, "Key-value configuration file");
    cmd->add_option("--set", sets, "Override one setting, key=value (repeatable)");
    cmd->add_option("--workers", workers, "Frame-level worker threads")
      ->check(CLI::PositiveNumber);
  };

  auto * generate = app.add_subcommand("generate", "Generate pseudo-labels for a dataset");
  add_common(generate);
  generate->add_flag("--strict", strict, "Exit nonzero if any frame fails");
  bool export_clusters = false;
  generate->add_flag("--export-clusters", export_clusters,
                     "Write kept clusters and box corners as plain-text point lists");

  auto * score = app.add_subcommand("score", "Re-score existing KITTI-format proposals");
  add_common(score);
  score->add_flag("--strict", strict, "Exit nonzero if any frame fails");
  std::string proposal_dir;
  score->add_option("--proposals", proposal_dir, "Directory of <frame>.txt proposals")
    ->required();

  auto * eval = app.add_subcommand("eval", "Evaluate pseudo-labels against ground truth");
  add_common(eval);
  std::string label_dir;
  std::string gt_dir;
  eval->add_option("--labels", label_dir, "Directory of pseudo-label files")->required();
  eval->add_option("--gt", gt_dir, "Ground-truth label directory (default <dataset>/label_2)");

  auto * synth = app.add_subcommand("synth", "Write a synthetic dataset");
  std::string synth_config;
  std::vector<std::string> synth_sets;
  std::string synth_out;
  std::size_t frames = 10;
  std::size_t synth_workers = 1;
  synth->add_option("--config", synth_config, "Synth key-value configuration file");
  synth->add_option("--set", synth_sets, "Override one synth setting, key=value");
  synth->add_option("--out", synth_out, "Dataset root to write")->required();
  synth->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
  synth->add_option("--workers", synth_workers, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (verbose) {
    pseudobox::logger()->set_level(spdlog::level::info);
  }

  try {
    if (*generate || *score) {
      auto config = pipeline_config(config_path, sets, workers);
      config.strict = config.strict || strict;
      config.export_clusters = config.export_clusters || export_clusters;
      const auto summary = *generate ? pseudobox::cmd_generate(config)
                                     : pseudobox::cmd_score(config, proposal_dir);
      std::size_t kept = 0;
      for (const auto & f : summary.frames) {
        kept += f.kept.size();
      }
      std::cerr << "frames=" << summary.frames.size() << " failed=" << summary.failed
                << " kept=" << kept << " config_hash=" << summary.config_hash << "\n";
      return summary.failed > 0 && config.strict ? EXIT_FAILURE : EXIT_SUCCESS;
    }
    if (*eval) {
      const auto config = pipeline_config(config_path, sets, workers);
      const std::string gt = gt_dir.empty() ? (config.dataset_root / "label_2").string() : gt_dir;
      const auto report = pseudobox::cmd_eval(config, label_dir, gt);
      std::cout << pseudobox::format_report_table(report);
      return EXIT_SUCCESS;
    }
    if (*synth) {
      pseudobox::SynthConfig config =
        synth_config.empty() ? pseudobox::SynthConfig{} : pseudobox::load_synth_config(synth_config);
      apply_overrides(config, synth_sets);
      pseudobox::cmd_synth(config, synth_out, frames, synth_workers);
      std::cerr << "wrote " << frames << " frames to " << synth_out << "\n";
      return EXIT_SUCCESS;
    }
  } catch (const pseudobox::ConfigError & e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
