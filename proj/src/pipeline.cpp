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

#include "pseudobox/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "pseudobox/dcpg.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/log.hpp"
#include "pseudobox/seeds.hpp"

namespace pseudobox
{

namespace fs = std::filesystem;

std::vector<ScoredProposal> rescore(const PointCloud & cloud, std::span<const Proposal> proposals,
                                    const PipelineConfig & config)
{
  std::vector<ScoredProposal> scored = score_proposals(cloud, proposals, config.metas, config.score);
  return nms(std::move(scored), config.score.nms_iou);
}

FrameResult process_frame(const FrameBundle & bundle, const PipelineConfig & config)
{
  FrameResult r;
  r.frame_id = bundle.frame_id;
  const auto seeds = extract_seed_points(bundle.cloud, bundle.masks, bundle.calib, config.shrink);
  r.seed_sets = seeds.size();
  for (const auto & s : seeds) {
    r.seed_points += s.count();
  }
  const auto proposals = generate_proposals(bundle.cloud, seeds, config.dcpg, config.fit);
  r.proposals = proposals.size();
  auto scored = score_proposals(bundle.cloud, proposals, config.metas, config.score);
  r.scored = scored.size();
  r.kept = nms(std::move(scored), config.score.nms_iou);
  return r;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> & fn)
{
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

std::size_t RunSummary::total(std::size_t FrameResult::*field) const
{
  std::size_t acc = 0;
  for (const auto & f : frames) {
    acc += f.*field;
  }
  return acc;
}

namespace
{

void write_text(const fs::path & path, const std::string & text)
{
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << text;
}

void export_clusters(const fs::path & dir, const FrameBundle & bundle,
                     std::span<const ScoredProposal> kept)
{
  for (std::size_t k = 0; k < kept.size(); ++k) {
    std::string text;
    for (std::size_t i : kept[k].proposal.cluster) {
      const Point3 & p = bundle.cloud.points[i];
      text += fmt::format("{:.4f} {:.4f} {:.4f}\n", p.x(), p.y(), p.z());
    }
    text += "# box corners\n";
    for (const Point3 & c : box_corners(kept[k].proposal.box)) {
      text += fmt::format("{:.4f} {:.4f} {:.4f}\n", c.x(), c.y(), c.z());
    }
    write_text(dir / fmt::format("{}_{:03d}.txt", bundle.frame_id, k), text);
  }
}

using FrameJob = std::function<FrameResult(const FrameBundle &)>;

RunSummary run_frames(const PipelineConfig & config, const FrameJob & job)
{
  config.validate();
  const DatasetLayout layout{config.dataset_root};
  const std::vector<std::string> ids = layout.frames();
  const fs::path label_dir = config.output_dir / "label_2";
  fs::create_directories(label_dir);

  RunSummary summary;
  summary.config_hash = config.hash();
  summary.frames.resize(ids.size());

  parallel_for(ids.size(), config.workers, [&](std::size_t i) {
    FrameResult & r = summary.frames[i];
    r.frame_id = ids[i];
    try {
      const FrameBundle bundle = layout.load(ids[i]);
      r = job(bundle);
      write_labels(label_dir / (ids[i] + ".txt"), r.kept, bundle.calib);
      if (config.export_clusters) {
        export_clusters(config.output_dir / "clusters", bundle, r.kept);
      }
      logger()->info("event=frame_done frame={} seeds={} proposals={} kept={}", r.frame_id,
                     r.seed_points, r.proposals, r.kept.size());
    } catch (const std::exception & e) {
      r.ok = false;
      r.error = e.what();
      logger()->error("event=frame_failed frame={} error=\"{}\"", ids[i], e.what());
    }
  });

  for (const auto & f : summary.frames) {
    summary.failed += f.ok ? 0 : 1;
  }
  write_text(config.output_dir / "manifest.json", format_manifest(summary, config));
  return summary;
}

}  // namespace

std::string format_manifest(const RunSummary & summary, const PipelineConfig & config)
{
  nlohmann::ordered_json doc;
  doc["config_hash"] = summary.config_hash;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::istringstream is(config.canonical());
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    params[line.substr(0, eq)] = line.substr(eq + 1);
  }
  doc["config"] = params;
  doc["frame_count"] = summary.frames.size();
  doc["failed_count"] = summary.failed;
  std::size_t kept = 0;
  for (const auto & f : summary.frames) {
    kept += f.kept.size();
  }
  doc["totals"] = {{"seed_sets", summary.total(&FrameResult::seed_sets)},
                   {"seed_points", summary.total(&FrameResult::seed_points)},
                   {"proposals", summary.total(&FrameResult::proposals)},
                   {"scored", summary.total(&FrameResult::scored)},
                   {"kept", kept}};
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (const auto & f : summary.frames) {
    nlohmann::ordered_json entry;
    entry["frame"] = f.frame_id;
    entry["ok"] = f.ok;
    entry["seed_sets"] = f.seed_sets;
    entry["seed_points"] = f.seed_points;
    entry["proposals"] = f.proposals;
    entry["scored"] = f.scored;
    entry["kept"] = f.kept.size();
    if (!f.ok) {
      entry["error"] = f.error;
    }
    frames.push_back(std::move(entry));
  }
  doc["frames"] = frames;
  return doc.dump(2) + "\n";
}

RunSummary cmd_generate(const PipelineConfig & config)
{
  return run_frames(config, [&](const FrameBundle & bundle) {
    return process_frame(bundle, config);
  });
}

RunSummary cmd_score(const PipelineConfig & config, const fs::path & proposal_dir)
{
  return run_frames(config, [&](const FrameBundle & bundle) {
    FrameResult r;
    r.frame_id = bundle.frame_id;
    const fs::path file = proposal_dir / (bundle.frame_id + ".txt");
    if (!fs::exists(file)) {
      return r;
    }
    std::vector<Proposal> proposals;
    int index = 0;
    for (auto & label : read_labels(file, bundle.calib)) {
      Proposal p{label.labeled.box, index++, label.labeled.class_name, 0.0, 0,
                 points_in_box(bundle.cloud, label.labeled.box)};
      proposals.push_back(std::move(p));
    }
    r.proposals = proposals.size();
    auto scored = score_proposals(bundle.cloud, proposals, config.metas, config.score);
    r.scored = scored.size();
    r.kept = nms(std::move(scored), config.score.nms_iou);
    return r;
  });
}

QualityReport cmd_eval(const PipelineConfig & config, const fs::path & label_dir,
                       const fs::path & gt_dir)
{
  const DatasetLayout layout{config.dataset_root};
  auto list = [](const fs::path & dir) {
    std::set<std::string> ids;
    if (fs::is_directory(dir)) {
      for (const auto & e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") {
          ids.insert(e.path().stem().string());
        }
      }
    }
    return ids;
  };
  const std::set<std::string> labels = list(label_dir);
  const std::set<std::string> gts = list(gt_dir);

  std::vector<FrameLabels> frames;
  for (const std::string & id : gts) {
    if (!labels.contains(id)) {
      logger()->warn("event=missing_labels frame={}", id);
      continue;
    }
    const CalibrationSet calib = read_calib(layout.calib(id));
    FrameLabels f;
    f.frame_id = id;
    for (auto & l : read_labels(label_dir / (id + ".txt"), calib)) {
      f.labels.push_back(std::move(l.labeled));
    }
    for (auto & l : read_labels(gt_dir / (id + ".txt"), calib)) {
      f.ground_truth.push_back(std::move(l.labeled));
    }
    frames.push_back(std::move(f));
  }
  for (const std::string & id : labels) {
    if (!gts.contains(id)) {
      logger()->warn("event=missing_ground_truth frame={}", id);
    }
  }

  QualityReport report = match_and_recall(frames);
  write_text(config.output_dir / "report.txt", format_report_table(report));
  write_text(config.output_dir / "report.json", format_report_json(report));
  return report;
}

void cmd_synth(const SynthConfig & config, const fs::path & root, std::size_t frames,
               std::size_t workers)
{
  config.validate();
  const DatasetLayout layout{root};
  parallel_for(frames, workers, [&](std::size_t i) {
    layout.store(sample_scene(config, i).bundle);
  });
}

}  // namespace pseudobox
