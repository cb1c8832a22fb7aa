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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>
#include <unistd.h>

#include "pseudobox/config.hpp"
#include "pseudobox/errors.hpp"
#include "pseudobox/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pseudobox;

namespace
{

struct TempDir
{
  fs::path path;
  TempDir()
  {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("pseudobox_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("defaults are the reference values")
{
  const PipelineConfig c;
  CHECK(c.shrink == 0.3);
  CHECK(c.dcpg.r_init == 1.0);
  CHECK(c.dcpg.delta == 0.1);
  CHECK(c.dcpg.neighborhood_radius == 8.0);
  CHECK(c.score.mu == 0.8);
  CHECK(c.score.sigma == 0.2);
  CHECK(c.score.lambda1 == 0.5);
  CHECK(c.score.lambda2 == 0.5);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config text and overrides")
{
  PipelineConfig c;
  apply_config_text(c,
                    "# ablation\n"
                    "gamma = 0.5\n"
                    "r_init=2\n"
                    "\n"
                    "meta.Van = 5.0, 2.0, 2.2\n"
                    "workers = 4\n",
                    "test.cfg");
  CHECK(c.shrink == 0.5);
  CHECK(c.dcpg.r_init == 2.0);
  CHECK(c.workers == 4);
  CHECK(c.metas.at("Van").raw_length == 5.0);
  apply_setting(c, "lambda1", "0.3");
  apply_setting(c, "lambda2", "0.7");
  CHECK_NOTHROW(c.validate());

  CHECK_THROWS_AS(apply_setting(c, "gama", "0.1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "gamma", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "meta.Car", "1,2"), ConfigError);
  CHECK_THROWS_AS(apply_config_text(c, "no equals sign\n", "x"), ConfigError);
  CHECK(split_assignment(" a = b ") == std::pair<std::string, std::string>{"a", "b"});

  SynthConfig s;
  apply_config_text(s, "seed=9\nlayout=occluded_pair\npair_lateral=3,5\nocclusion=true\n", "s");
  CHECK(s.seed == 9);
  CHECK(s.layout == SceneLayout::kOccludedPair);
  CHECK(s.pair_lateral[1] == 5.0);
  CHECK(s.occlusion);
  CHECK_THROWS_AS(apply_setting(s, "layout", "grid"), ConfigError);
}

TEST_CASE("config hash tracks effective parameters only")
{
  PipelineConfig a;
  PipelineConfig b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 64);
  b.workers = 8;
  b.strict = true;
  b.output_dir = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.score.nms_iou = 0.2;
  CHECK(a.hash() != b.hash());
  PipelineConfig c;
  c.metas.at("Car") = MetaShape::from_extents("Car", 4.0, 1.62, 1.53);
  CHECK(a.hash() != c.hash());
}

TEST_CASE("parallel_for visits every index once and rethrows")
{
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 7, [&](std::size_t i) { hits[i]++; });
  for (const auto & h : hits) {
    CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 4) {
                                   throw std::runtime_error("boom");
                                 }
                               }),
                  std::runtime_error);
}

TEST_CASE("generate, score and eval on a synthetic dataset")
{
  TempDir tmp;
  SynthConfig synth;
  synth.seed = 31;
  cmd_synth(synth, tmp.path / "data", 10, 3);

  // One frame with no masks at all.
  {
    std::ofstream out(tmp.path / "data/masks/000009.json");
    out << R"({"image_size": [375, 1242], "instances": []})";
  }

  PipelineConfig config;
  config.dataset_root = tmp.path / "data";
  config.output_dir = tmp.path / "out";
  config.export_clusters = true;
  const RunSummary run = cmd_generate(config);
  REQUIRE(run.frames.size() == 10);
  CHECK(run.failed == 0);
  for (const auto & f : run.frames) {
    CHECK(fs::exists(tmp.path / "out/label_2" / (f.frame_id + ".txt")));
  }
  CHECK(slurp(tmp.path / "out/label_2/000009.txt").empty());
  CHECK(run.frames[9].kept.empty());
  CHECK(fs::is_directory(tmp.path / "out/clusters"));

  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "out/manifest.json"));
  CHECK(manifest["frame_count"] == 10);
  CHECK(manifest["config_hash"] == config.hash());
  std::size_t kept = 0;
  std::size_t lines = 0;
  for (const auto & f : manifest["frames"]) {
    kept += f["kept"].get<std::size_t>();
    CHECK(f["kept"].get<std::size_t>() <= f["scored"].get<std::size_t>());
    CHECK(f["scored"].get<std::size_t>() <= f["proposals"].get<std::size_t>());
  }
  for (const auto & f : run.frames) {
    const std::string text = slurp(tmp.path / "out/label_2" / (f.frame_id + ".txt"));
    lines += static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }
  CHECK(manifest["totals"]["kept"] == kept);
  CHECK(lines == kept);

  SUBCASE("same config, same bytes")
  {
    PipelineConfig again = config;
    again.output_dir = tmp.path / "again";
    again.workers = 5;
    again.export_clusters = false;
    cmd_generate(again);
    for (const auto & f : run.frames) {
      const std::string name = "label_2/" + f.frame_id + ".txt";
      CHECK(slurp(tmp.path / "out" / name) == slurp(tmp.path / "again" / name));
    }
    CHECK(slurp(tmp.path / "out/manifest.json") == slurp(tmp.path / "again/manifest.json"));
  }

  SUBCASE("ground truth against itself")
  {
    PipelineConfig ev = config;
    ev.output_dir = tmp.path / "eval_gt";
    const QualityReport r = cmd_eval(ev, tmp.path / "data/label_2", tmp.path / "data/label_2");
    for (double rec : r.recall) {
      CHECK(rec == 1.0);
    }
    CHECK(fs::exists(tmp.path / "eval_gt/report.json"));
    CHECK(fs::exists(tmp.path / "eval_gt/report.txt"));
  }

  SUBCASE("empty label directory")
  {
    fs::create_directories(tmp.path / "empty");
    PipelineConfig ev = config;
    ev.output_dir = tmp.path / "eval_empty";
    const QualityReport r = cmd_eval(ev, tmp.path / "empty", tmp.path / "data/label_2");
    for (double rec : r.recall) {
      CHECK(rec == 0.0);
    }
  }

  SUBCASE("eval files match an in-process evaluation")
  {
    PipelineConfig ev = config;
    ev.output_dir = tmp.path / "eval_run";
    const QualityReport r = cmd_eval(ev, tmp.path / "out/label_2", tmp.path / "data/label_2");
    std::vector<FrameLabels> frames;
    const DatasetLayout layout{config.dataset_root};
    for (const std::string & id : layout.frames()) {
      const CalibrationSet calib = layout.load(id).calib;
      FrameLabels f;
      f.frame_id = id;
      for (auto & l : read_labels(tmp.path / "out/label_2" / (id + ".txt"), calib)) {
        f.labels.push_back(l.labeled);
      }
      for (auto & l : read_labels(tmp.path / "data/label_2" / (id + ".txt"), calib)) {
        f.ground_truth.push_back(l.labeled);
      }
      frames.push_back(f);
    }
    const QualityReport direct = match_and_recall(frames);
    CHECK(slurp(tmp.path / "eval_run/report.json") == format_report_json(direct));
    CHECK(r.recall == direct.recall);
    CHECK(r.recall[1] > 0.5);
  }

  SUBCASE("missing frames are skipped")
  {
    fs::create_directories(tmp.path / "partial");
    fs::copy_file(tmp.path / "out/label_2/000000.txt", tmp.path / "partial/000000.txt");
    PipelineConfig ev = config;
    ev.output_dir = tmp.path / "eval_partial";
    const QualityReport r = cmd_eval(ev, tmp.path / "partial", tmp.path / "data/label_2");
    CHECK(r.frames.size() == 1);
  }

  SUBCASE("re-scoring kept labels keeps them")
  {
    PipelineConfig sc = config;
    sc.output_dir = tmp.path / "rescored";
    const RunSummary rescored = cmd_score(sc, tmp.path / "out/label_2");
    CHECK(rescored.failed == 0);
    for (std::size_t i = 0; i < run.frames.size(); ++i) {
      CHECK(rescored.frames[i].proposals == run.frames[i].kept.size());
    }
  }
}

TEST_CASE("failing frames are recorded, not fatal")
{
  TempDir tmp;
  SynthConfig synth;
  cmd_synth(synth, tmp.path / "data", 3, 1);
  {
    std::ofstream out(tmp.path / "data/calib/000001.txt");
    out << "P2: 1 2 3\n";
  }
  PipelineConfig config;
  config.dataset_root = tmp.path / "data";
  config.output_dir = tmp.path / "out";
  const RunSummary run = cmd_generate(config);
  CHECK(run.failed == 1);
  CHECK_FALSE(run.frames[1].ok);
  CHECK(run.frames[1].error.find("P2") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(tmp.path / "out/manifest.json"));
  CHECK(manifest["failed_count"] == 1);
}
