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

#include "pseudobox/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "pseudobox/errors.hpp"

namespace pseudobox
{

namespace
{

std::string trim(std::string s)
{
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double to_double(const std::string & key, const std::string & value)
{
  double out = 0.0;
  const char * first = value.data();
  const char * last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

std::size_t to_count(const std::string & key, const std::string & value)
{
  std::uint64_t out = 0;
  const char * first = value.data();
  const char * last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("'" + key + "' expects a nonnegative integer, got '" + value + "'");
  }
  return static_cast<std::size_t>(out);
}

bool to_bool(const std::string & key, const std::string & value)
{
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw ConfigError("'" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<double> to_list(const std::string & key, const std::string & value)
{
  std::string normalized = value;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream is(normalized);
  std::vector<double> out;
  std::string token;
  while (is >> token) {
    out.push_back(to_double(key, token));
  }
  return out;
}

std::string num(double v)
{
  return fmt::format("{:.17g}", v);
}

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string & text)
{
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected key=value, got '" + text + "'");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

void PipelineConfig::validate() const
{
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  dcpg.validate();
  fit.validate();
  score.validate();
  if (workers < 1) {
    throw ConfigError("workers must be at least 1");
  }
}

std::string PipelineConfig::canonical() const
{
  std::vector<std::string> lines = {
    "dataset_root=" + dataset_root.lexically_normal().generic_string(),
    "gamma=" + num(shrink),
    "r_init=" + num(dcpg.r_init),
    "delta=" + num(dcpg.delta),
    "min_pts=" + std::to_string(dcpg.min_pts),
    "neighborhood_radius=" + num(dcpg.neighborhood_radius),
    "max_radii=" + std::to_string(dcpg.max_radii),
    "min_seed_containment=" + num(dcpg.min_seed_containment),
    "fit_yaw_step_deg=" + num(fit.yaw_step_deg),
    "fit_min_edge_distance=" + num(fit.min_edge_distance),
    "fit_min_extent=" + num(fit.min_extent),
    "mu=" + num(score.mu),
    "sigma=" + num(score.sigma),
    "lambda1=" + num(score.lambda1),
    "lambda2=" + num(score.lambda2),
    "nms_iou=" + num(score.nms_iou),
    "boundary_uses_height=" + std::string(score.boundary_uses_height ? "true" : "false"),
  };
  for (const auto & [name, m] : metas) {
    lines.push_back("meta." + name + "=" + num(m.raw_length) + "," + num(m.raw_width) + "," +
                    num(m.raw_height));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto & l : lines) {
    out += l + "\n";
  }
  return out;
}

std::string PipelineConfig::hash() const
{
  const std::string text = canonical();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

void apply_setting(PipelineConfig & c, const std::string & key, const std::string & value)
{
  if (key == "dataset_root") {
    c.dataset_root = value;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "gamma" || key == "shrink") {
    c.shrink = to_double(key, value);
  } else if (key == "r_init") {
    c.dcpg.r_init = to_double(key, value);
  } else if (key == "delta") {
    c.dcpg.delta = to_double(key, value);
  } else if (key == "min_pts") {
    c.dcpg.min_pts = to_count(key, value);
  } else if (key == "neighborhood_radius") {
    c.dcpg.neighborhood_radius = to_double(key, value);
  } else if (key == "max_radii") {
    c.dcpg.max_radii = to_count(key, value);
  } else if (key == "min_seed_containment") {
    c.dcpg.min_seed_containment = to_double(key, value);
  } else if (key == "fit_yaw_step_deg") {
    c.fit.yaw_step_deg = to_double(key, value);
  } else if (key == "fit_min_edge_distance") {
    c.fit.min_edge_distance = to_double(key, value);
  } else if (key == "fit_min_extent") {
    c.fit.min_extent = to_double(key, value);
  } else if (key == "mu") {
    c.score.mu = to_double(key, value);
  } else if (key == "sigma") {
    c.score.sigma = to_double(key, value);
  } else if (key == "lambda1") {
    c.score.lambda1 = to_double(key, value);
  } else if (key == "lambda2") {
    c.score.lambda2 = to_double(key, value);
  } else if (key == "nms_iou") {
    c.score.nms_iou = to_double(key, value);
  } else if (key == "boundary_uses_height") {
    c.score.boundary_uses_height = to_bool(key, value);
  } else if (key == "workers") {
    c.workers = to_count(key, value);
  } else if (key == "strict") {
    c.strict = to_bool(key, value);
  } else if (key == "export_clusters") {
    c.export_clusters = to_bool(key, value);
  } else if (key.starts_with("meta.")) {
    const std::string name = key.substr(5);
    const auto v = to_list(key, value);
    if (name.empty() || v.size() != 3) {
      throw ConfigError("'" + key + "' expects three extents l,w,h");
    }
    c.metas.insert_or_assign(name, MetaShape::from_extents(name, v[0], v[1], v[2]));
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void apply_setting(SynthConfig & c, const std::string & key, const std::string & value)
{
  if (key == "seed") {
    c.seed = to_count(key, value);
  } else if (key == "min_objects") {
    c.min_objects = to_count(key, value);
  } else if (key == "max_objects") {
    c.max_objects = to_count(key, value);
  } else if (key == "min_points") {
    c.min_points_per_object = to_count(key, value);
  } else if (key == "max_points") {
    c.max_points_per_object = to_count(key, value);
  } else if (key == "surface_noise") {
    c.surface_noise = to_double(key, value);
  } else if (key == "clutter_points") {
    c.clutter_points = to_count(key, value);
  } else if (key == "clutter_clearance") {
    c.clutter_clearance = to_double(key, value);
  } else if (key == "x_min") {
    c.x_min = to_double(key, value);
  } else if (key == "x_max") {
    c.x_max = to_double(key, value);
  } else if (key == "lateral_ratio") {
    c.lateral_ratio = to_double(key, value);
  } else if (key == "min_gap") {
    c.min_gap = to_double(key, value);
  } else if (key == "max_attempts") {
    c.max_attempts = to_count(key, value);
  } else if (key == "layout") {
    if (value == "scatter") {
      c.layout = SceneLayout::kScatter;
    } else if (value == "occluded_pair") {
      c.layout = SceneLayout::kOccludedPair;
    } else {
      throw ConfigError("layout must be 'scatter' or 'occluded_pair'");
    }
  } else if (key == "pair_depth" || key == "pair_lateral") {
    const auto v = to_list(key, value);
    if (v.size() != 2 || v[1] < v[0]) {
      throw ConfigError("'" + key + "' expects a range lo,hi");
    }
    (key == "pair_depth" ? c.pair_depth : c.pair_lateral) = {v[0], v[1]};
  } else if (key == "mask_margin_px") {
    c.mask_margin_px = static_cast<int>(to_count(key, value));
  } else if (key == "occlusion") {
    c.occlusion = to_bool(key, value);
  } else if (key == "noisy_masks") {
    c.noisy_masks = to_bool(key, value);
  } else if (key == "mask_inflation") {
    c.mask_inflation = to_double(key, value);
  } else {
    throw ConfigError("unknown synth configuration key '" + key + "'");
  }
}

template <typename Config>
void apply_config_text(Config & config, const std::string & text, const std::string & source)
{
  std::istringstream is(text);
  std::string line;
  std::size_t ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    try {
      const auto [key, value] = split_assignment(line);
      apply_setting(config, key, value);
    } catch (const ConfigError & e) {
      throw ConfigError(source + ":" + std::to_string(ln) + ": " + e.what());
    }
  }
}

template void apply_config_text<PipelineConfig>(PipelineConfig &, const std::string &,
                                                const std::string &);
template void apply_config_text<SynthConfig>(SynthConfig &, const std::string &,
                                             const std::string &);

namespace
{

std::string slurp(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path & path)
{
  PipelineConfig c;
  apply_config_text(c, slurp(path), path.string());
  return c;
}

SynthConfig load_synth_config(const std::filesystem::path & path)
{
  SynthConfig c;
  apply_config_text(c, slurp(path), path.string());
  return c;
}

}  // namespace pseudobox
