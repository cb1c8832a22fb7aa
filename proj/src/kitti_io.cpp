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

#include "pseudobox/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "pseudobox/errors.hpp"
#include "pseudobox/log.hpp"

namespace pseudobox
{

namespace fs = std::filesystem;

namespace
{

std::string read_file(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MalformedFileError(path.string(), "cannot open file");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path & path, const std::string & data)
{
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

std::vector<std::string_view> split_ws(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    if (j > i) {
      out.push_back(line.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

// Locale-independent; the whole token must be consumed.
bool parse_double(std::string_view token, double & value)
{
  const char * first = token.data();
  const char * last = token.data() + token.size();
  if (first != last && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && std::isfinite(value);
}

std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string fmt_row(const double * values, std::size_t n)
{
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    out += fmt::format("{}{}", i == 0 ? "" : " ", values[i]);
  }
  return out;
}

// Avoids "-0.00" so that label files do not depend on the sign of tiny values.
double tidy(double v, double resolution)
{
  return std::abs(v) < 0.5 * resolution ? 0.0 : v;
}

}  // namespace

PointCloud read_point_cloud(const fs::path & path)
{
  const std::string bytes = read_file(path);
  if (bytes.size() % 16 != 0) {
    throw MalformedFileError(path.string(), "byte length " + std::to_string(bytes.size()) +
                                              " is not a multiple of 16");
  }
  const std::size_t n = bytes.size() / 16;
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.intensity.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    float v[4];
    for (int k = 0; k < 4; ++k) {
      std::uint32_t raw;
      std::memcpy(&raw, bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, 4);
      if constexpr (std::endian::native == std::endian::big) {
        raw = __builtin_bswap32(raw);
      }
      v[k] = std::bit_cast<float>(raw);
      if (!std::isfinite(v[k])) {
        throw MalformedFileError(path.string(), "non-finite value in point " + std::to_string(i));
      }
    }
    cloud.points.emplace_back(v[0], v[1], v[2]);
    cloud.intensity.push_back(v[3]);
  }
  return cloud;
}

void write_point_cloud(const fs::path & path, const PointCloud & cloud)
{
  cloud.validate();
  std::string bytes(cloud.size() * 16, '\0');
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const float v[4] = {static_cast<float>(cloud.points[i].x()),
                        static_cast<float>(cloud.points[i].y()),
                        static_cast<float>(cloud.points[i].z()),
                        cloud.intensity.empty() ? 0.0f : cloud.intensity[i]};
    for (int k = 0; k < 4; ++k) {
      auto raw = std::bit_cast<std::uint32_t>(v[k]);
      if constexpr (std::endian::native == std::endian::big) {
        raw = __builtin_bswap32(raw);
      }
      std::memcpy(bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, &raw, 4);
    }
  }
  write_file(path, bytes);
}

CalibrationSet parse_calib(const std::string & text, const std::string & source)
{
  std::map<std::string, std::vector<double>, std::less<>> entries;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const std::string_view line = lines[ln];
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (!split_ws(line).empty()) {
        throw MalformedFileError(source, "expected 'key: values'", ln + 1);
      }
      continue;
    }
    std::string key(line.substr(0, colon));
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::vector<double> values;
    for (std::string_view tok : split_ws(line.substr(colon + 1))) {
      double v = 0.0;
      if (!parse_double(tok, v)) {
        throw MalformedFileError(source, "bad number '" + std::string(tok) + "' for " + key,
                                 ln + 1);
      }
      values.push_back(v);
    }
    entries[key] = std::move(values);
  }

  auto take = [&](const char * key, std::size_t count) -> const std::vector<double> & {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      throw MalformedFileError(source, std::string("missing calibration key ") + key);
    }
    if (it->second.size() != count) {
      throw MalformedFileError(source, std::string(key) + " needs " + std::to_string(count) +
                                         " values, got " + std::to_string(it->second.size()));
    }
    return it->second;
  };

  CalibrationSet calib;
  const auto & p = take("P2", 12);
  const auto & r = take("R0_rect", 9);
  const auto & t = take("Tr_velo_to_cam", 12);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      calib.projection(i, j) = p[static_cast<std::size_t>(i * 4 + j)];
      calib.lidar_to_camera(i, j) = t[static_cast<std::size_t>(i * 4 + j)];
    }
    for (int j = 0; j < 3; ++j) {
      calib.rectification(i, j) = r[static_cast<std::size_t>(i * 3 + j)];
    }
  }
  if (entries.contains("image_size")) {
    const auto & sz = take("image_size", 2);
    if (sz[0] != std::floor(sz[0]) || sz[1] != std::floor(sz[1]) || sz[0] <= 0 || sz[1] <= 0) {
      throw MalformedFileError(source, "image_size must be two positive integers");
    }
    calib.image_height = static_cast<int>(sz[0]);
    calib.image_width = static_cast<int>(sz[1]);
  }
  try {
    calib.validate();
  } catch (const InputError & e) {
    throw MalformedFileError(source, e.what());
  }
  return calib;
}

CalibrationSet read_calib(const fs::path & path)
{
  return parse_calib(read_file(path), path.string());
}

void write_calib(const fs::path & path, const CalibrationSet & calib)
{
  double p[12];
  double t[12];
  double r[9];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      p[i * 4 + j] = calib.projection(i, j);
      t[i * 4 + j] = calib.lidar_to_camera(i, j);
    }
    for (int j = 0; j < 3; ++j) {
      r[i * 3 + j] = calib.rectification(i, j);
    }
  }
  std::string out;
  out += "P2: " + fmt_row(p, 12) + "\n";
  out += "R0_rect: " + fmt_row(r, 9) + "\n";
  out += "Tr_velo_to_cam: " + fmt_row(t, 12) + "\n";
  if (calib.image_height > 0 && calib.image_width > 0) {
    out += fmt::format("image_size: {} {}\n", calib.image_height, calib.image_width);
  }
  write_file(path, out);
}

std::string format_label_line(const std::string & class_name, const OrientedBox3D & box,
                              double score, const CalibrationSet & calib, bool * projected)
{
  const Point3 bottom = box.center() - Point3(0.0, 0.0, 0.5 * box.height());
  const Point3 loc = calib.lidar_to_rect(bottom);
  const Point3 heading =
    calib.lidar_direction_to_rect(Point3(std::cos(box.yaw()), std::sin(box.yaw()), 0.0));
  const double ry = wrap_angle(std::atan2(-heading.z(), heading.x()));
  const double alpha = wrap_angle(ry - std::atan2(loc.x(), loc.z()));

  double left = std::numeric_limits<double>::infinity();
  double top = std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  double bottom_px = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Point3 & corner : box_corners(box)) {
    const Point3 rect = calib.lidar_to_rect(corner);
    const Eigen::Vector3d h = calib.projection * rect.homogeneous();
    if (!(rect.z() > 0.0) || !(h.z() > 0.0)) {
      continue;
    }
    any = true;
    left = std::min(left, h.x() / h.z());
    right = std::max(right, h.x() / h.z());
    top = std::min(top, h.y() / h.z());
    bottom_px = std::max(bottom_px, h.y() / h.z());
  }
  std::array<double, 4> bbox{0.0, 0.0, 0.0, 0.0};
  if (any) {
    const double max_u = std::max(0, calib.image_width - 1);
    const double max_v = std::max(0, calib.image_height - 1);
    bbox = {std::clamp(left, 0.0, max_u), std::clamp(top, 0.0, max_v),
            std::clamp(right, 0.0, max_u), std::clamp(bottom_px, 0.0, max_v)};
  }
  if (projected != nullptr) {
    *projected = any;
  }
  constexpr double r2 = 0.01;
  return fmt::format(
    "{} 0.00 0 {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f} "
    "{:.2f} {:.4f}",
    class_name, tidy(alpha, r2), tidy(bbox[0], r2), tidy(bbox[1], r2), tidy(bbox[2], r2),
    tidy(bbox[3], r2), box.height(), box.width(), box.length(), tidy(loc.x(), r2),
    tidy(loc.y(), r2), tidy(loc.z(), r2), tidy(ry, r2), tidy(score, 1e-4));
}

namespace
{

void write_lines(const fs::path & path, std::span<const LabeledBox> labels,
                 const CalibrationSet & calib)
{
  std::string out;
  for (const LabeledBox & l : labels) {
    bool projected = true;
    out += format_label_line(l.class_name, l.box, l.score, calib, &projected);
    out += '\n';
    if (!projected) {
      logger()->warn("event=unprojectable_box file={} class={}", path.string(), l.class_name);
    }
  }
  write_file(path, out);
}

}  // namespace

void write_labels(const fs::path & path, std::span<const ScoredProposal> labels,
                  const CalibrationSet & calib)
{
  std::vector<LabeledBox> boxes;
  boxes.reserve(labels.size());
  for (const ScoredProposal & s : labels) {
    boxes.push_back({s.proposal.class_name, s.proposal.box, s.ds});
  }
  write_lines(path, boxes, calib);
}

void write_labels(const fs::path & path, std::span<const LabeledBox> labels,
                  const CalibrationSet & calib)
{
  write_lines(path, labels, calib);
}

std::vector<KittiLabel> parse_labels(const std::string & text, const CalibrationSet & calib,
                                     const std::string & source)
{
  std::vector<KittiLabel> out;
  const auto lines = split_lines(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto tokens = split_ws(lines[ln]);
    if (tokens.empty()) {
      continue;
    }
    if (tokens.size() != 15 && tokens.size() != 16) {
      throw MalformedFileError(source, "expected 15 or 16 columns, got " +
                                         std::to_string(tokens.size()), ln + 1);
    }
    if (tokens[0] == "DontCare") {
      continue;
    }
    double v[15] = {};
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      if (!parse_double(tokens[k], v[k - 1])) {
        throw MalformedFileError(source, "bad number '" + std::string(tokens[k]) + "'", ln + 1);
      }
    }
    // v: truncated occluded alpha l t r b h w l x y z ry [score]
    const double h = v[7];
    const double w = v[8];
    const double l = v[9];
    const Point3 loc(v[10], v[11], v[12]);
    const double ry = v[13];
    const Point3 bottom = calib.rect_to_lidar(loc);
    const Point3 heading = calib.rect_direction_to_lidar(Point3(std::cos(ry), 0.0, -std::sin(ry)));
    KittiLabel label{
      LabeledBox{std::string(tokens[0]),
                 [&] {
                   try {
                     return OrientedBox3D(bottom + Point3(0.0, 0.0, 0.5 * h), l, w, h,
                                          std::atan2(heading.y(), heading.x()));
                   } catch (const std::invalid_argument & e) {
                     throw MalformedFileError(source, e.what(), ln + 1);
                   }
                 }(),
                 tokens.size() == 16 ? v[14] : 1.0},
      v[2],
      {v[3], v[4], v[5], v[6]},
      tokens.size() == 16};
    out.push_back(std::move(label));
  }
  return out;
}

std::vector<KittiLabel> read_labels(const fs::path & path, const CalibrationSet & calib)
{
  return parse_labels(read_file(path), calib, path.string());
}

fs::path DatasetLayout::velodyne(const std::string & frame) const
{
  return root / "velodyne" / (frame + ".bin");
}

fs::path DatasetLayout::calib(const std::string & frame) const
{
  return root / "calib" / (frame + ".txt");
}

fs::path DatasetLayout::masks(const std::string & frame) const
{
  return root / "masks" / (frame + ".json");
}

fs::path DatasetLayout::labels(const std::string & frame) const
{
  return root / "label_2" / (frame + ".txt");
}

std::vector<std::string> DatasetLayout::frames() const
{
  std::vector<std::string> ids;
  const fs::path dir = root / "velodyne";
  if (!fs::is_directory(dir)) {
    return ids;
  }
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

FrameBundle DatasetLayout::load(const std::string & frame) const
{
  FrameBundle b;
  b.frame_id = frame;
  b.cloud = read_point_cloud(velodyne(frame));
  b.calib = read_calib(calib(frame));
  MaskDocument doc = read_masks(masks(frame));
  if (b.calib.image_height == 0 && b.calib.image_width == 0) {
    b.calib.image_height = doc.height;
    b.calib.image_width = doc.width;
  } else if (b.calib.image_height != doc.height || b.calib.image_width != doc.width) {
    throw InputError("frame " + frame + ": calibration image size differs from mask image size");
  }
  b.masks = std::move(doc.instances);
  if (fs::exists(labels(frame))) {
    std::vector<LabeledBox> gt;
    for (auto & l : read_labels(labels(frame), b.calib)) {
      gt.push_back(std::move(l.labeled));
    }
    b.ground_truth = std::move(gt);
  }
  return b;
}

void DatasetLayout::store(const FrameBundle & bundle) const
{
  write_point_cloud(velodyne(bundle.frame_id), bundle.cloud);
  write_calib(calib(bundle.frame_id), bundle.calib);
  MaskDocument doc{bundle.calib.image_height, bundle.calib.image_width, bundle.masks};
  write_masks(masks(bundle.frame_id), doc);
  if (bundle.ground_truth) {
    write_labels(labels(bundle.frame_id), *bundle.ground_truth, bundle.calib);
  }
}

std::string format_frame_id(std::size_t index)
{
  return fmt::format("{:06d}", index);
}

}  // namespace pseudobox
