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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pseudobox/errors.hpp"
#include "pseudobox/kitti_io.hpp"

namespace pseudobox
{

using nlohmann::json;

MaskDocument parse_masks(const std::string & text, const std::string & source)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw MalformedFileError(source, std::string("invalid JSON: ") + e.what());
  }
  try {
    const auto & size = doc.at("image_size");
    if (!size.is_array() || size.size() != 2) {
      throw MalformedFileError(source, "image_size must be [H, W]");
    }
    MaskDocument out;
    out.height = size.at(0).get<int>();
    out.width = size.at(1).get<int>();
    if (out.height <= 0 || out.width <= 0) {
      throw MalformedFileError(source, "image_size must be positive");
    }
    for (const auto & inst : doc.at("instances")) {
      const auto counts = inst.at("rle").get<std::vector<std::int64_t>>();
      try {
        out.instances.emplace_back(inst.at("id").get<int>(), inst.at("class").get<std::string>(),
                                   out.height, out.width,
                                   decode_rle(counts, out.height, out.width));
      } catch (const InputError & e) {
        throw MalformedFileError(source, e.what());
      }
    }
    return out;
  } catch (const json::exception & e) {
    throw MalformedFileError(source, std::string("bad mask document: ") + e.what());
  }
}

MaskDocument read_masks(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MalformedFileError(path.string(), "cannot open file");
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_masks(os.str(), path.string());
}

std::string format_masks(const MaskDocument & doc)
{
  nlohmann::ordered_json out;
  out["image_size"] = {doc.height, doc.width};
  out["instances"] = nlohmann::ordered_json::array();
  for (const InstanceMask & m : doc.instances) {
    nlohmann::ordered_json inst;
    inst["id"] = m.id();
    inst["class"] = m.class_name();
    inst["rle"] = encode_rle(m.pixels(), m.height(), m.width());
    out["instances"].push_back(std::move(inst));
  }
  return out.dump() + "\n";
}

void write_masks(const std::filesystem::path & path, const MaskDocument & doc)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << format_masks(doc);
}

}  // namespace pseudobox
