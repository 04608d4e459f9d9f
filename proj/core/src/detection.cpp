// Copyright 2026 The cascadet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cascadet/detection.hpp"

#include <fstream>

#include "cascadet/error.hpp"
#include <nlohmann/json.hpp>

namespace cascadet {
namespace {

using nlohmann::ordered_json;

// Emits integers without a fractional part so the log stays compact.
ordered_json coord(float v) {
  if (v == static_cast<float>(static_cast<long long>(v))) return static_cast<long long>(v);
  return static_cast<double>(v);
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw Error(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

BoundingBox box_from(const nlohmann::json& j) {
  BoundingBox b{j.at("x1").get<float>(), j.at("y1").get<float>(), j.at("x2").get<float>(),
                j.at("y2").get<float>()};
  if (!b.valid()) throw ArgumentError("box must satisfy x1 < x2 and y1 < y2");
  return b;
}

}  // namespace

std::string to_json_line(const Detection& d) {
  ordered_json j;
  j["frame"] = d.frame;
  j["x1"] = coord(d.box.x1);
  j["y1"] = coord(d.box.y1);
  j["x2"] = coord(d.box.x2);
  j["y2"] = coord(d.box.y2);
  j["label"] = to_string(d.label);
  j["confidence"] = static_cast<double>(d.confidence);
  j["face_score"] = static_cast<double>(d.face_score);
  return j.dump();
}

std::string to_json_line(const GroundTruthEntry& t) {
  ordered_json j;
  j["frame"] = t.frame;
  j["x1"] = coord(t.box.x1);
  j["y1"] = coord(t.box.y1);
  j["x2"] = coord(t.box.x2);
  j["y2"] = coord(t.box.y2);
  j["label"] = to_string(t.label);
  return j.dump();
}

std::vector<Detection> read_detection_log(const std::filesystem::path& path) {
  std::vector<Detection> out;
  for_each_json_line(path, [&](const nlohmann::json& j) {
    Detection d;
    d.frame = j.at("frame").get<int>();
    d.box = box_from(j);
    d.label = parse_mask_label(j.at("label").get<std::string>());
    d.confidence = j.at("confidence").get<float>();
    d.face_score = j.value("face_score", d.confidence);
    out.push_back(d);
  });
  return out;
}

std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path) {
  std::vector<GroundTruthEntry> out;
  for_each_json_line(path, [&](const nlohmann::json& j) {
    out.push_back({j.at("frame").get<int>(), box_from(j),
                   parse_mask_label(j.at("label").get<std::string>())});
  });
  return out;
}

}  // namespace cascadet
