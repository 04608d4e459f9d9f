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

#pragma once

// Per-face pipeline output and its JSONL encoding, shared by the detection log
// and ground-truth files.

#include <filesystem>
#include <string>
#include <vector>

#include "cascadet/classifier.hpp"
#include "cascadet/detector.hpp"

namespace cascadet {

struct Detection {
  int frame = 0;
  BoundingBox box;  // integer-valued, inside the frame
  MaskLabel label = MaskLabel::kNoMask;
  float confidence = 0;  // classifier probability of `label`
  float face_score = 0;  // detector score
};

struct GroundTruthEntry {
  int frame = 0;
  BoundingBox box;
  MaskLabel label = MaskLabel::kNoMask;
};

// {"frame":..,"x1":..,"y1":..,"x2":..,"y2":..,"label":..,"confidence":..,"face_score":..}
std::string to_json_line(const Detection& d);
std::string to_json_line(const GroundTruthEntry& t);

// Both readers throw Error naming the file and line on malformed input.
std::vector<Detection> read_detection_log(const std::filesystem::path& path);
std::vector<GroundTruthEntry> read_ground_truth(const std::filesystem::path& path);

}  // namespace cascadet
