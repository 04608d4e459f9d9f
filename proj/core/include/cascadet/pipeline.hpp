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

// Frame-sequence pipeline: detect faces, classify each crop, annotate, and log.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascadet/classifier.hpp"
#include "cascadet/detection.hpp"
#include "cascadet/detector.hpp"
#include "cascadet/frame.hpp"

namespace cascadet {

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  std::filesystem::path cascade_weights;
  std::filesystem::path classifier_weights;
  CascadeConfig cascade;
  BackboneSpec backbone;
  int threads = 1;
  bool write_frames = true;
  bool draw_labels = true;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads CASCADET_<KEY> from the process environment.
std::optional<std::string> process_env(const std::string& name);

// Parses "key = value" lines ('#' starts a comment). Each key may be overridden
// by the variable CASCADET_<KEY> (upper case). Relative paths resolve against
// the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env = process_env);
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const EnvLookup& env = process_env);

// Keys accepted in config files.
const std::vector<std::string>& run_config_keys();

struct Models {
  CascadeNetworks cascade;
  MaskClassifier classifier;

  static Models load(const RunConfig& config);
};

struct FrameTimings {
  StageTimings stages;
  double classifier = 0;
  double annotate = 0;

  FrameTimings& operator+=(const FrameTimings& o);
};

// Rounds a face box outward to integers inside a width x height frame.
BoundingBox emission_box(const BoundingBox& box, int width, int height);

// One Detection per detected face, in detector order.
std::vector<Detection> process_frame(const Frame& frame, const Models& models,
                                     const CascadeConfig& cascade, FrameTimings* timings = nullptr,
                                     DetectionTrace* trace = nullptr);

struct RunSummary {
  int frames = 0;
  int processed = 0;
  int failed = 0;
  long detections = 0;
  int threads = 1;
  double wall_seconds = 0;
  FrameTimings timings;

  // 0 unless more than half of the frames failed (then 2).
  int exit_code() const { return failed * 2 > frames ? 2 : 0; }
  std::string to_json() const;
};

inline constexpr const char* kDetectionLogName = "detections.jsonl";
inline constexpr const char* kSummaryName = "summary.json";

// Processes every manifest frame on `config.threads` workers and writes
// annotated frames (same file names as the inputs), detections.jsonl ordered
// by frame index, and summary.json into output_dir.
RunSummary run(const RunConfig& config);

}  // namespace cascadet
