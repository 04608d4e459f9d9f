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

#include "cascadet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "cascadet/annotate.hpp"
#include "cascadet/log.hpp"
#include "cascadet/weights.hpp"
#include <nlohmann/json.hpp>

namespace cascadet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string env_name(const std::string& key) {
  std::string out = "CASCADET_";
  for (char ch : key) out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  is >> out;
  if (!is || !(is >> std::ws).eof()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys{
      "manifest", "output_dir", "cascade_weights", "classifier_weights", "threads",
      "min_face_size", "pyramid_factor", "threshold_proposal", "threshold_refine",
      "threshold_output", "nms_within_level", "nms_across_levels", "nms_refine", "nms_output",
      "classifier_extent", "width_multiplier", "head_hidden", "write_frames", "draw_labels"};
  return keys;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const EnvLookup& env) {
  const auto& keys = run_config_keys();
  std::map<std::string, std::string> values;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    values[key] = trim(line.substr(eq + 1));
  }
  for (const auto& key : keys) {
    if (auto v = env(env_name(key))) values[key] = trim(*v);
  }

  RunConfig c;
  auto path = [&](const std::string& key) -> std::filesystem::path {
    const auto it = values.find(key);
    if (it == values.end() || it->second.empty()) {
      throw ConfigError("config is missing required key '" + key + "'");
    }
    std::filesystem::path p = it->second;
    return p.is_absolute() ? p : base_dir / p;
  };
  c.manifest = path("manifest");
  c.output_dir = path("output_dir");
  c.cascade_weights = path("cascade_weights");
  c.classifier_weights = path("classifier_weights");

  for (const auto& [key, value] : values) {
    if (key == "threads") c.threads = parse_number<int>(key, value);
    else if (key == "min_face_size") c.cascade.min_face_size = parse_number<int>(key, value);
    else if (key == "pyramid_factor") c.cascade.pyramid_factor = parse_number<double>(key, value);
    else if (key == "threshold_proposal") c.cascade.threshold_proposal = parse_number<float>(key, value);
    else if (key == "threshold_refine") c.cascade.threshold_refine = parse_number<float>(key, value);
    else if (key == "threshold_output") c.cascade.threshold_output = parse_number<float>(key, value);
    else if (key == "nms_within_level") c.cascade.nms_within_level = parse_number<float>(key, value);
    else if (key == "nms_across_levels") c.cascade.nms_across_levels = parse_number<float>(key, value);
    else if (key == "nms_refine") c.cascade.nms_refine = parse_number<float>(key, value);
    else if (key == "nms_output") c.cascade.nms_output = parse_number<float>(key, value);
    else if (key == "classifier_extent") c.backbone.input_extent = parse_number<int>(key, value);
    else if (key == "width_multiplier") c.backbone.width_multiplier = parse_number<double>(key, value);
    else if (key == "head_hidden") c.backbone.head_hidden = parse_number<int>(key, value);
    else if (key == "write_frames") c.write_frames = parse_bool(key, value);
    else if (key == "draw_labels") c.draw_labels = parse_bool(key, value);
  }
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  try {
    c.cascade.validate();
    c.backbone.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_run_config(buffer.str(), path.parent_path(), env);
}

Models Models::load(const RunConfig& config) {
  const WeightArchive cascade = cascadet::load(config.cascade_weights);
  const WeightArchive classifier = cascadet::load(config.classifier_weights);
  return {CascadeNetworks::build(cascade), build_classifier(config.backbone, classifier)};
}

FrameTimings& FrameTimings::operator+=(const FrameTimings& o) {
  stages.pyramid += o.stages.pyramid;
  stages.proposal += o.stages.proposal;
  stages.refine += o.stages.refine;
  stages.output += o.stages.output;
  classifier += o.classifier;
  annotate += o.annotate;
  return *this;
}

BoundingBox emission_box(const BoundingBox& box, int width, int height) {
  const float w = static_cast<float>(width);
  const float h = static_cast<float>(height);
  return {std::clamp(std::floor(box.x1), 0.0f, w), std::clamp(std::floor(box.y1), 0.0f, h),
          std::clamp(std::ceil(box.x2), 0.0f, w), std::clamp(std::ceil(box.y2), 0.0f, h)};
}

std::vector<Detection> process_frame(const Frame& frame, const Models& models,
                                     const CascadeConfig& cascade, FrameTimings* timings,
                                     DetectionTrace* trace) {
  FrameTimings local;
  FrameTimings& t = timings ? *timings : local;
  const Tensor image = to_tensor(frame);
  const auto faces = detect_faces(image, models.cascade, cascade, trace, &t.stages);

  const auto start = Clock::now();
  const auto classified = classify_all(models.classifier, image, faces);
  t.classifier += seconds_since(start);

  std::vector<Detection> out;
  out.reserve(classified.size());
  for (const auto& c : classified) {
    const BoundingBox box = emission_box(c.face.box, frame.width, frame.height);
    if (!box.valid()) continue;
    out.push_back({frame.index, box, c.prediction.label, c.prediction.confidence, c.face.score});
  }
  return out;
}

std::string RunSummary::to_json() const {
  nlohmann::ordered_json j;
  j["frames"] = frames;
  j["processed"] = processed;
  j["failed"] = failed;
  j["detections"] = detections;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  j["frames_per_second"] = wall_seconds > 0 ? processed / wall_seconds : 0.0;
  j["stage_seconds"] = {{"pyramid", timings.stages.pyramid},
                        {"proposal", timings.stages.proposal},
                        {"refine", timings.stages.refine},
                        {"output", timings.stages.output},
                        {"classifier", timings.classifier},
                        {"annotate", timings.annotate}};
  return j.dump(2);
}

RunSummary run(const RunConfig& config) {
  const auto start = Clock::now();
  const Models models = Models::load(config);
  const auto entries = read_manifest(config.manifest);
  std::filesystem::create_directories(config.output_dir);

  const std::size_t count = entries.size();
  std::vector<std::vector<Detection>> results(count);
  std::vector<char> failed(count, 0);
  std::vector<FrameTimings> worker_timings(static_cast<std::size_t>(config.threads));
  std::atomic<std::size_t> next{0};

  auto worker = [&](std::size_t id) {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const Frame frame = load_frame(config.manifest, entries[i], static_cast<int>(i));
        results[i] = process_frame(frame, models, config.cascade, &worker_timings[id]);
        if (config.write_frames) {
          const auto t0 = Clock::now();
          write_ppm(config.output_dir / entries[i].path.filename(),
                    annotate(frame, results[i], config.draw_labels));
          worker_timings[id].annotate += seconds_since(t0);
        }
      } catch (const std::exception& e) {
        failed[i] = 1;
        results[i].clear();
        log::error("frame " + std::to_string(i) + " skipped: " + e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min<std::size_t>(config.threads, std::max<std::size_t>(count, 1));
    for (std::size_t id = 1; id < threads; ++id) pool.emplace_back(worker, id);
    worker(0);
  }

  RunSummary summary;
  summary.frames = static_cast<int>(count);
  summary.threads = config.threads;
  std::ofstream log_file(config.output_dir / kDetectionLogName, std::ios::trunc);
  if (!log_file) throw Error("cannot write " + (config.output_dir / kDetectionLogName).string());
  for (std::size_t i = 0; i < count; ++i) {
    if (failed[i]) {
      ++summary.failed;
      continue;
    }
    ++summary.processed;
    for (const auto& d : results[i]) {
      log_file << to_json_line(d) << '\n';
      ++summary.detections;
    }
  }
  log_file.close();
  for (const auto& t : worker_timings) summary.timings += t;
  summary.wall_seconds = seconds_since(start);

  std::ofstream(config.output_dir / kSummaryName, std::ios::trunc) << summary.to_json() << '\n';
  return summary;
}

}  // namespace cascadet
