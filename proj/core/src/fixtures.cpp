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

#include "cascadet/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cascadet {
namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Rescales U(-0.1, 0.1) draws to U(-a, a) with a = gain * sqrt(3 / fan_in).
void scale_by_fan_in(WeightArchive& archive, const std::string& name, double gain) {
  const Tensor& t = archive.at(name);
  const Shape& s = t.shape();
  std::size_t fan_in = 1;
  for (std::size_t axis = 1; axis < s.rank(); ++axis) fan_in *= static_cast<std::size_t>(s[axis]);
  const float factor = static_cast<float>(gain * std::sqrt(3.0 / static_cast<double>(fan_in)) / 0.1);
  Tensor scaled = t;
  for (float& v : scaled.data()) v *= factor;
  archive.replace(name, std::move(scaled));
}

void fill(WeightArchive& archive, const std::string& name, float value) {
  archive.replace(name, Tensor(archive.at(name).shape(), value));
}

void set_values(WeightArchive& archive, const std::string& name, std::vector<float> values) {
  archive.replace(name, Tensor(archive.at(name).shape(), std::move(values)));
}

void draw_face(Frame& frame, int x0, int y0, int fw, int side, bool masked) {
  const double cx = x0 + fw / 2.0, cy = y0 + side / 2.0;
  const double rx = fw / 2.0, ry = side / 2.0;
  for (int y = std::max(0, y0); y < y0 + side && y < frame.height; ++y) {
    for (int x = std::max(0, x0); x < x0 + fw && x < frame.width; ++x) {
      const double u = (x + 0.5 - cx) / rx, v = (y + 0.5 - cy) / ry;
      if (u * u + v * v > 1.0) continue;
      auto* p = frame.pixel(x, y);
      const double shade = 1.0 - 0.25 * (u * u + v * v);
      if (masked && v > 0.1) {
        p[0] = static_cast<std::uint8_t>(170 * shade);
        p[1] = static_cast<std::uint8_t>(200 * shade);
        p[2] = static_cast<std::uint8_t>(235 * shade);
      } else {
        p[0] = static_cast<std::uint8_t>(224 * shade);
        p[1] = static_cast<std::uint8_t>(172 * shade);
        p[2] = static_cast<std::uint8_t>(140 * shade);
      }
      // Eyes and mouth as dark spots.
      const bool eye = std::abs(v + 0.3) < 0.1 && std::abs(std::abs(u) - 0.4) < 0.12;
      const bool mouth = !masked && std::abs(v - 0.45) < 0.07 && std::abs(u) < 0.35;
      if (eye || mouth) p[0] = p[1] = p[2] = 40;
    }
  }
}

// Mean (Mask - NoMask) logit margin over a few rendered faces of one kind.
double mean_margin(const MaskClassifier& classifier, bool masked) {
  const int extent = classifier.spec.input_extent;
  double sum = 0.0;
  const int kSamples = 3;
  for (int i = 0; i < kSamples; ++i) {
    Frame frame(0, extent, extent);
    for (auto& v : frame.pixels) v = static_cast<std::uint8_t>(100 + 20 * i);
    const int side = extent - 8 * i;
    const int fw = side * 4 / 5;
    draw_face(frame, (extent - fw) / 2, (extent - side) / 2, fw, side, masked);
    const Tensor input = normalize(to_tensor(frame), classifier.preprocess);
    const Tensor logits = classifier.network.forward(input, {"logits"}).at("logits");
    sum += static_cast<double>(logits[0]) - static_cast<double>(logits[1]);
  }
  return sum / kSamples;
}

}  // namespace

WeightArchive make_cascade_fixture(std::uint64_t seed) {
  WeightArchive a = random_init(CascadeNetworks::required_params(), seed);
  std::vector<std::string> names;
  for (const auto& [name, tensor] : a.entries()) names.push_back(name);
  for (const auto& name : names) {
    if (ends_with(name, ".alpha")) {
      fill(a, name, 0.25f);
    } else if (ends_with(name, ".weight")) {
      const bool head = name.find(".bbox.") != std::string::npos ||
                        name.find(".landmark.") != std::string::npos;
      scale_by_fan_in(a, name, head ? 0.05 : 1.0);
    } else if (ends_with(name, ".bias")) {
      fill(a, name, 0.0f);
    }
  }
  set_values(a, "pnet.score.bias", {0.0f, 0.1f});
  set_values(a, "rnet.score.bias", {0.0f, 0.9f});
  set_values(a, "onet.score.bias", {0.0f, 0.8f});
  set_values(a, "onet.landmark.bias",
             {0.3f, 0.7f, 0.5f, 0.35f, 0.65f, 0.35f, 0.35f, 0.55f, 0.75f, 0.75f});
  Preprocess{}.to_metadata(a);
  a.metadata()["fixture.seed"] = std::to_string(seed);
  return a;
}

WeightArchive make_classifier_fixture(const BackboneSpec& spec, std::uint64_t seed) {
  WeightArchive a = random_init(MaskClassifier::required_params(spec), seed);
  std::vector<std::string> names;
  for (const auto& [name, tensor] : a.entries()) names.push_back(name);
  for (const auto& name : names) {
    if (ends_with(name, ".gamma") || ends_with(name, ".variance")) {
      fill(a, name, 1.0f);
    } else if (ends_with(name, ".beta") || ends_with(name, ".mean") || ends_with(name, ".bias")) {
      fill(a, name, 0.0f);
    } else if (ends_with(name, ".weight")) {
      scale_by_fan_in(a, name, name.starts_with("head.") ? 1.0 : 1.5);
    }
  }
  Preprocess{}.to_metadata(a);

  // Align the random head with the rendered faces: masked faces on the Mask
  // side, unmasked on NoMask, with a margin of about 1.5 logits each way.
  const MaskClassifier probe = build_classifier(spec, a);
  const double masked = mean_margin(probe, true);
  const double bare = mean_margin(probe, false);
  const double spread = std::abs(masked - bare) / 2.0;
  if (spread > 0.0) {
    const double k = 1.5 / spread * (masked >= bare ? 1.0 : -1.0);
    const double mid = (masked + bare) / 2.0;
    Tensor w = a.at("head.logits.weight");
    Tensor b = a.at("head.logits.bias");
    const std::size_t row = w.size() / 2;
    for (std::size_t i = 0; i < row; ++i) {
      const double d = static_cast<double>(w[i]) - static_cast<double>(w[row + i]);
      w[i] = static_cast<float>(k * d);
      w[row + i] = 0.0f;
    }
    b[0] = static_cast<float>(-k * mid);
    b[1] = 0.0f;
    a.replace("head.logits.weight", std::move(w));
    a.replace("head.logits.bias", std::move(b));
  }
  a.metadata()["classes"] = "Mask,NoMask";
  a.metadata()["fixture.seed"] = std::to_string(seed);
  return a;
}

Frame make_fixture_frame(int width, int height, int index, std::uint64_t seed,
                         std::vector<GroundTruthEntry>* truth) {
  Lcg64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
  Frame frame(index, width, height);
  const double gx = rng.uniform(-0.3, 0.3);
  const double gy = rng.uniform(-0.3, 0.3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      auto* p = frame.pixel(x, y);
      const double base = 110.0 + gx * x * 255.0 / width + gy * y * 255.0 / height;
      const double noise = rng.uniform(-12.0, 12.0);
      p[0] = static_cast<std::uint8_t>(std::clamp(base + noise, 0.0, 255.0));
      p[1] = static_cast<std::uint8_t>(std::clamp(base * 0.9 + noise, 0.0, 255.0));
      p[2] = static_cast<std::uint8_t>(std::clamp(base * 1.1 + noise, 0.0, 255.0));
    }
  }

  const int faces = 2 + static_cast<int>(rng.below(3));
  for (int f = 0; f < faces; ++f) {
    const int side = std::min(height / 2, 36 + static_cast<int>(rng.below(60)));
    const int fw = side * 4 / 5;
    const int x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, width - fw))));
    const int y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, height - side))));
    const bool masked = rng.below(2) == 0;
    draw_face(frame, x0, y0, fw, side, masked);
    if (truth) {
      truth->push_back({index,
                        {static_cast<float>(x0), static_cast<float>(y0),
                         static_cast<float>(std::min(width, x0 + fw)),
                         static_cast<float>(std::min(height, y0 + side))},
                        masked ? MaskLabel::kMask : MaskLabel::kNoMask});
    }
  }
  return frame;
}

FixtureSetPaths write_fixture_set(const std::filesystem::path& dir, const FixtureSetOptions& o) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "frames");
  FixtureSetPaths paths{dir / "cascade.cwts", dir / "classifier.cwts", dir / "manifest.txt",
                        dir / "detect.conf", dir / "truth.jsonl"};
  save(make_cascade_fixture(o.seed), paths.cascade_weights);
  save(make_classifier_fixture(o.backbone, o.seed + 1), paths.classifier_weights);

  std::ofstream manifest(paths.manifest);
  std::ofstream truth(paths.truth);
  for (int i = 0; i < o.frames; ++i) {
    std::vector<GroundTruthEntry> entries;
    const Frame frame = make_fixture_frame(o.width, o.height, i, o.seed, &entries);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.ppm", i);
    write_ppm(dir / "frames" / name, frame);
    manifest << "frames/" << name << "\n";
    for (const auto& e : entries) truth << to_json_line(e) << "\n";
  }

  std::ofstream conf(paths.config);
  conf << "# generated fixture run\n"
       << "manifest = manifest.txt\n"
       << "output_dir = out\n"
       << "cascade_weights = cascade.cwts\n"
       << "classifier_weights = classifier.cwts\n"
       << "threads = " << o.threads << "\n"
       << "classifier_extent = " << o.backbone.input_extent << "\n"
       << "width_multiplier = " << o.backbone.width_multiplier << "\n"
       << "head_hidden = " << o.backbone.head_hidden << "\n";
  return paths;
}

}  // namespace cascadet
