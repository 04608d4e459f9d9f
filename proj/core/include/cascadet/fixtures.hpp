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

// Seeded fixture weights and synthetic frames. No trained weights ship with
// the project; these fixtures exercise every code path deterministically.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cascadet/classifier.hpp"
#include "cascadet/detection.hpp"
#include "cascadet/frame.hpp"
#include "cascadet/weights.hpp"

namespace cascadet {

// random_init over the cascade parameters, then fan-in scaled convolution and
// dense weights, PReLU slopes of 0.25, face-logit biases that let a fraction
// of windows through each stage, and landmark biases at canonical positions.
WeightArchive make_cascade_fixture(std::uint64_t seed);

// random_init over the classifier parameters with fan-in scaled weights and
// unit batch-norm statistics.
WeightArchive make_classifier_fixture(const BackboneSpec& spec, std::uint64_t seed);

// Textured background with a few face-like ellipses; faces whose lower half is
// covered are labeled Mask. Appends one truth entry per face when `truth` is set.
Frame make_fixture_frame(int width, int height, int index, std::uint64_t seed,
                         std::vector<GroundTruthEntry>* truth = nullptr);

struct FixtureSetOptions {
  int frames = 10;
  int width = 640;
  int height = 360;
  std::uint64_t seed = 7;
  BackboneSpec backbone;
  int threads = 1;
};

struct FixtureSetPaths {
  std::filesystem::path cascade_weights;
  std::filesystem::path classifier_weights;
  std::filesystem::path manifest;
  std::filesystem::path config;
  std::filesystem::path truth;
};

// Writes cascade.cwts, classifier.cwts, frames/frame_NNNN.ppm, manifest.txt,
// truth.jsonl and detect.conf (output directory "out") under `dir`.
FixtureSetPaths write_fixture_set(const std::filesystem::path& dir, const FixtureSetOptions& options);

}  // namespace cascadet
