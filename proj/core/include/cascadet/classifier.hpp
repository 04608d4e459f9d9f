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

// Mask / no-mask classifier: a MobileNetV2-style backbone of 17 inverted
// residual bottleneck blocks followed by a small head
// (global average pool -> dense -> ReLU -> dense -> softmax).

#include <array>
#include <vector>

#include "cascadet/detector.hpp"
#include "cascadet/network.hpp"
#include "cascadet/weights.hpp"

namespace cascadet {

// Class index order is fixed: 0 = Mask, 1 = NoMask.
enum class MaskLabel { kMask = 0, kNoMask = 1 };

const char* to_string(MaskLabel label);
MaskLabel parse_mask_label(std::string_view text);

struct MaskPrediction {
  MaskLabel label = MaskLabel::kNoMask;
  float confidence = 0.5f;
  std::array<float, 2> probabilities{0.5f, 0.5f};
};

struct BlockGroup {
  int expansion;
  int out_channels;
  int repeats;
  int stride;
};

struct BackboneSpec {
  int input_extent = 96;
  double width_multiplier = 1.0;
  int stem_channels = 32;
  int last_channels = 1280;
  int head_hidden = 128;
  std::vector<BlockGroup> groups{
      {1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2},
      {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1},
  };

  static constexpr int kRequiredBlocks = 17;

  int block_count() const;
  // Channel count after applying the width multiplier, rounded to a multiple of 8.
  int scaled(int channels) const;
  void validate() const;
};

// Layer table for `spec`: stem conv -> BN -> ReLU6, blocks "block<i>",
// 1x1 conv -> BN -> ReLU6, then the head. Outputs "pool", "hidden", "logits", "prob".
std::vector<LayerSpec> classifier_layers(const BackboneSpec& spec);

// Spatial extent after each block for a square input, from the stride table.
std::vector<int> block_extents(const BackboneSpec& spec);

struct MaskClassifier {
  BackboneSpec spec;
  Network network;
  Preprocess preprocess;

  static std::vector<ParamSpec> required_params(const BackboneSpec& spec);
};

MaskClassifier build_classifier(const BackboneSpec& spec, const WeightArchive& weights);

// `face_crop` is [1, 3, E, E], already resized and normalized.
MaskPrediction classify_face(const MaskClassifier& classifier, const Tensor& face_crop);

// Maps probabilities to a prediction; exact ties go to NoMask.
MaskPrediction prediction_from(std::span<const float> probabilities);

struct ClassifiedFace {
  FaceCandidate face;
  MaskPrediction prediction;
};

// `frame` is raw [1, 3, H, W]; crops are square-padded, resized and normalized
// with the classifier's preprocessing. Order follows `faces`.
std::vector<ClassifiedFace> classify_all(const MaskClassifier& classifier, const Tensor& frame,
                                         const std::vector<FaceCandidate>& faces);

}  // namespace cascadet
