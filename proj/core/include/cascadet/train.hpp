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

// Desk-scale SGD for the classifier head (dense -> ReLU -> dense -> softmax)
// on pre-extracted feature vectors. The backbone stays frozen.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "cascadet/classifier.hpp"
#include "cascadet/weights.hpp"

namespace cascadet {

struct HeadParams {
  Tensor hidden_weight;  // [H, F]
  Tensor hidden_bias;    // [H]
  Tensor logits_weight;  // [2, H]
  Tensor logits_bias;    // [2]

  int features() const { return hidden_weight.shape()[1]; }
  int hidden() const { return hidden_weight.shape()[0]; }

  // Seeded uniform init via random_init.
  static HeadParams random(int features, int hidden, std::uint64_t seed);
  // Reads/writes the "head.hidden.*" and "head.logits.*" archive entries.
  static HeadParams from_archive(const WeightArchive& archive);
  void store(WeightArchive& archive) const;
};

struct LabeledFeature {
  std::vector<float> features;
  MaskLabel label = MaskLabel::kNoMask;
};

struct TrainOptions {
  double learning_rate = 0.05;
  int epochs = 40;
  int batch_size = 10;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;  // 0 = before any update
  double loss = 0;
  double accuracy = 0;  // fraction in [0, 1]
};

struct TrainResult {
  HeadParams params;
  std::vector<EpochStats> curve;
};

std::array<float, 2> head_forward(const HeadParams& params, std::span<const float> features);

// Mean cross-entropy and accuracy over `data`.
EpochStats evaluate_head(const HeadParams& params, std::span<const LabeledFeature> data);

// Mini-batch SGD with seeded shuffling. Loss is the detection cross-entropy on
// the Mask probability. Throws Error if the loss becomes non-finite.
TrainResult train_head(HeadParams params, std::span<const LabeledFeature> data,
                       const TrainOptions& options);

// Two clusters of `count` points separated along the all-ones direction, with
// every point at least `margin` from the separating hyperplane.
std::vector<LabeledFeature> synthetic_clusters(int count, int features, std::uint64_t seed,
                                               double margin = 1.0);

// Desk-scale demonstration: a fresh head trained on two separable synthetic
// clusters. Everything is derived from `seed`.
struct DemoSetup {
  int samples = 200;
  int features = 64;
  int hidden = 128;
  TrainOptions options;
};

TrainResult train_demo(std::uint64_t seed, const DemoSetup& setup = {});

// "epoch,loss,accuracy" header plus one row per entry.
void write_loss_curve_csv(std::ostream& os, std::span<const EpochStats> curve);

}  // namespace cascadet
