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

// Naive reference implementations used to cross-check the library. None of
// these call into cascadet's operators; they share only the value types.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cascadet/detection.hpp"
#include "cascadet/detector.hpp"
#include "cascadet/eval.hpp"
#include "cascadet/network.hpp"
#include "cascadet/tensor.hpp"
#include "cascadet/weights.hpp"

namespace cascadet::oracle {

// Six nested loops, double accumulation, zero padding by bounds test.
Tensor naive_conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                    int stride, int padding);
Tensor naive_depthwise(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                       int stride, int padding);
// Dense weight [C, C, kh, kw] that is zero off the channel diagonal.
Tensor block_diagonal(const Tensor& depthwise_weight);
Tensor naive_batch_norm(const Tensor& input, std::span<const float> gamma,
                        std::span<const float> beta, std::span<const float> mean,
                        std::span<const float> variance, double epsilon);
Tensor naive_max_pool(const Tensor& input, int kernel, int stride);
Tensor naive_global_avg_pool(const Tensor& input);
std::vector<float> naive_dense(std::span<const float> input, const Tensor& weight,
                               std::span<const float> bias);
std::vector<double> naive_softmax(std::span<const float> logits);

// Output extent by enumerating window origins.
int enumerated_extent(int in, int kernel, int stride, int padding);

// Largest absolute elementwise difference; infinity on shape mismatch.
double max_abs_diff(const Tensor& a, const Tensor& b);
double max_abs_diff(std::span<const float> a, std::span<const float> b);

// Deterministic random tensor with values in [lo, hi).
Tensor random_tensor(Shape shape, Lcg64& rng, double lo = -1.0, double hi = 1.0);
std::vector<float> random_vector(int n, Lcg64& rng, double lo = -1.0, double hi = 1.0);

// Pixel-count IoU of integer-aligned boxes.
double raster_iou(const BoundingBox& a, const BoundingBox& b);

// O(n^2) suppression: a candidate survives iff no higher-ranked survivor
// overlaps it above the threshold. Ranks by score, then by input index.
std::vector<std::size_t> reference_nms(const std::vector<FaceCandidate>& candidates,
                                       double threshold, bool min_mode);

// Greedy matcher that scans every (detection, truth) pair at each step.
TaskCounts reference_match(std::vector<Detection> detections, std::vector<GroundTruthEntry> truths,
                           double iou_threshold);

// Face probability of every 12x12 window at stride 2, evaluated one crop at
// a time through `pnet`. Result is [rows][cols].
std::vector<std::vector<float>> sliding_window_scores(const Network& pnet, const Tensor& image);

// Central difference of f at x along each coordinate.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step);

// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-12);

// Unique scratch directory under the system temp path.
std::string scratch_dir(const std::string& tag);

}  // namespace cascadet::oracle
