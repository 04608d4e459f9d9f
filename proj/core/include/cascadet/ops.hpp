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

// Forward operators over NCHW float tensors.
//
// Every reduction accumulates in a fixed order: input channel first, then
// kernel row, then kernel column, with the bias added last. Outputs are
// therefore bit-reproducible regardless of how callers schedule work.

#include <span>
#include <string_view>
#include <vector>

#include "cascadet/tensor.hpp"

namespace cascadet::ops {

// Output extent of a sliding window along one axis.
int window_extent(int in, int kernel, int stride, int padding);

// Dense 2-D convolution. weight is [outC, inC, kH, kW]; bias may be empty
// (treated as zero) or hold outC values. `layer` names the caller in errors.
Tensor conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias, int stride,
              int padding, std::string_view layer = {});

// Per-channel convolution. weight is [C, 1, kH, kW].
Tensor depthwise_conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        int stride, int padding, std::string_view layer = {});

// 1x1 convolution. weight is [outC, inC, 1, 1].
Tensor pointwise_conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        std::string_view layer = {});

// Inference-mode batch normalization with stored statistics.
Tensor batch_norm(const Tensor& input, std::span<const float> gamma, std::span<const float> beta,
                  std::span<const float> mean, std::span<const float> variance, float epsilon,
                  std::string_view layer = {});

Tensor relu(const Tensor& input);
Tensor relu6(const Tensor& input);
Tensor prelu(const Tensor& input, std::span<const float> alpha, std::string_view layer = {});

// Max pooling without padding; windows that would run past the edge are dropped.
Tensor max_pool2d(const Tensor& input, int kernel, int stride, std::string_view layer = {});
Tensor global_avg_pool(const Tensor& input);

// out = weight * in + bias for a single vector; weight is [m, n].
std::vector<float> dense(std::span<const float> input, const Tensor& weight,
                         std::span<const float> bias, std::string_view layer = {});

// Applies dense() to every batch item of a tensor flattened to C*H*W values.
// The result is [N, m, 1, 1].
Tensor dense(const Tensor& input, const Tensor& weight, std::span<const float> bias,
             std::string_view layer = {});

std::vector<float> softmax(std::span<const float> logits);

// Softmax across the channel axis at every (n, y, x) position.
Tensor softmax_channels(const Tensor& input);

Tensor add(const Tensor& a, const Tensor& b, std::string_view layer = {});

struct BatchNormParams {
  Tensor gamma;
  Tensor beta;
  Tensor mean;
  Tensor variance;
  float epsilon = 1e-5f;
};

// Parameters of one inverted-residual bottleneck. Convolutions carry no bias;
// each is followed by its batch norm.
struct BottleneckParams {
  Tensor expand_weight;     // [C*t, C, 1, 1]
  BatchNormParams expand_bn;
  Tensor depthwise_weight;  // [C*t, 1, 3, 3]
  BatchNormParams depthwise_bn;
  Tensor project_weight;    // [C', C*t, 1, 1]
  BatchNormParams project_bn;
};

// expand 1x1 -> BN -> ReLU6 -> depthwise 3x3 (stride) -> BN -> ReLU6 ->
// project 1x1 -> BN, plus the input when `residual` is set. The projection is
// linear.
Tensor bottleneck_block(const Tensor& input, const BottleneckParams& params, int expansion,
                        int stride, bool residual, std::string_view layer = {});

}  // namespace cascadet::ops
