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

// Layer graph container. A Network is an ordered list of layers; each layer
// reads the output of the previous layer unless it names another source, so
// multi-head stage networks (score + box + landmark) fit the same container.

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cascadet/ops.hpp"
#include "cascadet/tensor.hpp"
#include "cascadet/weights.hpp"

namespace cascadet {

enum class LayerKind {
  kConv,
  kDepthwiseConv,
  kBatchNorm,
  kRelu,
  kRelu6,
  kPRelu,
  kMaxPool,
  kGlobalAvgPool,
  kDense,
  kSoftmax,
  kBottleneck,
};

const char* to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  // Output name; defaults to "layer<i>". Must be unique within a network.
  std::string name;
  // Source layer name; empty means the previous layer, "input" the network input.
  std::string input;
  // Prefix of this layer's parameter names in the weight archive.
  std::string params;

  int in_channels = 0;   // conv / depthwise / dense (features) / bottleneck
  int out_channels = 0;  // conv / dense / bottleneck
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int expansion = 1;
  bool residual = false;
  bool bias = true;      // conv / depthwise / dense
  float epsilon = 1e-5f; // batch norm (also inside bottleneck blocks)
};

// Archive names and shapes a layer binds, given the channel count flowing into it.
std::vector<ParamSpec> layer_params(const LayerSpec& layer, int channels_in);

class Network {
 public:
  static constexpr std::string_view kInputName = "input";

  Network() = default;

  // Resolves every parameter against `weights` and checks channel wiring,
  // starting from `input_channels`. Throws ShapeError naming the offending
  // layer or parameter.
  Network(std::vector<LayerSpec> layers, const WeightArchive& weights, int input_channels);

  // Parameter list the layers need, for fixture generation and validation.
  static std::vector<ParamSpec> required_params(const std::vector<LayerSpec>& layers,
                                                int input_channels);

  Tensor forward(const Tensor& input) const;

  // Runs the whole graph and returns the named layer outputs (plus "input"
  // if asked).
  std::map<std::string, Tensor> forward(const Tensor& input,
                                        const std::vector<std::string>& outputs) const;

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  int input_channels() const noexcept { return input_channels_; }
  // Channel count each layer produces.
  int output_channels(std::string_view layer) const;

 private:
  const Tensor& param(const std::string& name) const;
  Tensor apply(const LayerSpec& layer, const Tensor& x) const;
  ops::BatchNormParams bn_params(const std::string& prefix, float epsilon) const;

  std::vector<LayerSpec> layers_;
  std::unordered_map<std::string, Tensor> params_;
  std::unordered_map<std::string, int> channels_;
  int input_channels_ = 0;
};

}  // namespace cascadet
