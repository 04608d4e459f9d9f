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

#include "cascadet/network.hpp"

#include <set>

#include "cascadet/error.hpp"

namespace cascadet {
namespace {

void bn_specs(std::vector<ParamSpec>& out, const std::string& prefix, int channels) {
  for (const char* field : {"gamma", "beta", "mean", "variance"}) {
    out.push_back({prefix + "." + field, Shape{channels}});
  }
}

std::string layer_label(const LayerSpec& layer) {
  return "layer '" + layer.name + "' (" + to_string(layer.kind) + ")";
}

// Channels produced by `layer` when `in` channels flow into it.
int channels_after(const LayerSpec& layer, int in) {
  switch (layer.kind) {
    case LayerKind::kConv:
    case LayerKind::kDense:
    case LayerKind::kBottleneck:
      return layer.out_channels;
    default:
      return in;
  }
}

}  // namespace

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kDepthwiseConv: return "depthwise-conv";
    case LayerKind::kBatchNorm: return "batch-norm";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kRelu6: return "relu6";
    case LayerKind::kPRelu: return "prelu";
    case LayerKind::kMaxPool: return "max-pool";
    case LayerKind::kGlobalAvgPool: return "global-avg-pool";
    case LayerKind::kDense: return "dense";
    case LayerKind::kSoftmax: return "softmax";
    case LayerKind::kBottleneck: return "bottleneck-block";
  }
  return "unknown";
}

std::vector<ParamSpec> layer_params(const LayerSpec& layer, int in) {
  std::vector<ParamSpec> out;
  const std::string& p = layer.params;
  switch (layer.kind) {
    case LayerKind::kConv:
      out.push_back({p + ".weight", Shape{layer.out_channels, in, layer.kernel, layer.kernel}});
      if (layer.bias) out.push_back({p + ".bias", Shape{layer.out_channels}});
      break;
    case LayerKind::kDepthwiseConv:
      out.push_back({p + ".weight", Shape{in, 1, layer.kernel, layer.kernel}});
      if (layer.bias) out.push_back({p + ".bias", Shape{in}});
      break;
    case LayerKind::kBatchNorm:
      bn_specs(out, p, in);
      break;
    case LayerKind::kPRelu:
      out.push_back({p + ".alpha", Shape{in}});
      break;
    case LayerKind::kDense:
      out.push_back({p + ".weight", Shape{layer.out_channels, layer.in_channels}});
      if (layer.bias) out.push_back({p + ".bias", Shape{layer.out_channels}});
      break;
    case LayerKind::kBottleneck: {
      const int hidden = in * layer.expansion;
      out.push_back({p + ".expand.weight", Shape{hidden, in, 1, 1}});
      bn_specs(out, p + ".expand.bn", hidden);
      out.push_back({p + ".depthwise.weight", Shape{hidden, 1, 3, 3}});
      bn_specs(out, p + ".depthwise.bn", hidden);
      out.push_back({p + ".project.weight", Shape{layer.out_channels, hidden, 1, 1}});
      bn_specs(out, p + ".project.bn", layer.out_channels);
      break;
    }
    default:
      break;
  }
  return out;
}

namespace {

// Assigns default names and checks channel wiring. Returns per-layer output
// channels keyed by name.
std::unordered_map<std::string, int> wire(std::vector<LayerSpec>& layers, int input_channels,
                                          std::vector<int>* in_channels_out) {
  if (input_channels < 1) throw ShapeError("network input must have at least one channel");
  std::unordered_map<std::string, int> channels{{std::string(Network::kInputName), input_channels}};
  std::string previous(Network::kInputName);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    LayerSpec& layer = layers[i];
    if (layer.name.empty()) layer.name = "layer" + std::to_string(i);
    if (channels.contains(layer.name)) {
      throw ShapeError("duplicate layer name '" + layer.name + "'");
    }
    const std::string& source = layer.input.empty() ? previous : layer.input;
    const auto it = channels.find(source);
    if (it == channels.end()) {
      throw ShapeError(layer_label(layer) + " reads unknown source '" + source + "'");
    }
    const int in = it->second;
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kBottleneck:
        if (layer.in_channels != 0 && layer.in_channels != in) {
          throw ShapeError(layer_label(layer) + " declares " + std::to_string(layer.in_channels) +
                           " input channels but receives " + std::to_string(in));
        }
        if (layer.out_channels < 1) {
          throw ShapeError(layer_label(layer) + " needs a positive output channel count");
        }
        break;
      case LayerKind::kDense:
        if (layer.in_channels < 1 || layer.out_channels < 1) {
          throw ShapeError(layer_label(layer) + " needs positive feature counts");
        }
        break;
      case LayerKind::kDepthwiseConv:
        if (layer.in_channels != 0 && layer.in_channels != in) {
          throw ShapeError(layer_label(layer) + " declares " + std::to_string(layer.in_channels) +
                           " channels but receives " + std::to_string(in));
        }
        break;
      default:
        break;
    }
    if (layer.kind == LayerKind::kBottleneck) {
      if (layer.stride != 1 && layer.stride != 2) {
        throw ShapeError(layer_label(layer) + " stride must be 1 or 2");
      }
      if (layer.expansion < 1) throw ShapeError(layer_label(layer) + " expansion must be >= 1");
      if (layer.residual && (layer.stride != 1 || in != layer.out_channels)) {
        throw ShapeError(layer_label(layer) +
                         " residual connection requires stride 1 and equal in/out channels");
      }
    }
    if (in_channels_out) in_channels_out->push_back(in);
    channels.emplace(layer.name, channels_after(layer, in));
    previous = layer.name;
  }
  return channels;
}

}  // namespace

std::vector<ParamSpec> Network::required_params(const std::vector<LayerSpec>& layers,
                                                int input_channels) {
  std::vector<LayerSpec> copy = layers;
  std::vector<int> ins;
  wire(copy, input_channels, &ins);
  std::vector<ParamSpec> out;
  for (std::size_t i = 0; i < copy.size(); ++i) {
    auto specs = layer_params(copy[i], ins[i]);
    out.insert(out.end(), specs.begin(), specs.end());
  }
  return out;
}

Network::Network(std::vector<LayerSpec> layers, const WeightArchive& weights, int input_channels)
    : layers_(std::move(layers)), input_channels_(input_channels) {
  std::vector<int> ins;
  channels_ = wire(layers_, input_channels, &ins);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (const auto& spec : layer_params(layers_[i], ins[i])) {
      const Tensor* t = weights.find(spec.name);
      if (!t) {
        throw ShapeError(layer_label(layers_[i]) + ": missing parameter '" + spec.name + "'");
      }
      if (!(t->shape() == spec.shape)) {
        throw ShapeError(layer_label(layers_[i]) + ": parameter '" + spec.name + "' has shape " +
                         t->shape().str() + ", expected " + spec.shape.str());
      }
      params_.emplace(spec.name, *t);
    }
  }
}

int Network::output_channels(std::string_view layer) const {
  const auto it = channels_.find(std::string(layer));
  if (it == channels_.end()) throw ShapeError("unknown layer '" + std::string(layer) + "'");
  return it->second;
}

const Tensor& Network::param(const std::string& name) const {
  const auto it = params_.find(name);
  if (it == params_.end()) throw ShapeError("unresolved parameter '" + name + "'");
  return it->second;
}

ops::BatchNormParams Network::bn_params(const std::string& prefix, float epsilon) const {
  return {param(prefix + ".gamma"), param(prefix + ".beta"), param(prefix + ".mean"),
          param(prefix + ".variance"), epsilon};
}

Tensor Network::apply(const LayerSpec& layer, const Tensor& x) const {
  const std::string& p = layer.params;
  auto bias = [&](const std::string& name) -> std::span<const float> {
    return layer.bias ? param(name).data() : std::span<const float>{};
  };
  switch (layer.kind) {
    case LayerKind::kConv:
      return ops::conv2d(x, param(p + ".weight"), bias(p + ".bias"), layer.stride, layer.padding,
                         layer.name);
    case LayerKind::kDepthwiseConv:
      return ops::depthwise_conv2d(x, param(p + ".weight"), bias(p + ".bias"), layer.stride,
                                   layer.padding, layer.name);
    case LayerKind::kBatchNorm: {
      const auto bn = bn_params(p, layer.epsilon);
      return ops::batch_norm(x, bn.gamma.data(), bn.beta.data(), bn.mean.data(),
                             bn.variance.data(), bn.epsilon, layer.name);
    }
    case LayerKind::kRelu:
      return ops::relu(x);
    case LayerKind::kRelu6:
      return ops::relu6(x);
    case LayerKind::kPRelu:
      return ops::prelu(x, param(p + ".alpha").data(), layer.name);
    case LayerKind::kMaxPool:
      return ops::max_pool2d(x, layer.kernel, layer.stride, layer.name);
    case LayerKind::kGlobalAvgPool:
      return ops::global_avg_pool(x);
    case LayerKind::kDense: {
      const std::size_t batch = x.shape().rank() == 4 ? x.shape().n() : 1;
      if (x.size() != batch * static_cast<std::size_t>(layer.in_channels)) {
        throw ShapeError(layer_label(layer) + ": input " + x.shape().str() + " does not flatten to " +
                         std::to_string(layer.in_channels) + " features");
      }
      return ops::dense(x, param(p + ".weight"), bias(p + ".bias"), layer.name);
    }
    case LayerKind::kSoftmax:
      return ops::softmax_channels(x);
    case LayerKind::kBottleneck: {
      ops::BottleneckParams bp{param(p + ".expand.weight"),
                               bn_params(p + ".expand.bn", layer.epsilon),
                               param(p + ".depthwise.weight"),
                               bn_params(p + ".depthwise.bn", layer.epsilon),
                               param(p + ".project.weight"),
                               bn_params(p + ".project.bn", layer.epsilon)};
      return ops::bottleneck_block(x, bp, layer.expansion, layer.stride, layer.residual, layer.name);
    }
  }
  throw Error("unhandled layer kind", Error::Category::kInternal);
}

Tensor Network::forward(const Tensor& input) const {
  if (layers_.empty()) return input;
  const std::string last = layers_.back().name;
  return std::move(forward(input, {last}).at(last));
}

std::map<std::string, Tensor> Network::forward(const Tensor& input,
                                               const std::vector<std::string>& outputs) const {
  if (input.shape().rank() != 4 || input.shape().c() != input_channels_) {
    throw ShapeError("network expects [N, " + std::to_string(input_channels_) +
                     ", H, W] input, got " + input.shape().str());
  }
  std::set<std::string> keep(outputs.begin(), outputs.end());
  for (const auto& name : keep) {
    if (!channels_.contains(name)) throw ShapeError("unknown output '" + name + "'");
  }
  std::set<std::string> sources;
  for (const auto& layer : layers_) {
    if (!layer.input.empty()) sources.insert(layer.input);
  }

  std::unordered_map<std::string, Tensor> saved;
  std::map<std::string, Tensor> result;
  if (keep.contains(std::string(kInputName))) result.emplace(kInputName, input);

  const Tensor* previous = &input;
  Tensor current;
  for (const auto& layer : layers_) {
    const Tensor* source = previous;
    if (!layer.input.empty() && layer.input != kInputName) source = &saved.at(layer.input);
    if (layer.input == kInputName) source = &input;
    current = apply(layer, *source);
    if (sources.contains(layer.name)) saved[layer.name] = current;
    if (keep.contains(layer.name)) result[layer.name] = current;
    previous = sources.contains(layer.name) ? &saved[layer.name] : &current;
  }
  return result;
}

}  // namespace cascadet
