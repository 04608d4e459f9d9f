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

#include "cascadet/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "cascadet/error.hpp"

namespace cascadet {
namespace {

LayerSpec make(LayerKind kind, std::string name, std::string params = {}) {
  LayerSpec l;
  l.kind = kind;
  l.name = std::move(name);
  l.params = std::move(params);
  return l;
}

}  // namespace

const char* to_string(MaskLabel label) {
  return label == MaskLabel::kMask ? "Mask" : "NoMask";
}

MaskLabel parse_mask_label(std::string_view text) {
  if (text == "Mask") return MaskLabel::kMask;
  if (text == "NoMask") return MaskLabel::kNoMask;
  throw ArgumentError("unknown mask label '" + std::string(text) + "'");
}

int BackboneSpec::block_count() const {
  int n = 0;
  for (const auto& g : groups) n += g.repeats;
  return n;
}

int BackboneSpec::scaled(int channels) const {
  const double v = channels * width_multiplier;
  int rounded = std::max(8, static_cast<int>(v + 4) / 8 * 8);
  if (rounded < 0.9 * v) rounded += 8;
  return rounded;
}

void BackboneSpec::validate() const {
  if (block_count() != kRequiredBlocks) {
    throw ArgumentError("backbone must have " + std::to_string(kRequiredBlocks) +
                        " bottleneck blocks, got " + std::to_string(block_count()));
  }
  if (input_extent < 32 || input_extent > 224) {
    throw ArgumentError("classifier input extent must lie in [32, 224]");
  }
  if (!(width_multiplier > 0.0)) throw ArgumentError("width multiplier must be positive");
  if (head_hidden < 1) throw ArgumentError("head width must be positive");
  for (const auto& g : groups) {
    if (g.expansion < 1 || g.out_channels < 1 || g.repeats < 1 || (g.stride != 1 && g.stride != 2)) {
      throw ArgumentError("invalid bottleneck group in block table");
    }
  }
}

std::vector<LayerSpec> classifier_layers(const BackboneSpec& spec) {
  spec.validate();
  std::vector<LayerSpec> layers;

  LayerSpec stem = make(LayerKind::kConv, "stem", "stem.conv");
  stem.out_channels = spec.scaled(spec.stem_channels);
  stem.kernel = 3;
  stem.stride = 2;
  stem.padding = 1;
  stem.bias = false;
  layers.push_back(stem);
  layers.push_back(make(LayerKind::kBatchNorm, "stem.bn", "stem.bn"));
  layers.push_back(make(LayerKind::kRelu6, "stem.act"));

  int channels = stem.out_channels;
  int index = 0;
  for (const auto& g : spec.groups) {
    const int out = spec.scaled(g.out_channels);
    for (int r = 0; r < g.repeats; ++r, ++index) {
      const std::string name = "block" + std::to_string(index);
      LayerSpec b = make(LayerKind::kBottleneck, name, name);
      b.in_channels = channels;
      b.out_channels = out;
      b.expansion = g.expansion;
      b.stride = r == 0 ? g.stride : 1;
      b.residual = b.stride == 1 && channels == out;
      layers.push_back(b);
      channels = out;
    }
  }

  LayerSpec last = make(LayerKind::kConv, "last", "last.conv");
  last.out_channels = spec.width_multiplier > 1.0 ? spec.scaled(spec.last_channels) : spec.last_channels;
  last.kernel = 1;
  last.bias = false;
  layers.push_back(last);
  layers.push_back(make(LayerKind::kBatchNorm, "last.bn", "last.bn"));
  layers.push_back(make(LayerKind::kRelu6, "features"));

  layers.push_back(make(LayerKind::kGlobalAvgPool, "pool"));
  LayerSpec hidden = make(LayerKind::kDense, "hidden", "head.hidden");
  hidden.in_channels = last.out_channels;
  hidden.out_channels = spec.head_hidden;
  layers.push_back(hidden);
  layers.push_back(make(LayerKind::kRelu, "hidden.act"));
  LayerSpec logits = make(LayerKind::kDense, "logits", "head.logits");
  logits.in_channels = spec.head_hidden;
  logits.out_channels = 2;
  layers.push_back(logits);
  layers.push_back(make(LayerKind::kSoftmax, "prob"));
  return layers;
}

std::vector<int> block_extents(const BackboneSpec& spec) {
  std::vector<int> extents;
  int e = ops::window_extent(spec.input_extent, 3, 2, 1);
  for (const auto& g : spec.groups) {
    for (int r = 0; r < g.repeats; ++r) {
      const int stride = r == 0 ? g.stride : 1;
      e = ops::window_extent(e, 3, stride, 1);
      extents.push_back(e);
    }
  }
  return extents;
}

std::vector<ParamSpec> MaskClassifier::required_params(const BackboneSpec& spec) {
  return Network::required_params(classifier_layers(spec), 3);
}

MaskClassifier build_classifier(const BackboneSpec& spec, const WeightArchive& weights) {
  return {spec, Network(classifier_layers(spec), weights, 3), Preprocess::from_metadata(weights)};
}

MaskPrediction prediction_from(std::span<const float> p) {
  if (p.size() != 2) throw ShapeError("classifier must emit 2 probabilities");
  MaskPrediction out;
  out.probabilities = {p[0], p[1]};
  out.label = p[0] > p[1] ? MaskLabel::kMask : MaskLabel::kNoMask;
  out.confidence = std::max(p[0], p[1]);
  return out;
}

MaskPrediction classify_face(const MaskClassifier& classifier, const Tensor& face_crop) {
  const int e = classifier.spec.input_extent;
  const Shape& s = face_crop.shape();
  if (s.rank() != 4 || s.n() != 1 || s.c() != 3 || s.h() != e || s.w() != e) {
    throw ShapeError("classifier expects a [1x3x" + std::to_string(e) + "x" + std::to_string(e) +
                     "] crop, got " + s.str());
  }
  const Tensor prob = classifier.network.forward(face_crop);
  return prediction_from(prob.data());
}

std::vector<ClassifiedFace> classify_all(const MaskClassifier& classifier, const Tensor& frame,
                                         const std::vector<FaceCandidate>& faces) {
  std::vector<ClassifiedFace> out;
  if (faces.empty()) return out;
  const Tensor normalized = normalize(frame, classifier.preprocess);
  out.reserve(faces.size());
  for (const auto& face : faces) {
    const Tensor crop = crop_resize(normalized, square_pad(face.box), classifier.spec.input_extent);
    out.push_back({face, classify_face(classifier, crop)});
  }
  return out;
}

}  // namespace cascadet
