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

#include "cascadet/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cascadet/error.hpp"
#include "cascadet/log.hpp"

namespace cascadet {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

LayerSpec conv(std::string name, int out, int kernel, int stride = 1) {
  LayerSpec l;
  l.kind = LayerKind::kConv;
  l.params = name;
  l.name = std::move(name);
  l.out_channels = out;
  l.kernel = kernel;
  l.stride = stride;
  return l;
}

LayerSpec prelu(std::string name) {
  LayerSpec l;
  l.kind = LayerKind::kPRelu;
  l.params = name;
  l.name = std::move(name);
  return l;
}

LayerSpec pool(std::string name, int kernel, int stride) {
  LayerSpec l;
  l.kind = LayerKind::kMaxPool;
  l.name = std::move(name);
  l.kernel = kernel;
  l.stride = stride;
  return l;
}

LayerSpec dense(std::string name, int in, int out, std::string input = {}) {
  LayerSpec l;
  l.kind = LayerKind::kDense;
  l.params = name;
  l.name = std::move(name);
  l.in_channels = in;
  l.out_channels = out;
  l.input = std::move(input);
  return l;
}

LayerSpec softmax(std::string name, std::string input) {
  LayerSpec l;
  l.kind = LayerKind::kSoftmax;
  l.name = std::move(name);
  l.input = std::move(input);
  return l;
}

std::vector<LayerSpec> prefixed(std::vector<LayerSpec> layers, const std::string& prefix) {
  for (auto& l : layers) {
    if (!l.params.empty()) l.params = prefix + l.params;
  }
  return layers;
}

// Zero outside [0, n), otherwise the stored sample.
float sample_or_zero(const float* plane, int h, int w, int y, int x) {
  if (y < 0 || y >= h || x < 0 || x >= w) return 0.0f;
  return plane[static_cast<std::size_t>(y) * w + x];
}

}  // namespace

bool BoundingBox::valid() const noexcept {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
         x2 > x1 && y2 > y1;
}

Preprocess Preprocess::from_metadata(const WeightArchive& archive) {
  Preprocess p;
  p.mean = std::stof(archive.meta_or("input.mean", "127.5"));
  p.scale = std::stof(archive.meta_or("input.scale", "0.0078125"));
  return p;
}

void Preprocess::to_metadata(WeightArchive& archive) const {
  std::ostringstream m, s;
  m.precision(9);
  s.precision(9);
  m << mean;
  s << scale;
  archive.metadata()["input.mean"] = m.str();
  archive.metadata()["input.scale"] = s.str();
}

void CascadeConfig::validate() const {
  auto unit = [](float v) { return v > 0.0f && v < 1.0f; };
  if (min_face_size < kProposalExtent) {
    throw ArgumentError("min_face_size must be at least " + std::to_string(kProposalExtent));
  }
  if (!(pyramid_factor > 0.0 && pyramid_factor < 1.0)) {
    throw ArgumentError("pyramid_factor must lie in (0, 1)");
  }
  for (float t : {threshold_proposal, threshold_refine, threshold_output, nms_within_level,
                  nms_across_levels, nms_refine, nms_output}) {
    if (!unit(t)) throw ArgumentError("cascade thresholds must lie in (0, 1)");
  }
}

std::vector<LayerSpec> proposal_net_layers() {
  std::vector<LayerSpec> l{
      conv("conv1", 10, 3), prelu("prelu1"), pool("pool1", 2, 2),
      conv("conv2", 16, 3), prelu("prelu2"),
      conv("conv3", 32, 3), prelu("features"),
      conv("score", 2, 1),  softmax("prob", "score"),
  };
  LayerSpec bbox = conv("bbox", 4, 1);
  bbox.input = "features";
  l.push_back(bbox);
  return prefixed(std::move(l), "pnet.");
}

std::vector<LayerSpec> refine_net_layers() {
  std::vector<LayerSpec> l{
      conv("conv1", 28, 3), prelu("prelu1"), pool("pool1", 3, 2),
      conv("conv2", 48, 3), prelu("prelu2"), pool("pool2", 3, 2),
      conv("conv3", 64, 2), prelu("prelu3"),
      dense("fc", 64 * 2 * 2, 128), prelu("features"),
      dense("score", 128, 2), softmax("prob", "score"),
      dense("bbox", 128, 4, "features"),
  };
  return prefixed(std::move(l), "rnet.");
}

std::vector<LayerSpec> output_net_layers() {
  std::vector<LayerSpec> l{
      conv("conv1", 32, 3), prelu("prelu1"), pool("pool1", 3, 2),
      conv("conv2", 64, 3), prelu("prelu2"), pool("pool2", 3, 2),
      conv("conv3", 64, 3), prelu("prelu3"), pool("pool3", 2, 2),
      conv("conv4", 128, 2), prelu("prelu4"),
      dense("fc", 128 * 2 * 2, 256), prelu("features"),
      dense("score", 256, 2), softmax("prob", "score"),
      dense("bbox", 256, 4, "features"),
      dense("landmark", 256, 10, "features"),
  };
  return prefixed(std::move(l), "onet.");
}

CascadeNetworks CascadeNetworks::build(const WeightArchive& archive) {
  return {Network(proposal_net_layers(), archive, 3), Network(refine_net_layers(), archive, 3),
          Network(output_net_layers(), archive, 3), Preprocess::from_metadata(archive)};
}

std::vector<ParamSpec> CascadeNetworks::required_params() {
  std::vector<ParamSpec> out;
  for (const auto& layers : {proposal_net_layers(), refine_net_layers(), output_net_layers()}) {
    auto p = Network::required_params(layers, 3);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

Tensor normalize(const Tensor& frame, const Preprocess& pre) {
  Tensor out = frame;
  for (float& v : out.data()) v = (v - pre.mean) * pre.scale;
  return out;
}

Tensor resize_bilinear(const Tensor& image, int out_h, int out_w) {
  const Shape& s = image.shape();
  if (s.rank() != 4) throw ShapeError("resize expects a rank-4 image, got " + s.str());
  if (out_h < 1 || out_w < 1) throw ArgumentError("resize target must be positive");

  struct Tap {
    int lo, hi;
    float frac;
  };
  auto taps = [](int in, int out) {
    std::vector<Tap> t(static_cast<std::size_t>(out));
    const double ratio = static_cast<double>(in) / out;
    for (int i = 0; i < out; ++i) {
      double src = (i + 0.5) * ratio - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const int lo = static_cast<int>(std::floor(src));
      t[i] = {lo, std::min(lo + 1, in - 1), static_cast<float>(src - lo)};
    }
    return t;
  };
  const auto ty = taps(s.h(), out_h);
  const auto tx = taps(s.w(), out_w);

  Tensor out = Tensor::nchw(s.n(), s.c(), out_h, out_w);
  for (int n = 0; n < s.n(); ++n) {
    for (int c = 0; c < s.c(); ++c) {
      const float* in = image.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < out_h; ++y) {
        const float* r0 = in + static_cast<std::size_t>(ty[y].lo) * s.w();
        const float* r1 = in + static_cast<std::size_t>(ty[y].hi) * s.w();
        const float fy = ty[y].frac;
        for (int x = 0; x < out_w; ++x) {
          const float fx = tx[x].frac;
          const float top = (1.0f - fx) * r0[tx[x].lo] + fx * r0[tx[x].hi];
          const float bottom = (1.0f - fx) * r1[tx[x].lo] + fx * r1[tx[x].hi];
          o[static_cast<std::size_t>(y) * out_w + x] = (1.0f - fy) * top + fy * bottom;
        }
      }
    }
  }
  return out;
}

std::vector<PyramidLevel> build_image_pyramid(const Tensor& frame, const CascadeConfig& config,
                                              const Preprocess& pre) {
  config.validate();
  const Shape& s = frame.shape();
  if (s.rank() != 4 || s.n() != 1 || s.c() != 3) {
    throw ShapeError("frame must be [1, 3, H, W], got " + s.str());
  }
  std::vector<PyramidLevel> levels;
  const int min_side = std::min(s.h(), s.w());
  if (min_side < config.min_face_size) {
    log::warning("frame " + std::to_string(s.w()) + "x" + std::to_string(s.h()) +
                 " is smaller than min_face_size " + std::to_string(config.min_face_size) +
                 "; no pyramid levels");
    return levels;
  }
  const Tensor normalized = normalize(frame, pre);
  constexpr double kSlack = 1e-9;
  double scale = static_cast<double>(kProposalExtent) / config.min_face_size;
  while (min_side * scale + kSlack >= kProposalExtent) {
    const int h = static_cast<int>(std::ceil(s.h() * scale - 1e-6));
    const int w = static_cast<int>(std::ceil(s.w() * scale - 1e-6));
    levels.push_back({scale, (h == s.h() && w == s.w()) ? normalized : resize_bilinear(normalized, h, w)});
    scale *= config.pyramid_factor;
  }
  return levels;
}

std::vector<FaceCandidate> generate_proposals(const PyramidLevel& level, const Network& pnet,
                                              float threshold) {
  const auto out = pnet.forward(level.image, {"prob", "bbox"});
  const Tensor& prob = out.at("prob");
  const Tensor& bbox = out.at("bbox");
  const double inv = 1.0 / level.scale;
  std::vector<FaceCandidate> candidates;
  for (int r = 0; r < prob.shape().h(); ++r) {
    for (int c = 0; c < prob.shape().w(); ++c) {
      const float p = prob.at(0, 1, r, c);
      if (!(p >= threshold)) continue;
      FaceCandidate cand;
      const double x = kProposalStride * c;
      const double y = kProposalStride * r;
      cand.box = {static_cast<float>(x * inv), static_cast<float>(y * inv),
                  static_cast<float>((x + kProposalExtent) * inv),
                  static_cast<float>((y + kProposalExtent) * inv)};
      cand.score = p;
      cand.offsets = {bbox.at(0, 0, r, c), bbox.at(0, 1, r, c), bbox.at(0, 2, r, c),
                      bbox.at(0, 3, r, c)};
      candidates.push_back(cand);
    }
  }
  return candidates;
}

float iou(const BoundingBox& a, const BoundingBox& b) {
  return overlap(a, b, NmsMode::kUnion);
}

float overlap(const BoundingBox& a, const BoundingBox& b, NmsMode mode) {
  const float iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const float ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0f || ih <= 0.0f) return 0.0f;
  const float inter = iw * ih;
  const float denom = mode == NmsMode::kUnion ? a.area() + b.area() - inter
                                              : std::min(a.area(), b.area());
  return denom > 0.0f ? std::min(1.0f, inter / denom) : 0.0f;
}

std::vector<FaceCandidate> nms(const std::vector<FaceCandidate>& candidates, float threshold,
                               NmsMode mode) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].score > candidates[b].score;
  });
  std::vector<bool> suppressed(candidates.size(), false);
  std::vector<FaceCandidate> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (suppressed[order[i]]) continue;
    const FaceCandidate& keep = candidates[order[i]];
    kept.push_back(keep);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!suppressed[order[j]] && overlap(keep.box, candidates[order[j]].box, mode) > threshold) {
        suppressed[order[j]] = true;
      }
    }
  }
  return kept;
}

std::optional<BoundingBox> calibrate(const BoundingBox& box, const RegressionOffsets& d) {
  const float w = box.width();
  const float h = box.height();
  BoundingBox out{box.x1 + d.dx1 * w, box.y1 + d.dy1 * h, box.x2 + d.dx2 * w, box.y2 + d.dy2 * h};
  if (!out.valid()) return std::nullopt;
  return out;
}

BoundingBox square_pad(const BoundingBox& box) {
  const float side = std::max(box.width(), box.height());
  const float cx = box.x1 + box.width() * 0.5f;
  const float cy = box.y1 + box.height() * 0.5f;
  const float half = side * 0.5f;
  return {cx - half, cy - half, cx - half + side, cy - half + side};
}

Tensor crop_resize(const Tensor& frame, const BoundingBox& box, int out_extent) {
  const Shape& s = frame.shape();
  if (s.rank() != 4) throw ShapeError("crop source must be rank 4, got " + s.str());
  if (out_extent < 1) throw ArgumentError("crop extent must be positive");
  if (!box.valid()) throw ArgumentError("crop box must have positive extent");

  struct Tap {
    int lo;
    float frac;
  };
  auto taps = [out_extent](double origin, double length) {
    std::vector<Tap> t(static_cast<std::size_t>(out_extent));
    const double step = length / out_extent;
    for (int i = 0; i < out_extent; ++i) {
      const double src = origin + (i + 0.5) * step - 0.5;
      const double lo = std::floor(src);
      t[i] = {static_cast<int>(lo), static_cast<float>(src - lo)};
    }
    return t;
  };
  const auto ty = taps(box.y1, box.height());
  const auto tx = taps(box.x1, box.width());

  Tensor out = Tensor::nchw(s.n(), s.c(), out_extent, out_extent);
  for (int n = 0; n < s.n(); ++n) {
    for (int c = 0; c < s.c(); ++c) {
      const float* in = frame.plane(n, c);
      float* o = out.plane(n, c);
      for (int y = 0; y < out_extent; ++y) {
        const int y0 = ty[y].lo;
        const float fy = ty[y].frac;
        for (int x = 0; x < out_extent; ++x) {
          const int x0 = tx[x].lo;
          const float fx = tx[x].frac;
          const float top = (1.0f - fx) * sample_or_zero(in, s.h(), s.w(), y0, x0) +
                            fx * sample_or_zero(in, s.h(), s.w(), y0, x0 + 1);
          const float bottom = (1.0f - fx) * sample_or_zero(in, s.h(), s.w(), y0 + 1, x0) +
                               fx * sample_or_zero(in, s.h(), s.w(), y0 + 1, x0 + 1);
          o[static_cast<std::size_t>(y) * out_extent + x] = (1.0f - fy) * top + fy * bottom;
        }
      }
    }
  }
  return out;
}

std::vector<FaceCandidate> refine_stage(const Tensor& frame,
                                        const std::vector<FaceCandidate>& candidates,
                                        const Network& network, int input_extent, float threshold,
                                        bool with_landmarks) {
  constexpr std::size_t kBatch = 32;
  std::vector<std::string> outputs{"prob", "bbox"};
  if (with_landmarks) outputs.emplace_back("landmark");

  std::vector<FaceCandidate> kept;
  for (std::size_t begin = 0; begin < candidates.size(); begin += kBatch) {
    const std::size_t count = std::min(kBatch, candidates.size() - begin);
    std::vector<BoundingBox> squares(count);
    Tensor batch = Tensor::nchw(static_cast<int>(count), frame.shape().c(), input_extent,
                                input_extent);
    const std::size_t item = batch.size() / count;
    for (std::size_t i = 0; i < count; ++i) {
      squares[i] = square_pad(candidates[begin + i].box);
      const Tensor crop = crop_resize(frame, squares[i], input_extent);
      std::copy(crop.data().begin(), crop.data().end(), batch.data().begin() + i * item);
    }
    const auto out = network.forward(batch, outputs);
    const Tensor& prob = out.at("prob");
    const Tensor& bbox = out.at("bbox");
    for (std::size_t i = 0; i < count; ++i) {
      const int n = static_cast<int>(i);
      const float score = prob.at(n, 1, 0, 0);
      if (!(score >= threshold)) continue;
      FaceCandidate cand;
      cand.score = score;
      cand.offsets = {bbox.at(n, 0, 0, 0), bbox.at(n, 1, 0, 0), bbox.at(n, 2, 0, 0),
                      bbox.at(n, 3, 0, 0)};
      const auto box = calibrate(squares[i], cand.offsets);
      if (!box) continue;
      cand.box = *box;
      if (with_landmarks) {
        const Tensor& lm = out.at("landmark");
        const BoundingBox& sq = squares[i];
        Landmarks points;
        for (int k = 0; k < 5; ++k) {
          points[k] = {sq.x1 + lm.at(n, k, 0, 0) * sq.width(),
                       sq.y1 + lm.at(n, 5 + k, 0, 0) * sq.height()};
        }
        cand.landmarks = points;
      }
      kept.push_back(cand);
    }
  }
  return kept;
}

std::vector<FaceCandidate> detect_faces(const Tensor& frame, const CascadeNetworks& networks,
                                        const CascadeConfig& config, DetectionTrace* trace,
                                        StageTimings* timings) {
  config.validate();
  DetectionTrace local_trace;
  StageTimings local_timings;
  DetectionTrace& tr = trace ? *trace : local_trace;
  StageTimings& tm = timings ? *timings : local_timings;
  tr = {};

  auto start = Clock::now();
  const auto pyramid = build_image_pyramid(frame, config, networks.preprocess);
  tm.pyramid += seconds_since(start);
  if (pyramid.empty()) return {};

  start = Clock::now();
  std::vector<FaceCandidate> proposals;
  for (const auto& level : pyramid) {
    auto level_candidates = nms(generate_proposals(level, networks.proposal,
                                                   config.threshold_proposal),
                                config.nms_within_level, NmsMode::kUnion);
    tr.proposals_per_level.push_back(static_cast<int>(level_candidates.size()));
    proposals.insert(proposals.end(), level_candidates.begin(), level_candidates.end());
  }
  proposals = nms(proposals, config.nms_across_levels, NmsMode::kUnion);
  std::vector<FaceCandidate> calibrated;
  calibrated.reserve(proposals.size());
  for (auto cand : proposals) {
    if (const auto box = calibrate(cand.box, cand.offsets)) {
      cand.box = *box;
      calibrated.push_back(cand);
    }
  }
  tr.proposals_after_nms = static_cast<int>(calibrated.size());
  tm.proposal += seconds_since(start);
  if (calibrated.empty()) return {};

  const Tensor normalized = normalize(frame, networks.preprocess);

  start = Clock::now();
  auto refined = nms(refine_stage(normalized, calibrated, networks.refine, kRefineExtent,
                                  config.threshold_refine, false),
                     config.nms_refine, NmsMode::kUnion);
  tr.refined = static_cast<int>(refined.size());
  tm.refine += seconds_since(start);
  if (refined.empty()) return {};

  start = Clock::now();
  auto faces = nms(refine_stage(normalized, refined, networks.output, kOutputExtent,
                                config.threshold_output, true),
                   config.nms_output, NmsMode::kMin);
  tm.output += seconds_since(start);

  const float width = static_cast<float>(frame.shape().w());
  const float height = static_cast<float>(frame.shape().h());
  std::vector<FaceCandidate> result;
  for (auto face : faces) {
    face.box = {std::clamp(face.box.x1, 0.0f, width), std::clamp(face.box.y1, 0.0f, height),
                std::clamp(face.box.x2, 0.0f, width), std::clamp(face.box.y2, 0.0f, height)};
    if (face.box.valid()) result.push_back(face);
  }
  tr.output = static_cast<int>(result.size());
  return result;
}

}  // namespace cascadet
