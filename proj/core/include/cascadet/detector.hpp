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

// Three-stage cascaded face detector: image pyramid, fully convolutional
// proposal network, then two refinement networks on square crops, with
// non-maximum suppression between stages.

#include <array>
#include <optional>
#include <vector>

#include "cascadet/network.hpp"
#include "cascadet/tensor.hpp"
#include "cascadet/weights.hpp"

namespace cascadet {

struct BoundingBox {
  float x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  float width() const noexcept { return x2 - x1; }
  float height() const noexcept { return y2 - y1; }
  float area() const noexcept { return width() * height(); }
  bool valid() const noexcept;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Box-regression output, normalized by the box width/height.
struct RegressionOffsets {
  float dx1 = 0, dy1 = 0, dx2 = 0, dy2 = 0;
};

struct Point {
  float x = 0, y = 0;
};

// Left eye, right eye, nose, left mouth corner, right mouth corner.
using Landmarks = std::array<Point, 5>;

struct FaceCandidate {
  BoundingBox box;
  float score = 0;
  RegressionOffsets offsets;
  std::optional<Landmarks> landmarks;
};

struct PyramidLevel {
  double scale = 1.0;
  Tensor image;  // normalized [1, 3, ceil(H*scale), ceil(W*scale)]
};

// Pixel preprocessing applied before any stage network: (v - mean) * scale.
struct Preprocess {
  float mean = 127.5f;
  float scale = 0.0078125f;

  static Preprocess from_metadata(const WeightArchive& archive);
  void to_metadata(WeightArchive& archive) const;
};

struct CascadeConfig {
  int min_face_size = 20;
  double pyramid_factor = 0.709;
  float threshold_proposal = 0.6f;
  float threshold_refine = 0.7f;
  float threshold_output = 0.7f;
  float nms_within_level = 0.5f;
  float nms_across_levels = 0.7f;
  float nms_refine = 0.7f;
  float nms_output = 0.7f;

  // Throws ArgumentError on out-of-range values.
  void validate() const;
};

inline constexpr int kProposalExtent = 12;
inline constexpr int kRefineExtent = 24;
inline constexpr int kOutputExtent = 48;
inline constexpr int kProposalStride = 2;

// Stage networks share one archive under "pnet.", "rnet." and "onet." prefixes.
// Every network exposes "prob" ([N, 2] softmax, index 1 = face) and "bbox";
// the output network adds "landmark" ([N, 10]: five x values then five y values,
// normalized to the crop).
std::vector<LayerSpec> proposal_net_layers();
std::vector<LayerSpec> refine_net_layers();
std::vector<LayerSpec> output_net_layers();

struct CascadeNetworks {
  Network proposal;
  Network refine;
  Network output;
  Preprocess preprocess;

  static CascadeNetworks build(const WeightArchive& archive);
  static std::vector<ParamSpec> required_params();
};

Tensor normalize(const Tensor& frame, const Preprocess& pre);

// Bilinear resize with half-pixel centers, clamping samples at the edges.
Tensor resize_bilinear(const Tensor& image, int out_h, int out_w);

// `frame` holds raw 0..255 values, [1, 3, H, W].
std::vector<PyramidLevel> build_image_pyramid(const Tensor& frame, const CascadeConfig& config,
                                              const Preprocess& pre = {});

std::vector<FaceCandidate> generate_proposals(const PyramidLevel& level, const Network& pnet,
                                              float threshold);

float iou(const BoundingBox& a, const BoundingBox& b);

enum class NmsMode { kUnion, kMin };

float overlap(const BoundingBox& a, const BoundingBox& b, NmsMode mode);

std::vector<FaceCandidate> nms(const std::vector<FaceCandidate>& candidates, float threshold,
                               NmsMode mode);

// Applies normalized offsets; nullopt when the result has non-positive extent.
std::optional<BoundingBox> calibrate(const BoundingBox& box, const RegressionOffsets& offsets);

BoundingBox square_pad(const BoundingBox& box);

// Bilinear crop of `box` into an out_extent x out_extent tensor; samples that
// fall outside the frame read zeros.
Tensor crop_resize(const Tensor& frame, const BoundingBox& box, int out_extent);

// `frame` must already be normalized.
std::vector<FaceCandidate> refine_stage(const Tensor& frame,
                                        const std::vector<FaceCandidate>& candidates,
                                        const Network& network, int input_extent, float threshold,
                                        bool with_landmarks);

struct DetectionTrace {
  std::vector<int> proposals_per_level;
  int proposals_after_nms = 0;  // after cross-level NMS and calibration
  int refined = 0;              // after stage 2 + NMS
  int output = 0;               // after stage 3 + NMS
};

struct StageTimings {
  double pyramid = 0, proposal = 0, refine = 0, output = 0;
};

// Runs the full cascade on a raw [1, 3, H, W] frame. Final boxes are clamped
// to [0, W] x [0, H]; order is descending score, ties by candidate index.
std::vector<FaceCandidate> detect_faces(const Tensor& frame, const CascadeNetworks& networks,
                                        const CascadeConfig& config,
                                        DetectionTrace* trace = nullptr,
                                        StageTimings* timings = nullptr);

}  // namespace cascadet
