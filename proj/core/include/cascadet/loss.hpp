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

// Cascade training objectives with analytic gradients. Everything here runs
// in double precision so finite-difference checks stay tight.

#include <array>
#include <span>
#include <vector>

#include "cascadet/tensor.hpp"

namespace cascadet {

struct LossGrad {
  double loss = 0;
  std::vector<double> grad;
};

// Squared Euclidean distance ||pred - target||^2 and its gradient 2(pred - target).
LossGrad euclidean_loss(std::span<const double> pred, std::span<const double> target);

// Box regression loss over the 4 normalized offsets.
LossGrad loss_box(std::span<const double> pred, std::span<const double> target);

// Landmark loss over 10 normalized coordinates.
LossGrad loss_landmark(std::span<const double> pred, std::span<const double> target);

inline constexpr double kProbabilityClamp = 1e-7;

struct ScalarLossGrad {
  double loss = 0;
  double grad = 0;  // dL/dp
};

// Binary cross-entropy -(y log p + (1 - y) log(1 - p)) with p clamped to
// [1e-7, 1 - 1e-7]. y must be 0 or 1.
ScalarLossGrad loss_det(double p, int y);

enum Task : unsigned { kTaskDet = 1u, kTaskBox = 2u, kTaskLandmark = 4u };

struct TrainingSample {
  Tensor input;
  int y_det = 0;
  std::array<double, 4> y_box{};
  std::array<double, 10> y_landmark{};
  unsigned tasks = kTaskDet;
};

// Network outputs for one sample.
struct StageOutputs {
  double p = 0.5;
  std::array<double, 4> box{};
  std::array<double, 10> landmark{};
};

struct TaskWeights {
  double det = 1.0;
  double box = 0.5;
  double landmark = 0.5;
};

struct LossReport {
  double det = 0, box = 0, landmark = 0;
  double total = 0;
  double grad_p = 0;
  std::array<double, 4> grad_box{};
  std::array<double, 10> grad_landmark{};
  unsigned tasks = 0;
};

// Weighted sum over the tasks present in sample.tasks. Per-task losses are
// unweighted; gradients are of the weighted total.
LossReport multitask_loss(const TrainingSample& sample, const StageOutputs& outputs,
                          const TaskWeights& weights = {});

}  // namespace cascadet
