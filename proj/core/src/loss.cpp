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

#include "cascadet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascadet/error.hpp"

namespace cascadet {

LossGrad euclidean_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw ArgumentError("loss operands differ in length: " + std::to_string(pred.size()) + " vs " +
                        std::to_string(target.size()));
  }
  LossGrad out;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = 2.0 * d;
  }
  return out;
}

LossGrad loss_box(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != 4) throw ArgumentError("box loss expects 4 offsets");
  return euclidean_loss(pred, target);
}

LossGrad loss_landmark(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != 10) throw ArgumentError("landmark loss expects 10 coordinates");
  return euclidean_loss(pred, target);
}

ScalarLossGrad loss_det(double p, int y) {
  if (y != 0 && y != 1) throw ArgumentError("detection label must be 0 or 1, got " + std::to_string(y));
  const double q = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  if (y == 1) return {-std::log(q), -1.0 / q};
  return {-std::log(1.0 - q), 1.0 / (1.0 - q)};
}

LossReport multitask_loss(const TrainingSample& sample, const StageOutputs& outputs,
                          const TaskWeights& weights) {
  LossReport r;
  r.tasks = sample.tasks;
  if (sample.tasks & kTaskDet) {
    const auto det = loss_det(outputs.p, sample.y_det);
    r.det = det.loss;
    r.grad_p = weights.det * det.grad;
    r.total += weights.det * det.loss;
  }
  if (sample.tasks & kTaskBox) {
    const auto box = loss_box(outputs.box, sample.y_box);
    r.box = box.loss;
    for (std::size_t i = 0; i < 4; ++i) r.grad_box[i] = weights.box * box.grad[i];
    r.total += weights.box * box.loss;
  }
  if (sample.tasks & kTaskLandmark) {
    const auto lm = loss_landmark(outputs.landmark, sample.y_landmark);
    r.landmark = lm.loss;
    for (std::size_t i = 0; i < 10; ++i) r.grad_landmark[i] = weights.landmark * lm.grad[i];
    r.total += weights.landmark * lm.loss;
  }
  return r;
}

}  // namespace cascadet
