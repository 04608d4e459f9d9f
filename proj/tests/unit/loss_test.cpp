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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "cascadet/loss.hpp"
#include "cascadet/weights.hpp"
#include "oracles.hpp"

namespace cascadet {
namespace {

std::vector<double> draws(Lcg64& rng, int n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = lo + (hi - lo) * rng.next_unit();
  return v;
}

TEST(LossBoxTest, Examples) {
  const std::vector<double> t{0.1, -0.2, 0.3, 0.0};
  const auto same = loss_box(t, t);
  EXPECT_EQ(same.loss, 0.0);
  for (double g : same.grad) EXPECT_EQ(g, 0.0);
  const auto unit = loss_box(std::vector<double>{1, 0, 0, 0}, std::vector<double>{0, 0, 0, 0});
  EXPECT_EQ(unit.loss, 1.0);
  EXPECT_EQ(unit.grad, (std::vector<double>{2, 0, 0, 0}));
  EXPECT_THROW(loss_box(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), ArgumentError);
}

TEST(LossLandmarkTest, Examples) {
  std::vector<double> p(10, 0.25), t(10, 0.25);
  EXPECT_EQ(loss_landmark(p, t).loss, 0.0);
  p[7] += 1.0;
  EXPECT_EQ(loss_landmark(p, t).loss, 1.0);
  EXPECT_THROW(loss_landmark(std::vector<double>(4), std::vector<double>(4)), ArgumentError);
}

TEST(LossTest, QuadraticGradientsMatchFiniteDifferences) {
  Lcg64 rng(21);
  for (int n : {4, 10}) {
    for (int draw = 0; draw < 100; ++draw) {
      const auto pred = draws(rng, n), target = draws(rng, n);
      const auto lg = n == 4 ? loss_box(pred, target) : loss_landmark(pred, target);
      const auto fd = oracle::central_difference(
          [&](std::span<const double> x) {
            return (n == 4 ? loss_box(x, target) : loss_landmark(x, target)).loss;
          },
          pred, 1e-5);
      for (int i = 0; i < n; ++i) EXPECT_LE(oracle::relative_error(lg.grad[i], fd[i]), 1e-6);
      EXPECT_GE(lg.loss, 0.0);
    }
  }
}

TEST(LossDetTest, Examples) {
  EXPECT_NEAR(loss_det(0.5, 1).loss, 0.693147, 1e-6);
  EXPECT_NEAR(loss_det(0.5, 0).loss, std::log(2.0), 1e-12);
  EXPECT_LT(loss_det(1.0, 1).loss, 1e-6);
  EXPECT_TRUE(std::isfinite(loss_det(0.0, 1).loss));
  EXPECT_NEAR(loss_det(0.0, 1).loss, -std::log(kProbabilityClamp), 1e-9);
  EXPECT_THROW(loss_det(0.5, 2), ArgumentError);
  EXPECT_THROW(loss_det(0.5, -1), ArgumentError);
}

TEST(LossDetTest, GradientMatchesFiniteDifferences) {
  Lcg64 rng(22);
  for (int draw = 0; draw < 100; ++draw) {
    const double p = 0.02 + 0.96 * rng.next_unit();
    const int y = static_cast<int>(rng.below(2));
    const std::vector<double> at{p};
    const auto fd = oracle::central_difference(
        [&](std::span<const double> x) { return loss_det(x[0], y).loss; }, at, 1e-6);
    EXPECT_LE(oracle::relative_error(loss_det(p, y).grad, fd[0]), 1e-5) << p << ' ' << y;
  }
}

TEST(LossDetTest, ConvexMidpoint) {
  Lcg64 rng(23);
  for (int draw = 0; draw < 200; ++draw) {
    const double a = 0.01 + 0.98 * rng.next_unit(), b = 0.01 + 0.98 * rng.next_unit();
    const int y = static_cast<int>(rng.below(2));
    const double mid = loss_det(0.5 * (a + b), y).loss;
    EXPECT_LE(mid, 0.5 * (loss_det(a, y).loss + loss_det(b, y).loss) + 1e-12);
    EXPECT_GE(loss_det(a, y).loss, 0.0);
  }
}

TEST(MultitaskLossTest, MaskSelectsTerms) {
  TrainingSample s;
  s.y_det = 1;
  s.y_box = {0.1, 0.2, -0.1, 0.0};
  s.y_landmark.fill(0.5);
  StageOutputs o;
  o.p = 0.8;
  o.box = {0.0, 0.1, 0.0, 0.2};
  o.landmark.fill(0.4);

  s.tasks = kTaskDet;
  const TaskWeights w{};
  EXPECT_DOUBLE_EQ(multitask_loss(s, o, w).total, w.det * loss_det(0.8, 1).loss);
  EXPECT_EQ(multitask_loss(s, o, w).box, 0.0);

  s.tasks = kTaskDet | kTaskBox;
  const auto r = multitask_loss(s, o, {2.0, 0.25, 9.0});
  const double hand = 2.0 * -std::log(0.8) + 0.25 * (0.01 + 0.01 + 0.01 + 0.04);
  EXPECT_NEAR(r.total, hand, 1e-9);
  EXPECT_NEAR(r.grad_box[3], 0.25 * 2 * 0.2, 1e-12);
  EXPECT_EQ(r.grad_landmark[0], 0.0);

  s.tasks = kTaskDet | kTaskBox | kTaskLandmark;
  EXPECT_EQ(multitask_loss(s, o, {0.0, 0.0, 0.0}).total, 0.0);
  const auto all = multitask_loss(s, o);
  EXPECT_NEAR(all.landmark, 10 * 0.01, 1e-12);
  EXPECT_NEAR(all.total, all.det + 0.5 * all.box + 0.5 * all.landmark, 1e-12);
}

TEST(MultitaskLossTest, RejectsBadLabel) {
  TrainingSample s;
  s.y_det = 3;
  EXPECT_THROW(multitask_loss(s, StageOutputs{}), ArgumentError);
}

}  // namespace
}  // namespace cascadet
