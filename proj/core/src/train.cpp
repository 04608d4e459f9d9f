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

#include "cascadet/train.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "cascadet/error.hpp"
#include "cascadet/loss.hpp"
#include "cascadet/ops.hpp"

namespace cascadet {
namespace {

struct Activations {
  std::vector<float> pre;     // hidden pre-activation
  std::vector<float> hidden;  // after ReLU
  std::array<float, 2> prob{};
};

Activations run(const HeadParams& p, std::span<const float> x) {
  Activations a;
  a.pre = ops::dense(x, p.hidden_weight, p.hidden_bias.data());
  a.hidden = a.pre;
  for (float& v : a.hidden) v = std::max(v, 0.0f);
  const auto logits = ops::dense(a.hidden, p.logits_weight, p.logits_bias.data());
  const auto prob = ops::softmax(logits);
  a.prob = {prob[0], prob[1]};
  return a;
}

int target_of(MaskLabel label) { return label == MaskLabel::kMask ? 1 : 0; }

}  // namespace

HeadParams HeadParams::random(int features, int hidden, std::uint64_t seed) {
  const auto a = random_init({{"head.hidden.weight", Shape{hidden, features}},
                              {"head.hidden.bias", Shape{hidden}},
                              {"head.logits.weight", Shape{2, hidden}},
                              {"head.logits.bias", Shape{2}}},
                             seed);
  return from_archive(a);
}

HeadParams HeadParams::from_archive(const WeightArchive& a) {
  HeadParams p{a.at("head.hidden.weight"), a.at("head.hidden.bias"), a.at("head.logits.weight"),
               a.at("head.logits.bias")};
  if (p.hidden_weight.shape().rank() != 2 || p.logits_weight.shape().rank() != 2 ||
      p.logits_weight.shape()[0] != 2 || p.logits_weight.shape()[1] != p.hidden() ||
      p.hidden_bias.size() != static_cast<std::size_t>(p.hidden()) || p.logits_bias.size() != 2) {
    throw ShapeError("inconsistent classifier head parameter shapes");
  }
  return p;
}

void HeadParams::store(WeightArchive& archive) const {
  auto put = [&](const char* name, const Tensor& t) {
    if (archive.contains(name)) {
      archive.replace(name, t);
    } else {
      archive.add(name, t);
    }
  };
  put("head.hidden.weight", hidden_weight);
  put("head.hidden.bias", hidden_bias);
  put("head.logits.weight", logits_weight);
  put("head.logits.bias", logits_bias);
}

std::array<float, 2> head_forward(const HeadParams& params, std::span<const float> features) {
  return run(params, features).prob;
}

EpochStats evaluate_head(const HeadParams& params, std::span<const LabeledFeature> data) {
  EpochStats s;
  if (data.empty()) return s;
  int correct = 0;
  for (const auto& sample : data) {
    const auto prob = head_forward(params, sample.features);
    s.loss += loss_det(prob[0], target_of(sample.label)).loss;
    if (prediction_from(prob).label == sample.label) ++correct;
  }
  s.loss /= static_cast<double>(data.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return s;
}

TrainResult train_head(HeadParams params, std::span<const LabeledFeature> data,
                       const TrainOptions& options) {
  if (data.empty()) throw ArgumentError("training set is empty");
  if (!(options.learning_rate >= 0.0)) throw ArgumentError("learning rate must be non-negative");
  if (options.epochs < 0 || options.batch_size < 1) throw ArgumentError("invalid epoch/batch settings");
  for (const auto& s : data) {
    if (static_cast<int>(s.features.size()) != params.features()) {
      throw ShapeError("feature vector length " + std::to_string(s.features.size()) +
                       " does not match head input " + std::to_string(params.features()));
    }
  }

  const int F = params.features();
  const int H = params.hidden();
  TrainResult result;
  result.curve.push_back(evaluate_head(params, data));

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Lcg64 rng(options.seed);

  std::vector<double> g_w1(static_cast<std::size_t>(H) * F), g_b1(H), g_w2(2 * H), g_b2(2);
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::fill(g_w1.begin(), g_w1.end(), 0.0);
      std::fill(g_b1.begin(), g_b1.end(), 0.0);
      std::fill(g_w2.begin(), g_w2.end(), 0.0);
      std::fill(g_b2.begin(), g_b2.end(), 0.0);

      for (std::size_t k = start; k < end; ++k) {
        const auto& sample = data[order[k]];
        const Activations a = run(params, sample.features);
        // Chain rule through the 2-way softmax: p0 = sigmoid(z0 - z1).
        const double p0 = a.prob[0];
        const double dl_dp = loss_det(p0, target_of(sample.label)).grad;
        const double dz0 = dl_dp * p0 * (1.0 - p0);
        const std::array<double, 2> dz{dz0, -dz0};
        for (int c = 0; c < 2; ++c) {
          g_b2[c] += dz[c];
          for (int j = 0; j < H; ++j) g_w2[c * H + j] += dz[c] * a.hidden[j];
        }
        for (int j = 0; j < H; ++j) {
          if (!(a.pre[j] > 0.0f)) continue;
          const double dh = dz[0] * params.logits_weight[j] + dz[1] * params.logits_weight[H + j];
          g_b1[j] += dh;
          for (int f = 0; f < F; ++f) g_w1[static_cast<std::size_t>(j) * F + f] += dh * sample.features[f];
        }
      }

      const double step = options.learning_rate / static_cast<double>(end - start);
      auto apply = [step](Tensor& t, const std::vector<double>& g) {
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(t[i] - step * g[i]);
      };
      apply(params.hidden_weight, g_w1);
      apply(params.hidden_bias, g_b1);
      apply(params.logits_weight, g_w2);
      apply(params.logits_bias, g_b2);
    }

    EpochStats stats = evaluate_head(params, data);
    stats.epoch = epoch;
    if (!std::isfinite(stats.loss)) {
      throw Error("training diverged at epoch " + std::to_string(epoch) +
                  " (non-finite loss); lower the learning rate");
    }
    result.curve.push_back(stats);
  }
  result.params = std::move(params);
  return result;
}

std::vector<LabeledFeature> synthetic_clusters(int count, int features, std::uint64_t seed,
                                               double margin) {
  if (count < 1 || features < 1) throw ArgumentError("synthetic set needs positive sizes");
  Lcg64 rng(seed);
  const double norm = std::sqrt(static_cast<double>(features));
  std::vector<LabeledFeature> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const MaskLabel label = (i % 2 == 0) ? MaskLabel::kMask : MaskLabel::kNoMask;
    const double centre = label == MaskLabel::kMask ? 1.0 : -1.0;
    LabeledFeature s{std::vector<float>(static_cast<std::size_t>(features)), label};
    for (;;) {
      double projection = 0.0;
      for (float& v : s.features) {
        v = static_cast<float>(centre + 0.5 * rng.normal());
        projection += v;
      }
      projection /= norm;
      if (projection * centre >= margin) break;
    }
    out.push_back(std::move(s));
  }
  return out;
}

TrainResult train_demo(std::uint64_t seed, const DemoSetup& setup) {
  const auto data = synthetic_clusters(setup.samples, setup.features, seed);
  TrainOptions options = setup.options;
  options.seed = seed;
  return train_head(HeadParams::random(setup.features, setup.hidden, seed + 1), data, options);
}

void write_loss_curve_csv(std::ostream& os, std::span<const EpochStats> curve) {
  os << "epoch,loss,accuracy\n";
  char line[96];
  for (const auto& s : curve) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.6f\n", s.epoch, s.loss, s.accuracy);
    os << line;
  }
}

}  // namespace cascadet
