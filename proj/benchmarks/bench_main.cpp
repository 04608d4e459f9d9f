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


#include <benchmark/benchmark.h>

#include "cascadet/classifier.hpp"
#include "cascadet/detector.hpp"
#include "cascadet/fixtures.hpp"
#include "cascadet/frame.hpp"
#include "cascadet/ops.hpp"

namespace {

using namespace cascadet;

Tensor random_tensor(const Shape& shape, std::uint64_t seed) {
  return random_init({{"t", shape}}, seed).at("t");
}

void BM_Conv3x3(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int e = static_cast<int>(state.range(1));
  const Tensor x = random_tensor(Shape{1, c, e, e}, 1);
  const Tensor w = random_tensor(Shape{c, c, 3, 3}, 2);
  const std::vector<float> b(static_cast<std::size_t>(c), 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(ops::conv2d(x, w, b, 1, 1));
  state.SetItemsProcessed(state.iterations() * 9LL * c * c * e * e);
}
BENCHMARK(BM_Conv3x3)->Args({16, 48})->Args({32, 24})->Args({64, 12});

void BM_Depthwise3x3(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  const int e = static_cast<int>(state.range(1));
  const Tensor x = random_tensor(Shape{1, c, e, e}, 3);
  const Tensor w = random_tensor(Shape{c, 1, 3, 3}, 4);
  const std::vector<float> b(static_cast<std::size_t>(c), 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(ops::depthwise_conv2d(x, w, b, 1, 1));
  state.SetItemsProcessed(state.iterations() * 9LL * c * e * e);
}
BENCHMARK(BM_Depthwise3x3)->Args({96, 24})->Args({384, 6});

void BM_ProposalNetwork(benchmark::State& state) {
  const CascadeNetworks nets = CascadeNetworks::build(make_cascade_fixture(7));
  const int e = static_cast<int>(state.range(0));
  const Tensor x = random_tensor(Shape{1, 3, e, e}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(nets.proposal.forward(x));
}
BENCHMARK(BM_ProposalNetwork)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ClassifierForward(benchmark::State& state) {
  BackboneSpec spec;
  spec.input_extent = static_cast<int>(state.range(0));
  const MaskClassifier c = build_classifier(spec, make_classifier_fixture(spec, 3));
  const Tensor crop = random_tensor(Shape{1, 3, spec.input_extent, spec.input_extent}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(classify_face(c, crop));
}
BENCHMARK(BM_ClassifierForward)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_Nms(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  Lcg64 rng(9);
  std::vector<FaceCandidate> boxes(static_cast<std::size_t>(n));
  for (auto& b : boxes) {
    const float x = rng.uniform(0, 600), y = rng.uniform(0, 340);
    const float s = rng.uniform(12, 80);
    b.box = {x, y, x + s, y + s};
    b.score = rng.uniform(0, 1);
  }
  for (auto _ : state) benchmark::DoNotOptimize(nms(boxes, 0.5f, NmsMode::kUnion));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Nms)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_DetectFaces(benchmark::State& state) {
  const CascadeNetworks nets = CascadeNetworks::build(make_cascade_fixture(7));
  const Tensor frame = to_tensor(make_fixture_frame(320, 180, 0, 7));
  for (auto _ : state) benchmark::DoNotOptimize(detect_faces(frame, nets, CascadeConfig{}));
}
BENCHMARK(BM_DetectFaces)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
