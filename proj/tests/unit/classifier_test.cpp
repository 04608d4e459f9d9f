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


#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "cascadet/classifier.hpp"
#include "cascadet/fixtures.hpp"
#include "cascadet/frame.hpp"
#include "oracles.hpp"

namespace cascadet {
namespace {

BackboneSpec small_spec() {
  BackboneSpec s;
  s.input_extent = 32;
  return s;
}

const WeightArchive& small_weights() {
  static const WeightArchive w = make_classifier_fixture(small_spec(), 11);
  return w;
}

MaskClassifier with_logits(float w_scale, std::vector<float> bias) {
  WeightArchive w = small_weights();
  const Tensor& lw = w.at("head.logits.weight");
  Tensor scaled = lw;
  for (float& v : scaled.data()) v *= w_scale;
  w.replace("head.logits.weight", scaled);
  w.replace("head.logits.bias", Tensor(Shape{2}, std::move(bias)));
  return build_classifier(small_spec(), w);
}

Tensor random_crop(int extent, std::uint64_t seed) {
  Lcg64 rng(seed);
  return oracle::random_tensor(Shape{1, 3, extent, extent}, rng);
}

TEST(ClassifierTest, ZeroHeadIsTieAndNoMask) {
  const MaskClassifier c = with_logits(0.0f, {0.0f, 0.0f});
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MaskPrediction p = classify_face(c, random_crop(32, seed));
    EXPECT_EQ(p.probabilities[0], 0.5f);
    EXPECT_EQ(p.probabilities[1], 0.5f);
    EXPECT_EQ(p.label, MaskLabel::kNoMask);
    EXPECT_EQ(p.confidence, 0.5f);
  }
}

TEST(ClassifierTest, CraftedLogitsGiveTwoThirdsMask) {
  const MaskClassifier c = with_logits(0.0f, {static_cast<float>(std::log(2.0)), 0.0f});
  const MaskPrediction p = classify_face(c, random_crop(32, 4));
  EXPECT_EQ(p.label, MaskLabel::kMask);
  EXPECT_NEAR(p.confidence, 2.0 / 3.0, 1e-6);
}

TEST(ClassifierTest, PredictionFromTieRule) {
  EXPECT_EQ(prediction_from(std::vector<float>{0.6f, 0.4f}).label, MaskLabel::kMask);
  EXPECT_EQ(prediction_from(std::vector<float>{0.4f, 0.6f}).label, MaskLabel::kNoMask);
  const auto tie = prediction_from(std::vector<float>{0.5f, 0.5f});
  EXPECT_EQ(tie.label, MaskLabel::kNoMask);
  EXPECT_EQ(tie.confidence, 0.5f);
}

TEST(ClassifierTest, LabelStrings) {
  EXPECT_STREQ(to_string(MaskLabel::kMask), "Mask");
  EXPECT_STREQ(to_string(MaskLabel::kNoMask), "NoMask");
  EXPECT_EQ(parse_mask_label("Mask"), MaskLabel::kMask);
  EXPECT_EQ(parse_mask_label("NoMask"), MaskLabel::kNoMask);
  EXPECT_ANY_THROW(parse_mask_label("maybe"));
}

TEST(ClassifierTest, BlockCountEnforced) {
  BackboneSpec s = small_spec();
  s.groups.back().repeats = 2;
  EXPECT_EQ(s.block_count(), 18);
  EXPECT_THROW(s.validate(), ArgumentError);
  EXPECT_ANY_THROW(build_classifier(s, small_weights()));
  s.groups.back().repeats = 1;
  s.groups.front().repeats = 0;
  EXPECT_THROW(s.validate(), ArgumentError);
}

TEST(ClassifierTest, MissingParameterNamed) {
  WeightArchive partial;
  for (const auto& [name, t] : small_weights().entries()) {
    if (name != "block7.project.weight") partial.add(name, t);
  }
  try {
    build_classifier(small_spec(), partial);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("block7.project.weight"), std::string::npos) << e.what();
  }
}

TEST(ClassifierTest, ShapesFollowStrideArithmetic) {
  BackboneSpec spec;  // extent 96
  // Stem halves to 48; group strides 1,2,2,2,1,2,1 over repeats 1,2,3,4,3,3,1.
  const std::vector<int> want{48, 24, 24, 12, 12, 12, 6, 6, 6, 6, 6, 6, 6, 3, 3, 3, 3};
  EXPECT_EQ(block_extents(spec), want);
  const std::vector<int> channels{16, 24, 24, 32, 32, 32, 64, 64, 64, 64, 96, 96, 96, 160, 160, 160, 320};

  const MaskClassifier c = build_classifier(spec, make_classifier_fixture(spec, 2));
  std::vector<std::string> names;
  for (int i = 0; i < 17; ++i) names.push_back("block" + std::to_string(i));
  names.push_back("stem");
  names.push_back("prob");
  const auto outs = c.network.forward(random_crop(96, 1), names);
  EXPECT_EQ(outs.at("stem").shape(), (Shape{1, 32, 48, 48}));
  for (int i = 0; i < 17; ++i) {
    EXPECT_EQ(outs.at(names[i]).shape(), (Shape{1, channels[i], want[i], want[i]})) << names[i];
  }
  const Tensor& prob = outs.at("prob");
  EXPECT_EQ(prob.size(), 2u);
  EXPECT_NEAR(prob.data()[0] + prob.data()[1], 1.0, 1e-6);
}

TEST(ClassifierTest, WrongCropShapeRejected) {
  const MaskClassifier c = build_classifier(small_spec(), small_weights());
  EXPECT_THROW(classify_face(c, random_crop(48, 1)), ShapeError);
}

TEST(ClassifierTest, LogitScalingKeepsLabel) {
  const MaskClassifier base = build_classifier(small_spec(), small_weights());
  const std::vector<float> bias(small_weights().at("head.logits.bias").data().begin(),
                                small_weights().at("head.logits.bias").data().end());
  for (const float k : {0.25f, 3.0f, 40.0f}) {
    std::vector<float> b = bias;
    for (float& v : b) v *= k;
    const MaskClassifier c = with_logits(k, b);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Tensor crop = random_crop(32, seed);
      const MaskPrediction a = classify_face(base, crop), s = classify_face(c, crop);
      EXPECT_EQ(a.label, s.label);
      EXPECT_NEAR(s.probabilities[0] + s.probabilities[1], 1.0, 1e-6);
      EXPECT_GE(s.probabilities[0], 0.0f);
      EXPECT_GE(s.probabilities[1], 0.0f);
    }
  }
}

TEST(ClassifierTest, ClassifyAllPreservesOrder) {
  const MaskClassifier c = build_classifier(small_spec(), small_weights());
  const Tensor frame = to_tensor(make_fixture_frame(120, 90, 0, 3));
  EXPECT_TRUE(classify_all(c, frame, {}).empty());

  std::vector<FaceCandidate> faces;
  Lcg64 rng(12);
  for (int i = 0; i < 10; ++i) {
    FaceCandidate f;
    const float x = rng.uniform(0, 80), y = rng.uniform(0, 50);
    f.box = {x, y, x + rng.uniform(10, 40), y + rng.uniform(10, 40)};
    f.score = rng.uniform(0, 1);
    faces.push_back(f);
  }
  const auto one = classify_all(c, frame, {faces[3]});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].face.box, faces[3].box);

  const auto all = classify_all(c, frame, faces);
  ASSERT_EQ(all.size(), faces.size());
  std::vector<FaceCandidate> reversed(faces.rbegin(), faces.rend());
  const auto back = classify_all(c, frame, reversed);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    EXPECT_EQ(all[i].face.box, faces[i].box);
    EXPECT_EQ(back[faces.size() - 1 - i].face.box, faces[i].box);
    EXPECT_EQ(back[faces.size() - 1 - i].prediction.probabilities, all[i].prediction.probabilities);
  }
  // The fixture frame is also checked against a direct crop.
  const MaskPrediction direct = classify_face(
      c, crop_resize(normalize(frame, c.preprocess), square_pad(faces[0].box), 32));
  EXPECT_EQ(direct.probabilities, all[0].prediction.probabilities);
}

TEST(ClassifierTest, FixtureSeparatesRenderedFaces) {
  const MaskClassifier c = build_classifier(small_spec(), small_weights());
  std::vector<GroundTruthEntry> truth;
  const Tensor frame = to_tensor(make_fixture_frame(320, 240, 0, 9, &truth));
  ASSERT_FALSE(truth.empty());
  std::vector<FaceCandidate> faces;
  for (const auto& t : truth) faces.push_back({t.box, 1.0f, {}, {}});
  const auto out = classify_all(c, frame, faces);
  int agree = 0;
  for (std::size_t i = 0; i < out.size(); ++i) agree += out[i].prediction.label == truth[i].label;
  EXPECT_GE(agree * 2, static_cast<int>(out.size()));
}

}  // namespace
}  // namespace cascadet
