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
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cascadet/eval.hpp"
#include "oracles.hpp"

namespace cascadet {
namespace {

Detection det(int frame, BoundingBox b, MaskLabel l, float score) {
  return {frame, b, l, 0.9f, score};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(MatchTest, PerfectAndEmpty) {
  std::vector<Detection> d;
  std::vector<GroundTruthEntry> t;
  for (int i = 0; i < 4; ++i) {
    const BoundingBox b{10.0f * i, 0, 10.0f * i + 8, 8};
    d.push_back(det(0, b, MaskLabel::kMask, 0.5f));
    t.push_back({0, b, MaskLabel::kMask});
  }
  const TaskCounts c = match_detections(d, t);
  EXPECT_EQ(c.face, (ConfusionCounts{4, 0, 0, 0}));
  EXPECT_EQ(c.mask, (ConfusionCounts{4, 0, 0, 0}));

  const TaskCounts lone = match_detections(std::vector<Detection>{d[0]}, {});
  EXPECT_EQ(lone.face, (ConfusionCounts{0, 0, 1, 0}));
  const TaskCounts none = match_detections({}, {});
  EXPECT_EQ(none.face, ConfusionCounts{});
  EXPECT_EQ(none.mask, ConfusionCounts{});
}

TEST(MatchTest, MaskQuadrantsAndFrames) {
  const BoundingBox b{0, 0, 10, 10};
  const std::vector<Detection> d{det(0, b, MaskLabel::kMask, 0.9f), det(1, b, MaskLabel::kNoMask, 0.9f),
                                 det(2, b, MaskLabel::kMask, 0.9f), det(3, b, MaskLabel::kNoMask, 0.9f)};
  const std::vector<GroundTruthEntry> t{{0, b, MaskLabel::kMask}, {1, b, MaskLabel::kNoMask},
                                        {2, b, MaskLabel::kNoMask}, {3, b, MaskLabel::kMask},
                                        {4, b, MaskLabel::kMask}};
  const TaskCounts c = match_detections(d, t);
  EXPECT_EQ(c.face, (ConfusionCounts{4, 0, 0, 1}));
  EXPECT_EQ(c.mask, (ConfusionCounts{1, 1, 1, 1}));
}

TEST(MatchTest, HigherScoreClaimsTruthFirst) {
  const std::vector<GroundTruthEntry> t{{0, {0, 0, 10, 10}, MaskLabel::kMask}};
  const std::vector<Detection> d{det(0, {0, 0, 10, 10}, MaskLabel::kNoMask, 0.3f),
                                 det(0, {1, 0, 11, 10}, MaskLabel::kMask, 0.8f)};
  const TaskCounts c = match_detections(d, t);
  EXPECT_EQ(c.face, (ConfusionCounts{1, 0, 1, 0}));
  EXPECT_EQ(c.mask.tp, 1);
  EXPECT_EQ(match_detections(d, t, 0.95).face, (ConfusionCounts{1, 0, 1, 0}));
  EXPECT_EQ(match_detections(d, t, 1.01).face, (ConfusionCounts{0, 0, 2, 1}));
}

struct RandomSet {
  std::vector<Detection> dets;
  std::vector<GroundTruthEntry> truths;
};

RandomSet random_set(std::uint64_t seed) {
  Lcg64 rng(seed);
  RandomSet s;
  auto box = [&] {
    const float x = static_cast<float>(rng.below(40)), y = static_cast<float>(rng.below(40));
    return BoundingBox{x, y, x + 6 + static_cast<float>(rng.below(12)), y + 6 + static_cast<float>(rng.below(12))};
  };
  for (int f = 0; f < 5; ++f) {
    for (int i = 0; i < 20; ++i) {
      const MaskLabel l = rng.below(2) ? MaskLabel::kMask : MaskLabel::kNoMask;
      s.dets.push_back({f, box(), l, rng.uniform(0, 1), static_cast<float>(rng.below(8)) / 8.0f});
      s.truths.push_back({f, box(), rng.below(2) ? MaskLabel::kMask : MaskLabel::kNoMask});
    }
  }
  return s;
}

TEST(MatchTest, AgreesWithReferenceAndConserves) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RandomSet s = random_set(seed);
    for (const double thr : {0.1, 0.3, 0.5}) {
      const TaskCounts got = match_detections(s.dets, s.truths, thr);
      const TaskCounts want = oracle::reference_match(s.dets, s.truths, thr);
      EXPECT_EQ(got.face, want.face) << seed;
      EXPECT_EQ(got.mask, want.mask) << seed;
      EXPECT_EQ(got.face.tp + got.face.fp, static_cast<long>(s.dets.size()));
      EXPECT_EQ(got.face.tp + got.face.fn, static_cast<long>(s.truths.size()));
      EXPECT_EQ(got.face.tn, 0);
      const ConfusionCounts& m = got.mask;
      EXPECT_EQ(m.tp + m.tn + m.fp + m.fn, got.face.tp);
    }
  }
}

TEST(MatchTest, PermutationInvariant) {
  const RandomSet s = random_set(99);
  const TaskCounts base = match_detections(s.dets, s.truths);
  Lcg64 rng(3);
  for (int k = 0; k < 10; ++k) {
    std::vector<Detection> d = s.dets;
    std::vector<GroundTruthEntry> t = s.truths;
    for (std::size_t i = d.size(); i > 1; --i) std::swap(d[i - 1], d[rng.below(i)]);
    for (std::size_t i = t.size(); i > 1; --i) std::swap(t[i - 1], t[rng.below(i)]);
    const TaskCounts c = match_detections(d, t);
    EXPECT_EQ(c.face, base.face);
    EXPECT_EQ(c.mask, base.mask);
  }
}

TEST(MetricsTest, Examples) {
  const Metrics all = compute_metrics({2, 0, 0, 0});
  EXPECT_EQ(*all.precision, 100.0);
  EXPECT_EQ(*all.recall, 100.0);
  EXPECT_EQ(*all.accuracy, 100.0);

  const Metrics m = compute_metrics({94, 0, 6, 14});
  EXPECT_NEAR(*m.precision, 94.0, 1e-9);
  EXPECT_NEAR(*m.recall, 9400.0 / 108.0, 1e-9);
  EXPECT_NEAR(*m.accuracy, 9400.0 / 114.0, 1e-9);
  EXPECT_EQ(format_percent(m.recall), "87.04%");
  EXPECT_EQ(format_percent(m.accuracy), "82.46%");

  const Metrics zero = compute_metrics({});
  EXPECT_FALSE(zero.precision);
  EXPECT_FALSE(zero.recall);
  EXPECT_FALSE(zero.accuracy);
  EXPECT_EQ(format_percent(zero.precision), "undefined");

  // Equal error counts with no negatives collapse the three metrics.
  const Metrics eq = compute_metrics({30, 0, 7, 7});
  EXPECT_NEAR(*eq.precision, *eq.recall, 1e-12);
  EXPECT_NEAR(*eq.accuracy, 3000.0 / 44.0, 1e-9);
}

TEST(ReportTest, RowsAndLiteratureConstants) {
  const EvalReport r = make_report({{94, 0, 6, 14}, {10, 5, 2, 3}});
  const std::string bare = render_report(r, {});
  EXPECT_EQ(bare.find("[literature]"), std::string::npos);
  EXPECT_NE(bare.find("94.00%"), std::string::npos);

  const auto t1 = cascaded_framework_baseline();
  const std::string table1 = render_report(r, t1, TableLayout::kAccuracyRecall);
  EXPECT_NE(table1.find("86.6"), std::string::npos);
  EXPECT_NE(table1.find("87.8"), std::string::npos);
  EXPECT_NE(table1.find("[literature]"), std::string::npos);

  const auto t2 = retinafacemask_baseline();
  const std::string table2 = render_report(r, t2, TableLayout::kPrecisionRecall);
  for (const char* v : {"83.0", "95.6", "82.3", "89.1"}) EXPECT_NE(table2.find(v), std::string::npos) << v;

  const auto own = reported_framework_results();
  const std::string full = render_report(r, own);
  for (const char* v : {"94.50", "86.38", "81.84", "84.39", "80.92", "81.74"}) {
    EXPECT_NE(full.find(v), std::string::npos) << v;
  }

  EXPECT_EQ(count_lines(render_csv(r, {})), 2u);
  std::vector<BaselineRow> every = t1;
  every.insert(every.end(), t2.begin(), t2.end());
  every.insert(every.end(), own.begin(), own.end());
  EXPECT_EQ(count_lines(render_csv(r, every)), 2u + every.size());
  EXPECT_NE(render_csv(make_report({}), {}).find("undefined"), std::string::npos);
}

TEST(JsonlTest, RoundTrip) {
  const auto dir = std::filesystem::path(oracle::scratch_dir("jsonl"));
  const RandomSet s = random_set(4);
  std::vector<Detection> dets;
  for (auto d : s.dets) {
    d.box = {std::floor(d.box.x1), std::floor(d.box.y1), std::ceil(d.box.x2), std::ceil(d.box.y2)};
    dets.push_back(d);
  }
  {
    std::ofstream log(dir / "log.jsonl"), truth(dir / "truth.jsonl");
    for (const auto& d : dets) log << to_json_line(d) << '\n';
    for (const auto& t : s.truths) truth << to_json_line(t) << '\n';
  }
  const auto back = read_detection_log(dir / "log.jsonl");
  ASSERT_EQ(back.size(), dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    EXPECT_EQ(back[i].frame, dets[i].frame);
    EXPECT_EQ(back[i].box, dets[i].box);
    EXPECT_EQ(back[i].label, dets[i].label);
    EXPECT_EQ(back[i].confidence, dets[i].confidence);
    EXPECT_EQ(back[i].face_score, dets[i].face_score);
  }
  const auto truths = read_ground_truth(dir / "truth.jsonl");
  ASSERT_EQ(truths.size(), s.truths.size());
  EXPECT_EQ(truths[7].box, s.truths[7].box);

  std::ofstream(dir / "bad.jsonl") << to_json_line(dets[0]) << "\n{\"frame\": 1}\n";
  try {
    read_detection_log(dir / "bad.jsonl");
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace cascadet
