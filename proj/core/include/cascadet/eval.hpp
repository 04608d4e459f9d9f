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

// Ground-truth matching plus precision / recall / accuracy for the face and
// mask tasks, and comparison tables against literature figures.

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cascadet/detection.hpp"

namespace cascadet {

struct ConfusionCounts {
  long tp = 0, tn = 0, fp = 0, fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp; tn += o.tn; fp += o.fp; fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct TaskCounts {
  ConfusionCounts face;
  ConfusionCounts mask;  // over matched pairs; Mask is the positive class
};

// Greedy matching per frame. Detections are visited by descending face score
// (ties by box, then label, so input order never matters); each takes the
// unmatched truth with the highest IoU >= iou_threshold. Face TN is always 0.
TaskCounts match_detections(std::span<const Detection> detections,
                            std::span<const GroundTruthEntry> truths, double iou_threshold = 0.5);

// Percentages; nullopt when the denominator is zero.
struct Metrics {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;
};

Metrics compute_metrics(const ConfusionCounts& counts);

struct EvalReport {
  TaskCounts counts;
  Metrics face;
  Metrics mask;
};

EvalReport make_report(const TaskCounts& counts);

// A literature row. Cells hold the published percentage text verbatim
// (without the % sign); empty cells were not reported.
struct BaselineRow {
  std::string approach;
  std::string face_precision, face_recall, face_accuracy;
  std::string mask_precision, mask_recall, mask_accuracy;
};

// Cascaded mask-detection framework: mask accuracy and recall.
std::vector<BaselineRow> cascaded_framework_baseline();
// RetinaFaceMask with a MobileNet backbone: face and mask precision/recall.
std::vector<BaselineRow> retinafacemask_baseline();
// Figures reported for the MTCNN + MobileNetV2 framework on its video set.
std::vector<BaselineRow> reported_framework_results();

enum class TableLayout {
  kFull,               // all six metrics
  kAccuracyRecall,     // mask accuracy, mask recall
  kPrecisionRecall,    // face/mask precision and recall
};

// Plain-text table: the measured row first, then baselines marked as
// literature values.
std::string render_report(const EvalReport& report, std::span<const BaselineRow> baselines,
                          TableLayout layout = TableLayout::kFull);

// Header line plus one data row for the measurement and one per baseline.
std::string render_csv(const EvalReport& report, std::span<const BaselineRow> baselines,
                       TableLayout layout = TableLayout::kFull);

std::string format_percent(const std::optional<double>& value);

}  // namespace cascadet
