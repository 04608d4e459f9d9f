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

#include "cascadet/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

namespace cascadet {
namespace {

auto box_key(const BoundingBox& b) { return std::make_tuple(b.x1, b.y1, b.x2, b.y2); }

bool detection_before(const Detection& a, const Detection& b) {
  if (a.face_score != b.face_score) return a.face_score > b.face_score;
  if (box_key(a.box) != box_key(b.box)) return box_key(a.box) < box_key(b.box);
  if (a.label != b.label) return a.label < b.label;
  return a.confidence > b.confidence;
}

bool truth_before(const GroundTruthEntry& a, const GroundTruthEntry& b) {
  if (box_key(a.box) != box_key(b.box)) return box_key(a.box) < box_key(b.box);
  return a.label < b.label;
}

void count_mask(ConfusionCounts& c, MaskLabel predicted, MaskLabel truth) {
  const bool p = predicted == MaskLabel::kMask;
  const bool t = truth == MaskLabel::kMask;
  if (p && t) ++c.tp;
  else if (!p && !t) ++c.tn;
  else if (p) ++c.fp;
  else ++c.fn;
}

std::optional<double> ratio(long num, long den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

struct Column {
  std::string header;
  std::optional<double> Metrics::*field;
  bool face;
  std::string BaselineRow::*cell;
};

std::vector<Column> columns(TableLayout layout) {
  const Column fp{"Face Precision", &Metrics::precision, true, &BaselineRow::face_precision};
  const Column fr{"Face Recall", &Metrics::recall, true, &BaselineRow::face_recall};
  const Column fa{"Face Accuracy", &Metrics::accuracy, true, &BaselineRow::face_accuracy};
  const Column mp{"Mask Precision", &Metrics::precision, false, &BaselineRow::mask_precision};
  const Column mr{"Mask Recall", &Metrics::recall, false, &BaselineRow::mask_recall};
  const Column ma{"Mask Accuracy", &Metrics::accuracy, false, &BaselineRow::mask_accuracy};
  switch (layout) {
    case TableLayout::kAccuracyRecall: return {{"Accuracy", ma.field, false, ma.cell},
                                               {"Recall", mr.field, false, mr.cell}};
    case TableLayout::kPrecisionRecall: return {fp, fr, mp, mr};
    case TableLayout::kFull: break;
  }
  return {fp, fr, fa, mp, mr, ma};
}

std::string format_number(const std::optional<double>& value) {
  if (!value) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *value);
  return buf;
}

constexpr const char* kMeasured = "Measured (this run)";

std::vector<std::vector<std::string>> table_rows(const EvalReport& report,
                                                 std::span<const BaselineRow> baselines,
                                                 const std::vector<Column>& cols, bool with_sign) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> measured{kMeasured};
  for (const auto& c : cols) {
    const auto& v = (c.face ? report.face : report.mask).*(c.field);
    measured.push_back(with_sign ? format_percent(v) : format_number(v));
  }
  rows.push_back(measured);
  for (const auto& b : baselines) {
    std::vector<std::string> row{b.approach + " [literature]"};
    for (const auto& c : cols) {
      const std::string& text = b.*(c.cell);
      row.push_back(text.empty() ? "-" : (with_sign ? text + "%" : text));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

TaskCounts match_detections(std::span<const Detection> detections,
                            std::span<const GroundTruthEntry> truths, double iou_threshold) {
  std::map<int, std::vector<Detection>> det_by_frame;
  std::map<int, std::vector<GroundTruthEntry>> truth_by_frame;
  for (const auto& d : detections) det_by_frame[d.frame].push_back(d);
  for (const auto& t : truths) truth_by_frame[t.frame].push_back(t);

  TaskCounts counts;
  for (auto& [frame, dets] : det_by_frame) {
    std::sort(dets.begin(), dets.end(), detection_before);
    auto it = truth_by_frame.find(frame);
    std::vector<GroundTruthEntry> empty;
    auto& gts = it == truth_by_frame.end() ? empty : it->second;
    std::sort(gts.begin(), gts.end(), truth_before);
    std::vector<bool> used(gts.size(), false);
    for (const auto& d : dets) {
      int best = -1;
      float best_iou = 0.0f;
      for (std::size_t t = 0; t < gts.size(); ++t) {
        if (used[t]) continue;
        const float v = iou(d.box, gts[t].box);
        if (v >= iou_threshold && (best < 0 || v > best_iou)) {
          best = static_cast<int>(t);
          best_iou = v;
        }
      }
      if (best < 0) {
        ++counts.face.fp;
        continue;
      }
      used[best] = true;
      ++counts.face.tp;
      count_mask(counts.mask, d.label, gts[best].label);
    }
    counts.face.fn += std::count(used.begin(), used.end(), false);
  }
  for (const auto& [frame, gts] : truth_by_frame) {
    if (!det_by_frame.contains(frame)) counts.face.fn += static_cast<long>(gts.size());
  }
  return counts;
}

Metrics compute_metrics(const ConfusionCounts& c) {
  return {ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn),
          ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn)};
}

EvalReport make_report(const TaskCounts& counts) {
  return {counts, compute_metrics(counts.face), compute_metrics(counts.mask)};
}

std::vector<BaselineRow> cascaded_framework_baseline() {
  return {{"Cascaded framework for mask detection", "", "", "", "", "87.8", "86.6"}};
}

std::vector<BaselineRow> retinafacemask_baseline() {
  return {{"RetinaFaceMask with MobileNet", "83.0", "95.6", "", "82.3", "89.1", ""}};
}

std::vector<BaselineRow> reported_framework_results() {
  return {{"MTCNN + MobileNetV2 framework (reported)", "94.50", "86.38", "81.84", "84.39", "80.92",
           "81.74"}};
}

std::string format_percent(const std::optional<double>& value) {
  if (!value) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *value);
  return buf;
}

std::string render_report(const EvalReport& report, std::span<const BaselineRow> baselines,
                          TableLayout layout) {
  const auto cols = columns(layout);
  auto rows = table_rows(report, baselines, cols, true);
  std::vector<std::string> header{"Approach"};
  for (const auto& c : cols) header.push_back(c.header);
  rows.insert(rows.begin(), header);

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string rule = "+";
  for (auto w : width) rule += std::string(w + 2, '-') + "+";
  rule += "\n";

  std::string out = rule;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += "|";
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      const auto& cell = rows[r][i];
      out += " " + cell + std::string(width[i] - cell.size(), ' ') + " |";
    }
    out += "\n";
    if (r == 0 || r + 1 == rows.size()) out += rule;
  }

  const auto& f = report.counts.face;
  const auto& m = report.counts.mask;
  out += "face counts: TP=" + std::to_string(f.tp) + " FP=" + std::to_string(f.fp) +
         " FN=" + std::to_string(f.fn) + " TN=" + std::to_string(f.tn) + "\n";
  out += "mask counts: TP=" + std::to_string(m.tp) + " FP=" + std::to_string(m.fp) +
         " FN=" + std::to_string(m.fn) + " TN=" + std::to_string(m.tn) + "\n";
  if (!baselines.empty()) {
    out += "[literature] rows are published figures on other datasets, not measured here.\n";
  }
  return out;
}

std::string render_csv(const EvalReport& report, std::span<const BaselineRow> baselines,
                       TableLayout layout) {
  const auto cols = columns(layout);
  std::string out = "approach,source";
  for (const auto& c : cols) out += "," + csv_escape(c.header);
  out += "\n";
  const auto rows = table_rows(report, baselines, cols, false);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string name = rows[r][0];
    if (r > 0) name = baselines[r - 1].approach;
    out += csv_escape(name) + (r == 0 ? ",measured" : ",literature");
    for (std::size_t i = 1; i < rows[r].size(); ++i) out += "," + csv_escape(rows[r][i]);
    out += "\n";
  }
  return out;
}

}  // namespace cascadet
