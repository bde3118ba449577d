/* Copyright 2026 The MLPerf Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "rtbench/metrics.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <set>

namespace rtbench {

namespace {

void CheckBox(const BBox& b, bool prediction) {
  if (!(b.x1 < b.x2 && b.y1 < b.y2)) {
    throw MetricsError("box must have x1 < x2 and y1 < y2");
  }
  if (prediction && !(b.score >= 0 && b.score <= 1)) {
    throw MetricsError("prediction score must be in [0, 1]");
  }
}

}  // namespace

double Iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a.x2 - a.x1) * (a.y2 - a.y1);
  const double area_b = (b.x2 - b.x1) * (b.y2 - b.y1);
  return inter / (area_a + area_b - inter);
}

double AveragePrecision(std::span<const DetectionFrame> frames,
                        double iou_threshold) {
  struct Candidate {
    size_t frame;
    const BBox* box;
  };
  std::vector<Candidate> candidates;
  size_t num_gt = 0;
  for (size_t f = 0; f < frames.size(); ++f) {
    for (const auto& p : frames[f].predictions) {
      CheckBox(p, true);
      candidates.push_back({f, &p});
    }
    for (const auto& g : frames[f].ground_truths) CheckBox(g, false);
    num_gt += frames[f].ground_truths.size();
  }
  if (num_gt == 0) return candidates.empty() ? 1.0 : 0.0;
  if (candidates.empty()) return 0.0;

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.box->score > b.box->score;
                   });

  std::vector<std::vector<bool>> matched(frames.size());
  for (size_t f = 0; f < frames.size(); ++f) {
    matched[f].assign(frames[f].ground_truths.size(), false);
  }

  std::vector<double> precision(candidates.size());
  std::vector<double> recall(candidates.size());
  size_t tp = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto& gts = frames[candidates[i].frame].ground_truths;
    auto& used = matched[candidates[i].frame];
    double best = -1;
    size_t best_gt = gts.size();
    for (size_t g = 0; g < gts.size(); ++g) {
      if (used[g]) continue;
      double o = Iou(*candidates[i].box, gts[g]);
      if (o > best) {
        best = o;
        best_gt = g;
      }
    }
    if (best_gt < gts.size() && best >= iou_threshold) {
      used[best_gt] = true;
      ++tp;
    }
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }

  for (size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0;
  double prev_recall = 0;
  for (size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

double AveragePrecision(const std::vector<BBox>& predictions,
                        const std::vector<BBox>& ground_truths,
                        double iou_threshold) {
  DetectionFrame frame{predictions, ground_truths};
  return AveragePrecision(std::span<const DetectionFrame>(&frame, 1), iou_threshold);
}

double MeanAveragePrecision(std::span<const DetectionFrame> frames,
                            double iou_threshold) {
  std::set<uint32_t> classes;
  for (const auto& f : frames) {
    for (const auto& g : f.ground_truths) classes.insert(g.class_id);
  }
  if (classes.empty()) throw MetricsError("no ground-truth instances");

  double total = 0;
  for (uint32_t c : classes) {
    std::vector<DetectionFrame> per_class(frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
      for (const auto& p : frames[i].predictions) {
        if (p.class_id == c) per_class[i].predictions.push_back(p);
      }
      for (const auto& g : frames[i].ground_truths) {
        if (g.class_id == c) per_class[i].ground_truths.push_back(g);
      }
    }
    total += AveragePrecision(per_class, iou_threshold);
  }
  return total / static_cast<double>(classes.size());
}

double MeanIou(std::span<const SegmentationMask> predicted,
               std::span<const SegmentationMask> truth, uint32_t num_classes) {
  if (predicted.size() != truth.size()) {
    throw MetricsError("predicted and truth frame counts differ");
  }
  if (num_classes == 0) throw MetricsError("num_classes must be >= 1");
  std::vector<uint64_t> confusion(static_cast<size_t>(num_classes) * num_classes, 0);
  for (size_t f = 0; f < truth.size(); ++f) {
    const auto& p = predicted[f];
    const auto& t = truth[f];
    if (p.width != t.width || p.height != t.height) {
      throw MetricsError("mask dimensions differ");
    }
    const size_t n = static_cast<size_t>(t.width) * t.height;
    if (p.labels.size() != n || t.labels.size() != n) {
      throw MetricsError("mask label count does not match width * height");
    }
    for (size_t i = 0; i < n; ++i) {
      if (t.labels[i] >= num_classes || p.labels[i] >= num_classes) {
        throw MetricsError("class id " +
                           std::to_string(std::max(t.labels[i], p.labels[i])) +
                           " >= num_classes " + std::to_string(num_classes));
      }
      ++confusion[static_cast<size_t>(t.labels[i]) * num_classes + p.labels[i]];
    }
  }

  long double sum = 0;
  uint32_t present = 0;
  for (uint32_t c = 0; c < num_classes; ++c) {
    uint64_t row = 0, col = 0;
    for (uint32_t k = 0; k < num_classes; ++k) {
      row += confusion[static_cast<size_t>(c) * num_classes + k];
      col += confusion[static_cast<size_t>(k) * num_classes + c];
    }
    if (row == 0) continue;
    const uint64_t diag = confusion[static_cast<size_t>(c) * num_classes + c];
    sum += static_cast<long double>(diag) / static_cast<long double>(row + col - diag);
    ++present;
  }
  if (present == 0) throw MetricsError("truth masks are empty");
  return static_cast<double>(sum / present);
}

double MeanIou(const SegmentationMask& predicted, const SegmentationMask& truth,
               uint32_t num_classes) {
  return MeanIou(std::span<const SegmentationMask>(&predicted, 1),
                 std::span<const SegmentationMask>(&truth, 1), num_classes);
}

GateResult AccuracyGate(double measured, double reference, double constraint) {
  if (!(reference > 0)) throw MetricsError("FP32 reference must be > 0");
  if (!(constraint > 0 && constraint <= 1)) {
    throw MetricsError("accuracy constraint must be in (0, 1]");
  }
  GateResult r;
  r.measured = measured;
  r.reference = reference;
  r.constraint = constraint;
  r.threshold = reference * constraint;
  r.passed = measured >= r.threshold;
  return r;
}

namespace {

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    std::string field = line.substr(start, pos - start);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) {
      field.pop_back();
    }
    size_t lead = field.find_first_not_of(' ');
    out.push_back(lead == std::string::npos ? "" : field.substr(lead));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T ParseField(const std::string& s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw MetricsError(where + ": bad field '" + s + "'");
  }
  return v;
}

// Calls fn(fields, where) for each non-comment line.
template <typename Fn>
void ForEachRecord(std::istream& in, const char* what, Fn fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(SplitFields(line), std::string(what) + " line " + std::to_string(line_no));
  }
}

BBox ParseBox(const std::vector<std::string>& f, const std::string& where,
              bool prediction) {
  BBox b;
  b.class_id = ParseField<uint32_t>(f[1], where);
  b.x1 = ParseField<double>(f[2], where);
  b.y1 = ParseField<double>(f[3], where);
  b.x2 = ParseField<double>(f[4], where);
  b.y2 = ParseField<double>(f[5], where);
  if (prediction) b.score = ParseField<double>(f[6], where);
  try {
    CheckBox(b, prediction);
  } catch (const MetricsError& e) {
    throw MetricsError(where + ": " + e.what());
  }
  return b;
}

}  // namespace

std::vector<DetectionFrame> ReadDetections(std::istream& ground_truth,
                                           std::istream& predictions) {
  std::map<std::string, DetectionFrame> frames;
  ForEachRecord(ground_truth, "ground truth", [&](const auto& f, const auto& where) {
    if (f.size() != 6) throw MetricsError(where + ": expected 6 fields");
    frames[f[0]].ground_truths.push_back(ParseBox(f, where, false));
  });
  ForEachRecord(predictions, "prediction", [&](const auto& f, const auto& where) {
    if (f.size() != 7) throw MetricsError(where + ": expected 7 fields");
    frames[f[0]].predictions.push_back(ParseBox(f, where, true));
  });
  std::vector<DetectionFrame> out;
  out.reserve(frames.size());
  for (auto& [id, frame] : frames) out.push_back(std::move(frame));
  return out;
}

std::vector<MaskRecord> ReadMasks(std::istream& in) {
  std::vector<MaskRecord> out;
  ForEachRecord(in, "mask", [&](const auto& f, const auto& where) {
    if (f.size() < 3) throw MetricsError(where + ": expected frame_id,width,height,...");
    MaskRecord r;
    r.frame_id = f[0];
    r.mask.width = ParseField<uint32_t>(f[1], where);
    r.mask.height = ParseField<uint32_t>(f[2], where);
    const size_t n = static_cast<size_t>(r.mask.width) * r.mask.height;
    if (f.size() != 3 + n) {
      throw MetricsError(where + ": expected " + std::to_string(n) + " labels, got " +
                         std::to_string(f.size() - 3));
    }
    r.mask.labels.reserve(n);
    for (size_t i = 3; i < f.size(); ++i) {
      r.mask.labels.push_back(ParseField<uint32_t>(f[i], where));
    }
    out.push_back(std::move(r));
  });
  std::stable_sort(out.begin(), out.end(), [](const MaskRecord& a, const MaskRecord& b) {
    return a.frame_id < b.frame_id;
  });
  return out;
}

}  // namespace rtbench
