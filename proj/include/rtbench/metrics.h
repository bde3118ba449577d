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

#ifndef RTBENCH_METRICS_H_
#define RTBENCH_METRICS_H_

#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtbench {

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Pixel box with x1 < x2 and y1 < y2. `score` is only meaningful for
// predictions.
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
  uint32_t class_id = 0;
  double score = 1.0;
};

double Iou(const BBox& a, const BBox& b);

struct DetectionFrame {
  std::vector<BBox> predictions;
  std::vector<BBox> ground_truths;
};

inline constexpr double kDefaultIouThreshold = 0.5;

// Single-class AP over all frames (class ids are ignored). Predictions are
// visited in descending score, ties in input order; each one takes the
// unmatched ground truth of its frame with the highest IoU, and is a true
// positive if that IoU >= iou_threshold. AP is the area under the
// precision/recall curve after making precision non-increasing in recall.
// No ground truth and no predictions is 1.0; either side empty otherwise
// is 0.0.
double AveragePrecision(std::span<const DetectionFrame> frames,
                        double iou_threshold = kDefaultIouThreshold);
double AveragePrecision(const std::vector<BBox>& predictions,
                        const std::vector<BBox>& ground_truths,
                        double iou_threshold = kDefaultIouThreshold);

// Unweighted mean of per-class AP over classes with at least one ground
// truth box. Predictions for classes absent from the ground truth are
// ignored. Throws MetricsError if there is no ground truth at all.
double MeanAveragePrecision(std::span<const DetectionFrame> frames,
                            double iou_threshold = kDefaultIouThreshold);

struct SegmentationMask {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint32_t> labels;  // row-major
};

// Confusion-matrix mIoU: per class tp / (tp + fp + fn), averaged over the
// classes present in `truth`.
double MeanIou(const SegmentationMask& predicted, const SegmentationMask& truth,
               uint32_t num_classes);
// Accumulates over several frames before taking per-class IoU.
double MeanIou(std::span<const SegmentationMask> predicted,
               std::span<const SegmentationMask> truth, uint32_t num_classes);

struct GateResult {
  double measured = 0;
  double reference = 0;
  double constraint = 0;
  double threshold = 0;
  bool passed = false;
};

// passed iff measured >= reference * constraint.
GateResult AccuracyGate(double measured, double reference, double constraint);

// Text interchange, one record per line, '#' comments:
//   ground truth   frame_id,class_id,x1,y1,x2,y2
//   prediction     frame_id,class_id,x1,y1,x2,y2,score
//   mask           frame_id,width,height,label_0,...,label_{w*h-1}
// Frames come out ordered by frame_id. Errors name the line number.
std::vector<DetectionFrame> ReadDetections(std::istream& ground_truth,
                                           std::istream& predictions);
struct MaskRecord {
  std::string frame_id;
  SegmentationMask mask;
};
std::vector<MaskRecord> ReadMasks(std::istream& in);

}  // namespace rtbench

#endif  // RTBENCH_METRICS_H_
