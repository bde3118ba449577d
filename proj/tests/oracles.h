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

#ifndef RTBENCH_TESTS_ORACLES_H_
#define RTBENCH_TESTS_ORACLES_H_

// Reference computations used to check the library. They avoid the code
// paths under test: exact rationals, from-scratch recomputation, brute force.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <boost/rational.hpp>

#include "rtbench/metrics.h"

namespace rtbench::oracle {

using Rational = boost::rational<int64_t>;

inline double ToDouble(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Boxes with integer corners.
inline int64_t Area(const BBox& b) {
  return static_cast<int64_t>(b.x2 - b.x1) * static_cast<int64_t>(b.y2 - b.y1);
}

inline Rational ExactIou(const BBox& a, const BBox& b) {
  int64_t iw = static_cast<int64_t>(std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  int64_t ih = static_cast<int64_t>(std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  if (iw <= 0 || ih <= 0) return Rational(0);
  int64_t inter = iw * ih;
  return Rational(inter, Area(a) + Area(b) - inter);
}

// True positives among the `k` highest-scoring predictions, matching from
// scratch: each prediction in score order takes the unmatched ground truth
// of its frame with the largest IoU (first on ties).
inline int64_t TruePositivesAtDepth(const std::vector<DetectionFrame>& frames,
                                    const std::vector<std::pair<size_t, BBox>>& ranked,
                                    size_t k, const Rational& threshold) {
  std::map<size_t, std::set<size_t>> used;
  int64_t tp = 0;
  for (size_t i = 0; i < k; ++i) {
    const auto& [f, p] = ranked[i];
    const auto& gts = frames[f].ground_truths;
    Rational best(-1);
    size_t best_g = gts.size();
    for (size_t g = 0; g < gts.size(); ++g) {
      if (used[f].count(g)) continue;
      Rational o = ExactIou(p, gts[g]);
      if (o > best) {
        best = o;
        best_g = g;
      }
    }
    if (best_g < gts.size() && best >= threshold) {
      used[f].insert(best_g);
      ++tp;
    }
  }
  return tp;
}

// Single-class AP by enumerating every score threshold. Scores must be
// distinct so that each threshold admits exactly one more prediction.
inline Rational BruteForceAp(const std::vector<DetectionFrame>& frames,
                             const Rational& threshold = Rational(1, 2)) {
  std::vector<std::pair<size_t, BBox>> ranked;
  int64_t num_gt = 0;
  for (size_t f = 0; f < frames.size(); ++f) {
    for (const auto& p : frames[f].predictions) ranked.emplace_back(f, p);
    num_gt += static_cast<int64_t>(frames[f].ground_truths.size());
  }
  if (num_gt == 0) return Rational(ranked.empty() ? 1 : 0);
  if (ranked.empty()) return Rational(0);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.second.score > b.second.score; });

  const size_t n = ranked.size();
  std::vector<Rational> precision(n), recall(n);
  for (size_t k = 1; k <= n; ++k) {
    int64_t tp = TruePositivesAtDepth(frames, ranked, k, threshold);
    precision[k - 1] = Rational(tp, static_cast<int64_t>(k));
    recall[k - 1] = Rational(tp, num_gt);
  }
  Rational ap(0), prev(0);
  for (size_t k = 0; k < n; ++k) {
    Rational envelope = *std::max_element(precision.begin() + k, precision.end());
    ap += (recall[k] - prev) * envelope;
    prev = recall[k];
  }
  return ap;
}

inline Rational BruteForceMeanAp(const std::vector<DetectionFrame>& frames,
                                 const Rational& threshold = Rational(1, 2)) {
  std::set<uint32_t> classes;
  for (const auto& f : frames) {
    for (const auto& g : f.ground_truths) classes.insert(g.class_id);
  }
  Rational total(0);
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
    total += BruteForceAp(per_class, threshold);
  }
  return total / static_cast<int64_t>(classes.size());
}

// Random detection instance with at most `max_boxes` boxes in total, at
// least one of them ground truth, integer corners on a small grid so that
// overlaps are common, and distinct prediction scores.
template <typename Rng>
std::vector<DetectionFrame> RandomDetections(Rng& rng, size_t max_boxes = 6) {
  std::uniform_int_distribution<int> n_boxes(1, static_cast<int>(max_boxes));
  std::uniform_int_distribution<int> n_frames(1, 2);
  std::uniform_int_distribution<int> n_classes(1, 2);
  std::uniform_int_distribution<int> coord(0, 6);
  std::uniform_int_distribution<int> extent(1, 4);
  std::bernoulli_distribution is_gt(0.5);

  const int boxes = n_boxes(rng);
  const int classes = n_classes(rng);
  std::vector<DetectionFrame> frames(n_frames(rng));
  std::uniform_int_distribution<size_t> pick_frame(0, frames.size() - 1);
  std::uniform_int_distribution<uint32_t> pick_class(0, classes - 1);

  std::vector<int> scores(boxes);
  for (int i = 0; i < boxes; ++i) scores[i] = i + 1;
  std::shuffle(scores.begin(), scores.end(), rng);

  bool have_gt = false;
  for (int i = 0; i < boxes; ++i) {
    BBox b;
    b.x1 = coord(rng);
    b.y1 = coord(rng);
    b.x2 = b.x1 + extent(rng);
    b.y2 = b.y1 + extent(rng);
    b.class_id = pick_class(rng);
    bool gt = (i == boxes - 1 && !have_gt) || is_gt(rng);
    auto& frame = frames[pick_frame(rng)];
    if (gt) {
      have_gt = true;
      frame.ground_truths.push_back(b);
    } else {
      b.score = scores[i] / static_cast<double>(boxes + 1);
      frame.predictions.push_back(b);
    }
  }
  return frames;
}

// Per-class IoU from pixel sets rather than a confusion matrix.
inline Rational PixelSetMeanIou(const std::vector<uint32_t>& predicted,
                                const std::vector<uint32_t>& truth) {
  std::set<uint32_t> present(truth.begin(), truth.end());
  Rational sum(0);
  for (uint32_t c : present) {
    int64_t both = 0, either = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
      bool p = predicted[i] == c, t = truth[i] == c;
      both += p && t;
      either += p || t;
    }
    sum += Rational(both, either);
  }
  return sum / static_cast<int64_t>(present.size());
}

// Order statistic by full sort: the ceil(p * n)-th smallest, with p * n
// compared in exact decimal arithmetic on p given as parts-per-`scale`.
inline int64_t SortedPercentile(std::vector<int64_t> v, int64_t p_parts,
                                int64_t scale) {
  std::sort(v.begin(), v.end());
  const int64_t n = static_cast<int64_t>(v.size());
  int64_t k = (p_parts * n + scale - 1) / scale;
  k = std::clamp<int64_t>(k, 1, n);
  return v[static_cast<size_t>(k - 1)];
}

}  // namespace rtbench::oracle

#endif  // RTBENCH_TESTS_ORACLES_H_
