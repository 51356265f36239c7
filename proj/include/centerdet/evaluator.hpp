// Copyright 2026 The centerdet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// VisDrone / COCO style detection scoring.
//
// Per image, before matching:
//   * ground truth of non-evaluated categories (ignore regions, "others") is dropped,
//   * detections of non-evaluated classes are dropped,
//   * detections centred strictly inside an ignore region are dropped,
//   * the remaining detections are ranked by score and capped at max(max_dets).
//
// AP is the 101-point interpolated precision, averaged over IoU thresholds and
// then over classes that have ground truth. AR@m is matched / total ground
// truth when only each image's m best detections (across classes) count,
// averaged the same way.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/geometry.hpp"
#include "centerdet/visdrone_io.hpp"

namespace centerdet {

inline constexpr int kRecallSamples = 101;

inline std::vector<double> default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50.0 + 5.0 * i) / 100.0);
  return t;
}

struct EvalConfig {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  std::vector<int> max_dets = {1, 10, 100, 500};
  std::vector<int> evaluated_classes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  void validate() const {
    if (iou_thresholds.empty() || max_dets.empty() || evaluated_classes.empty()) {
      throw Error(ErrorKind::InvalidConfig, "thresholds, max_dets and classes must be non-empty");
    }
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
      const double t = iou_thresholds[i];
      if (!(t > 0.0 && t <= 1.0) || (i > 0 && !(t > iou_thresholds[i - 1]))) {
        throw Error(ErrorKind::InvalidConfig, "IoU thresholds must increase within (0, 1]");
      }
    }
    for (std::size_t i = 0; i < max_dets.size(); ++i) {
      if (max_dets[i] < 1 || (i > 0 && max_dets[i] <= max_dets[i - 1])) {
        throw Error(ErrorKind::InvalidConfig, "max_dets must be positive and increasing");
      }
    }
  }
};

struct EvalResult {
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  std::map<int, double> ar;            // max_det -> recall
  std::map<int, double> per_class_ap;  // class id -> AP
};

/// Drop detections whose box center lies strictly inside any region.
inline std::vector<Detection> filter_ignore_regions(std::span<const Detection> dets,
                                                    std::span<const BBox> regions) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    const double cx = d.bbox.center_x();
    const double cy = d.bbox.center_y();
    const bool inside = std::any_of(regions.begin(), regions.end(), [&](const BBox& r) {
      return cx > r.x1 && cx < r.x2 && cy > r.y1 && cy < r.y2;
    });
    if (!inside) out.push_back(d);
  }
  return out;
}

struct MatchResult {
  std::vector<std::size_t> order;  // detection indices, score descending
  std::vector<bool> tp;            // parallel to `order`
  int matched = 0;
};

namespace detail {

// Greedy matching over a det x gt IoU matrix whose rows are already in score
// order. Each row takes the unmatched column of highest IoU (first column on
// ties) if that IoU reaches the threshold.
inline std::vector<bool> greedy_match(const std::vector<std::vector<double>>& ious,
                                      std::size_t num_gt, double thresh, int* matched) {
  std::vector<bool> taken(num_gt, false);
  std::vector<bool> tp(ious.size(), false);
  int count = 0;
  for (std::size_t d = 0; d < ious.size(); ++d) {
    double best = -1.0;
    std::size_t best_g = num_gt;
    for (std::size_t g = 0; g < num_gt; ++g) {
      if (taken[g]) continue;
      if (ious[d][g] > best) {
        best = ious[d][g];
        best_g = g;
      }
    }
    if (best_g < num_gt && best >= thresh) {
      taken[best_g] = true;
      tp[d] = true;
      ++count;
    }
  }
  if (matched != nullptr) *matched = count;
  return tp;
}

inline std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

}  // namespace detail

/// Match one image's detections of `class_id` against its ground truth of
/// the same class. Other classes are ignored on both sides.
inline MatchResult match_detections(std::span<const Detection> dets,
                                    std::span<const GroundTruthObject> gts, double iou_thresh,
                                    int class_id) {
  MatchResult res;
  for (std::size_t i : detail::score_order(dets)) {
    if (dets[i].class_id == class_id) res.order.push_back(i);
  }
  std::vector<const GroundTruthObject*> g;
  for (const GroundTruthObject& o : gts) {
    if (o.category == class_id) g.push_back(&o);
  }
  std::vector<std::vector<double>> ious(res.order.size(), std::vector<double>(g.size()));
  for (std::size_t d = 0; d < res.order.size(); ++d) {
    for (std::size_t j = 0; j < g.size(); ++j) ious[d][j] = iou(dets[res.order[d]].bbox, g[j]->bbox);
  }
  res.tp = detail::greedy_match(ious, g.size(), iou_thresh, &res.matched);
  return res;
}

/// 101-point interpolated AP over flags in score order. nullopt when there
/// is no ground truth to recall.
inline std::optional<double> average_precision(const std::vector<bool>& tp_in_score_order,
                                               int num_gt) {
  if (num_gt <= 0) return std::nullopt;
  const std::size_t n = tp_in_score_order.size();
  std::vector<double> precision(n), recall(n);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    (tp_in_score_order[i] ? tp : fp) += 1.0;
    precision[i] = tp / (tp + fp);
    recall[i] = tp / num_gt;
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double sum = 0.0;
  for (int r = 0; r < kRecallSamples; ++r) {
    const double level = r / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallSamples;
}

/// Score a detection set against ground truth. Annotated images missing from
/// `detections` count as having no detections.
inline EvalResult evaluate(std::span<const ImageDetections> detections,
                           std::span<const ImageAnnotations> annotations,
                           const EvalConfig& cfg = {}) {
  cfg.validate();
  std::unordered_map<std::string, std::size_t> image_index;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (!image_index.emplace(annotations[i].image_id, i).second) {
      throw Error(ErrorKind::ImageIdMismatch, "duplicate annotated image " + annotations[i].image_id);
    }
  }
  std::vector<const ImageDetections*> dets_of(annotations.size(), nullptr);
  for (const ImageDetections& d : detections) {
    const auto it = image_index.find(d.image_id);
    if (it == image_index.end()) {
      throw Error(ErrorKind::ImageIdMismatch, "no annotations for image " + d.image_id);
    }
    if (dets_of[it->second] != nullptr) {
      throw Error(ErrorKind::ImageIdMismatch, "duplicate detections for image " + d.image_id);
    }
    dets_of[it->second] = &d;
  }

  auto evaluated = [&](int c) {
    return std::find(cfg.evaluated_classes.begin(), cfg.evaluated_classes.end(), c) !=
           cfg.evaluated_classes.end();
  };
  const int cap = cfg.max_dets.back();
  const std::size_t num_t = cfg.iou_thresholds.size();

  // Per class, per threshold: (score, image, rank-in-image, tp) of every detection.
  struct Scored {
    double score;
    std::size_t image;
    int rank;
    bool tp;
  };
  std::map<int, std::vector<std::vector<Scored>>> scored;
  std::map<int, int> total_gt;
  for (int c : cfg.evaluated_classes) {
    scored[c].resize(num_t);
    total_gt[c] = 0;
  }

  for (std::size_t img = 0; img < annotations.size(); ++img) {
    std::vector<GroundTruthObject> gts;
    std::vector<BBox> regions;
    for (const GroundTruthObject& o : annotations[img].objects) {
      if (o.is_ignore_region()) regions.push_back(o.bbox);
      if (evaluated(o.category)) gts.push_back(o);
    }
    for (const GroundTruthObject& o : gts) ++total_gt[o.category];

    std::vector<Detection> kept;
    if (dets_of[img] != nullptr) {
      for (const Detection& d : dets_of[img]->detections) {
        if (evaluated(d.class_id)) kept.push_back(d);
      }
    }
    kept = filter_ignore_regions(kept, regions);
    std::vector<Detection> ranked;
    for (std::size_t i : detail::score_order(kept)) ranked.push_back(kept[i]);
    if (ranked.size() > static_cast<std::size_t>(cap)) ranked.resize(static_cast<std::size_t>(cap));

    for (int c : cfg.evaluated_classes) {
      std::vector<int> rank_of;
      std::vector<const BBox*> boxes;
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        if (ranked[r].class_id == c) {
          rank_of.push_back(static_cast<int>(r));
          boxes.push_back(&ranked[r].bbox);
        }
      }
      if (boxes.empty()) continue;
      std::vector<const BBox*> gboxes;
      for (const GroundTruthObject& o : gts) {
        if (o.category == c) gboxes.push_back(&o.bbox);
      }
      std::vector<std::vector<double>> ious(boxes.size(), std::vector<double>(gboxes.size()));
      for (std::size_t d = 0; d < boxes.size(); ++d) {
        for (std::size_t g = 0; g < gboxes.size(); ++g) ious[d][g] = iou(*boxes[d], *gboxes[g]);
      }
      for (std::size_t t = 0; t < num_t; ++t) {
        const auto tp = detail::greedy_match(ious, gboxes.size(), cfg.iou_thresholds[t], nullptr);
        for (std::size_t d = 0; d < boxes.size(); ++d) {
          const int r = rank_of[d];
          scored[c][t].push_back(
              {ranked[static_cast<std::size_t>(r)].score, img, r, static_cast<bool>(tp[d])});
        }
      }
    }
  }

  int any_gt = 0;
  for (const auto& [c, n] : total_gt) any_gt += n;
  if (any_gt == 0) throw Error(ErrorKind::EmptyGroundTruth, "no ground truth of evaluated classes");

  auto threshold_index = [&](double value) -> std::optional<std::size_t> {
    for (std::size_t t = 0; t < num_t; ++t) {
      if (std::abs(cfg.iou_thresholds[t] - value) < 1e-12) return t;
    }
    return std::nullopt;
  };
  const auto t50 = threshold_index(0.5);
  const auto t75 = threshold_index(0.75);

  EvalResult res;
  double ap_sum = 0.0;
  double ap50_sum = 0.0;
  double ap75_sum = 0.0;
  std::vector<double> ar_sum(cfg.max_dets.size(), 0.0);
  int classes = 0;
  for (int c : cfg.evaluated_classes) {
    const int ngt = total_gt[c];
    if (ngt == 0) continue;
    ++classes;
    double class_ap = 0.0;
    for (std::size_t t = 0; t < num_t; ++t) {
      std::vector<Scored>& list = scored[c][t];
      std::stable_sort(list.begin(), list.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.image != b.image) return a.image < b.image;
        return a.rank < b.rank;
      });
      std::vector<bool> flags;
      flags.reserve(list.size());
      for (const Scored& s : list) flags.push_back(s.tp);
      const double ap = *average_precision(flags, ngt);
      class_ap += ap;
      if (t50 && *t50 == t) ap50_sum += ap;
      if (t75 && *t75 == t) ap75_sum += ap;
      for (std::size_t m = 0; m < cfg.max_dets.size(); ++m) {
        const int limit = cfg.max_dets[m];
        const auto matched = std::count_if(list.begin(), list.end(), [&](const Scored& s) {
          return s.tp && s.rank < limit;
        });
        ar_sum[m] += static_cast<double>(matched) / ngt;
      }
    }
    res.per_class_ap[c] = class_ap / static_cast<double>(num_t);
    ap_sum += res.per_class_ap[c];
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.ap = ap_sum / classes;
  res.ap50 = t50 ? ap50_sum / classes : nan;
  res.ap75 = t75 ? ap75_sum / classes : nan;
  for (std::size_t m = 0; m < cfg.max_dets.size(); ++m) {
    res.ar[cfg.max_dets[m]] = ar_sum[m] / (static_cast<double>(classes) * static_cast<double>(num_t));
  }
  return res;
}

}  // namespace centerdet
