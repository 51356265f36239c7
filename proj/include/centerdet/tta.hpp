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
// Test-time augmentation.
//
// Horizontal flip is fused before decoding: the flipped image's maps are
// mirrored back and averaged with the plain maps. Scales are fused after
// decoding: every scale's boxes are mapped to the base frame, pooled and
// reduced with per-class greedy NMS.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/geometry.hpp"
#include "centerdet/heatmap_codec.hpp"

namespace centerdet {

struct TtaConfig {
  int base_resolution = 2048;
  std::vector<double> scales = {0.5, 0.75, 1.0, 1.25, 1.5};
  bool use_flip = true;
  double nms_iou = 0.5;
  int max_dets = 500;

  void validate() const {
    if (base_resolution < 1) throw Error(ErrorKind::InvalidConfig, "base_resolution must be >= 1");
    if (scales.empty()) throw Error(ErrorKind::InvalidConfig, "at least one scale is required");
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) {
        throw Error(ErrorKind::UnknownScale, "scales must be positive");
      }
      if (i > 0 && !(scales[i] > scales[i - 1])) {
        throw Error(ErrorKind::InvalidConfig, "scales must be strictly increasing");
      }
    }
    if (!(nms_iou >= 0.0 && nms_iou <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "nms_iou must lie in [0, 1]");
    }
    if (max_dets < 1) throw Error(ErrorKind::InvalidConfig, "max_dets must be >= 1");
  }
};

/// Arithmetic scale grid lo, lo+step, ..., hi (inclusive, step 0.25 by default).
inline std::vector<double> scale_grid(double lo, double hi, double step = 0.25) {
  if (!(lo > 0.0) || !(step > 0.0) || hi < lo) {
    throw Error(ErrorKind::InvalidConfig, "scale grid needs 0 < lo <= hi and step > 0");
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

/// Mirror every plane left-right. The x offset of a mirrored cell becomes
/// 1 - dx, except that a zero offset stays zero.
template <typename Real>
BasicDetectionMaps<Real> hflip_maps(const BasicDetectionMaps<Real>& maps) {
  BasicDetectionMaps<Real> out = maps;
  const int W = maps.width;
  auto mirror = [&](std::vector<Real>& dst, const std::vector<Real>& src, int channels) {
    for (int c = 0; c < channels; ++c) {
      for (int y = 0; y < maps.height; ++y) {
        for (int x = 0; x < W; ++x) dst[maps.index(c, y, W - 1 - x)] = src[maps.index(c, y, x)];
      }
    }
  };
  mirror(out.heatmap, maps.heatmap, maps.num_classes);
  mirror(out.size_map, maps.size_map, 2);
  mirror(out.offset_map, maps.offset_map, 2);
  for (int y = 0; y < maps.height; ++y) {
    for (int x = 0; x < W; ++x) {
      Real& dx = out.offset(0, y, x);
      dx = dx > Real(0) ? Real(1) - dx : Real(0);
    }
  }
  return out;
}

/// Average plain maps with the un-flipped maps of the flipped image.
template <typename Real>
BasicDetectionMaps<Real> flip_fuse(const BasicDetectionMaps<Real>& maps,
                                   const BasicDetectionMaps<Real>& flipped_inference) {
  if (!maps.same_shape(flipped_inference) || !maps.consistent() ||
      !flipped_inference.consistent()) {
    throw Error(ErrorKind::ShapeMismatch, "plain and flipped maps differ in shape");
  }
  BasicDetectionMaps<Real> out = hflip_maps(flipped_inference);
  auto avg = [](std::vector<Real>& acc, const std::vector<Real>& other) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = (other[i] + acc[i]) / Real(2);
  };
  avg(out.heatmap, maps.heatmap);
  avg(out.size_map, maps.size_map);
  avg(out.offset_map, maps.offset_map);
  return out;
}

/// Per-class greedy NMS. A box survives iff its IoU with every kept box of
/// its class is <= iou_thresh. Output is score-descending; equal scores keep
/// input order.
inline std::vector<Detection> nms(std::span<const Detection> dets, double iou_thresh) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::map<int, std::vector<BBox>> kept_by_class;
  std::vector<Detection> out;
  for (std::size_t i : order) {
    const Detection& d = dets[i];
    auto& kept = kept_by_class[d.class_id];
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const BBox& k) {
      return iou(k, d.bbox) > iou_thresh;
    });
    if (suppressed) continue;
    kept.push_back(d.bbox);
    out.push_back(d);
  }
  return out;
}

struct ScaledDetections {
  double scale = 1.0;
  std::vector<Detection> detections;  // in the scaled image's pixels
};

/// Map every scale's boxes to the base frame, pool, NMS, keep the best
/// max_dets. Lists are merged in ascending scale order regardless of the
/// order they arrive in.
inline std::vector<Detection> fuse_multiscale(std::span<const ScaledDetections> per_scale,
                                              const TtaConfig& cfg) {
  std::vector<const ScaledDetections*> sorted;
  for (const ScaledDetections& s : per_scale) {
    if (!(s.scale > 0.0) || !std::isfinite(s.scale)) {
      throw Error(ErrorKind::UnknownScale, "scale " + std::to_string(s.scale));
    }
    sorted.push_back(&s);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->scale < b->scale; });
  std::vector<Detection> pooled;
  for (const ScaledDetections* s : sorted) {
    for (const Detection& d : s->detections) {
      pooled.push_back(Detection{d.class_id, rescale_box(d.bbox, s->scale, s->scale), d.score});
    }
  }
  std::vector<Detection> out = nms(pooled, cfg.nms_iou);
  if (out.size() > static_cast<std::size_t>(cfg.max_dets)) {
    out.resize(static_cast<std::size_t>(cfg.max_dets));
  }
  return out;
}

/// Source of raw maps for one image at a given (scale, flipped) setting.
/// Throws ProviderFailure when it has nothing for the request.
template <typename Real>
using MapProvider = std::function<BasicDetectionMaps<Real>(double scale, bool flipped)>;

/// Full augmentation pipeline for one image. Output boxes are in the
/// base_resolution frame.
template <typename Real>
std::vector<Detection> run_tta(const MapProvider<Real>& provider, const TtaConfig& cfg,
                               int k = kDefaultTopK, double score_floor = 0.0) {
  cfg.validate();
  std::vector<ScaledDetections> per_scale;
  per_scale.reserve(cfg.scales.size());
  for (double scale : cfg.scales) {
    BasicDetectionMaps<Real> maps = provider(scale, false);
    if (cfg.use_flip) maps = flip_fuse(maps, provider(scale, true));
    per_scale.push_back(ScaledDetections{scale, decode(maps, k, score_floor)});
  }
  return fuse_multiscale(per_scale, cfg);
}

/// Map boxes from the square base frame back to an image_w x image_h image
/// that was stretched to base_resolution on each axis.
inline std::vector<Detection> base_to_image(std::span<const Detection> dets, int base_resolution,
                                            int image_w, int image_h) {
  const double sx = static_cast<double>(base_resolution) / image_w;
  const double sy = static_cast<double>(base_resolution) / image_h;
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) out.push_back({d.class_id, rescale_box(d.bbox, sx, sy), d.score});
  return out;
}

}  // namespace centerdet
