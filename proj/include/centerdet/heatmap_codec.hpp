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
// Center-point detection head codec.
//
// An object is represented by the map cell holding its box center. Three
// dense heads describe a scene on a grid `stride` times coarser than the
// input image:
//
//   heatmap  : [C x H x W]  Gaussian bump per object, exactly 1 at its cell
//   size     : [2 x H x W]  box (width, height) in input pixels at the cell
//   offset   : [2 x H x W]  sub-cell center position, center / stride - cell
//
// Decoding takes local maxima of the heatmap (3x3 neighbourhood), reads size
// and offset at each maximum and rebuilds the box. No NMS is involved.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/geometry.hpp"
#include "centerdet/visdrone_io.hpp"

namespace centerdet {

inline constexpr int kDefaultStride = 4;
inline constexpr double kDefaultMinOverlap = 0.7;
inline constexpr int kDefaultTopK = 500;

template <typename Real>
struct BasicDetectionMaps {
  int num_classes = 0;
  int height = 0;
  int width = 0;
  int stride = 1;
  std::vector<Real> heatmap;     // num_classes * height * width
  std::vector<Real> size_map;    // 2 * height * width
  std::vector<Real> offset_map;  // 2 * height * width

  static BasicDetectionMaps zeros(int num_classes, int height, int width, int stride) {
    if (num_classes < 1 || height < 1 || width < 1 || stride < 1) {
      throw Error(ErrorKind::DimensionMismatch, "map dimensions and stride must be positive");
    }
    BasicDetectionMaps m;
    m.num_classes = num_classes;
    m.height = height;
    m.width = width;
    m.stride = stride;
    const auto plane = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    m.heatmap.assign(plane * static_cast<std::size_t>(num_classes), Real(0));
    m.size_map.assign(plane * 2, Real(0));
    m.offset_map.assign(plane * 2, Real(0));
    return m;
  }

  int input_width() const noexcept { return width * stride; }
  int input_height() const noexcept { return height * stride; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }

  std::size_t index(int channel, int y, int x) const noexcept {
    return static_cast<std::size_t>(channel) * plane_size() +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }

  // `cls` is the 0-based heatmap plane; class id = cls + 1.
  Real& heat(int cls, int y, int x) noexcept { return heatmap[index(cls, y, x)]; }
  Real heat(int cls, int y, int x) const noexcept { return heatmap[index(cls, y, x)]; }
  Real& size(int ch, int y, int x) noexcept { return size_map[index(ch, y, x)]; }
  Real size(int ch, int y, int x) const noexcept { return size_map[index(ch, y, x)]; }
  Real& offset(int ch, int y, int x) noexcept { return offset_map[index(ch, y, x)]; }
  Real offset(int ch, int y, int x) const noexcept { return offset_map[index(ch, y, x)]; }

  std::span<Real> heat_plane(int cls) noexcept {
    return std::span<Real>(heatmap).subspan(static_cast<std::size_t>(cls) * plane_size(),
                                            plane_size());
  }

  bool same_shape(const BasicDetectionMaps& o) const noexcept {
    return num_classes == o.num_classes && height == o.height && width == o.width &&
           stride == o.stride;
  }

  /// Array sizes agree with the declared dimensions.
  bool consistent() const noexcept {
    return num_classes >= 1 && height >= 1 && width >= 1 && stride >= 1 &&
           heatmap.size() == plane_size() * static_cast<std::size_t>(num_classes) &&
           size_map.size() == plane_size() * 2 && offset_map.size() == plane_size() * 2;
  }

  friend bool operator==(const BasicDetectionMaps&, const BasicDetectionMaps&) = default;
};

using DetectionMaps = BasicDetectionMaps<double>;
using DetectionMapsF32 = BasicDetectionMaps<float>;

template <typename To, typename From>
BasicDetectionMaps<To> maps_cast(const BasicDetectionMaps<From>& m) {
  BasicDetectionMaps<To> out;
  out.num_classes = m.num_classes;
  out.height = m.height;
  out.width = m.width;
  out.stride = m.stride;
  out.heatmap.assign(m.heatmap.begin(), m.heatmap.end());
  out.size_map.assign(m.size_map.begin(), m.size_map.end());
  out.offset_map.assign(m.offset_map.begin(), m.offset_map.end());
  return out;
}

struct Peak {
  int class_id = 0;  // 1-based
  int px = 0;
  int py = 0;
  double score = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

/// Largest corner perturbation (in map cells) that keeps IoU >= min_overlap
/// with a w x h box. Three configurations are solved as quadratics in r:
///   shifted : both corners move by r in the same direction
///   shrunk  : both corners move inward by r
///   grown   : both corners move outward by r
/// and the smallest admissible root wins.
inline double gaussian_radius(double w, double h, double min_overlap = kDefaultMinOverlap) {
  if (!(min_overlap > 0.0) || min_overlap > 1.0) {
    throw Error(ErrorKind::InvalidOverlap, "min_overlap must lie in (0, 1]");
  }
  if (!(w > 0.0) || !(h > 0.0)) return 0.0;
  const double o = min_overlap;
  const double sum = w + h;
  const double prod = w * h;

  // (w-r)(h-r) / (2wh - (w-r)(h-r)) = o
  const double c1 = prod * (1.0 - o) / (1.0 + o);
  const double r1 = (sum - std::sqrt(std::max(0.0, sum * sum - 4.0 * c1))) / 2.0;

  // (w-2r)(h-2r) / wh = o
  const double b2 = 2.0 * sum;
  const double c2 = (1.0 - o) * prod;
  const double r2 = (b2 - std::sqrt(std::max(0.0, b2 * b2 - 16.0 * c2))) / 8.0;

  // wh / ((w+2r)(h+2r)) = o
  const double a3 = 4.0 * o;
  const double b3 = 2.0 * o * sum;
  const double c3 = (o - 1.0) * prod;
  const double r3 = (-b3 + std::sqrt(std::max(0.0, b3 * b3 - 4.0 * a3 * c3))) / (2.0 * a3);

  return std::max(0.0, std::min({r1, r2, r3}));
}

/// Max-splat an unnormalised Gaussian centred on (px, py) into one H x W plane.
/// Cells within Chebyshev distance ceil(radius) are touched; sigma is
/// max(radius, 1) / 3.
template <typename Real>
void splat_gaussian(std::span<Real> plane, int height, int width, int px, int py, double radius) {
  if (px < 0 || py < 0 || px >= width || py >= height) {
    throw Error(ErrorKind::CenterOutOfBounds, "splat center outside the map");
  }
  if (plane.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw Error(ErrorKind::ShapeMismatch, "plane size does not match height x width");
  }
  const int reach = static_cast<int>(std::ceil(std::max(0.0, radius)));
  const double sigma = std::max(radius, 1.0) / 3.0;
  const double denom = 2.0 * sigma * sigma;
  const int y0 = std::max(0, py - reach);
  const int y1 = std::min(height - 1, py + reach);
  const int x0 = std::max(0, px - reach);
  const int x1 = std::min(width - 1, px + reach);
  for (int y = y0; y <= y1; ++y) {
    const double dy = y - py;
    Real* row = plane.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - px;
      const auto v = static_cast<Real>(std::exp(-(dx * dx + dy * dy) / denom));
      row[x] = std::max(row[x], v);
    }
  }
}

/// Render ground truth into target maps. Objects must use evaluated
/// categories and have their centers inside the input image. When two
/// same-class objects land in one cell the later one owns size/offset.
template <typename Real = double>
BasicDetectionMaps<Real> encode_targets(std::span<const GroundTruthObject> objects, int input_w,
                                        int input_h, int stride = kDefaultStride,
                                        int num_classes = kNumEvalClasses) {
  if (stride < 1 || input_w < 1 || input_h < 1 || input_w % stride != 0 ||
      input_h % stride != 0) {
    throw Error(ErrorKind::StrideMismatch, "input dimensions must be positive multiples of stride");
  }
  auto maps = BasicDetectionMaps<Real>::zeros(num_classes, input_h / stride, input_w / stride,
                                               stride);
  for (const GroundTruthObject& obj : objects) {
    if (obj.category < 1 || obj.category > num_classes) {
      throw Error(ErrorKind::InvalidCategory,
                  "cannot encode category " + std::to_string(obj.category));
    }
    const double cx = obj.bbox.center_x();
    const double cy = obj.bbox.center_y();
    if (!(cx >= 0.0 && cx < input_w && cy >= 0.0 && cy < input_h)) {
      throw Error(ErrorKind::ObjectOutOfBounds, "object center outside the input image");
    }
    const double gx = cx / stride;
    const double gy = cy / stride;
    const int px = static_cast<int>(std::floor(gx));
    const int py = static_cast<int>(std::floor(gy));
    const double w = obj.bbox.width();
    const double h = obj.bbox.height();

    maps.offset(0, py, px) = static_cast<Real>(gx - px);
    maps.offset(1, py, px) = static_cast<Real>(gy - py);
    maps.size(0, py, px) = static_cast<Real>(w);
    maps.size(1, py, px) = static_cast<Real>(h);

    const double radius =
        gaussian_radius(std::ceil(w / stride), std::ceil(h / stride), kDefaultMinOverlap);
    splat_gaussian(maps.heat_plane(obj.category - 1), maps.height, maps.width, px, py, radius);
  }
  return maps;
}

namespace detail {

// Strict "better than" for peaks: higher score, then (class, row, column) ascending.
inline bool peak_before(const Peak& a, const Peak& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.class_id != b.class_id) return a.class_id < b.class_id;
  if (a.py != b.py) return a.py < b.py;
  return a.px < b.px;
}

}  // namespace detail

/// Local maxima of the heatmap (>= all 8 neighbours, >= score_floor), best k
/// across classes, sorted by score descending.
template <typename Real>
std::vector<Peak> extract_peaks(const BasicDetectionMaps<Real>& maps, int k, double score_floor) {
  std::vector<Peak> out;
  if (k < 1) return out;
  const int H = maps.height;
  const int W = maps.width;
  // Max-heap on "worst first" keeps the current k best.
  auto worse_on_top = [](const Peak& a, const Peak& b) { return detail::peak_before(a, b); };
  std::priority_queue<Peak, std::vector<Peak>, decltype(worse_on_top)> best(worse_on_top);

  for (int c = 0; c < maps.num_classes; ++c) {
    const Real* plane = maps.heatmap.data() + static_cast<std::size_t>(c) * maps.plane_size();
    for (int y = 0; y < H; ++y) {
      const Real* row = plane + static_cast<std::size_t>(y) * static_cast<std::size_t>(W);
      for (int x = 0; x < W; ++x) {
        const Real v = row[x];
        if (!(static_cast<double>(v) >= score_floor)) continue;
        bool is_peak = true;
        for (int dy = -1; dy <= 1 && is_peak; ++dy) {
          const int ny = y + dy;
          if (ny < 0 || ny >= H) continue;
          const Real* nrow = plane + static_cast<std::size_t>(ny) * static_cast<std::size_t>(W);
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            if ((dx == 0 && dy == 0) || nx < 0 || nx >= W) continue;
            if (nrow[nx] > v) {
              is_peak = false;
              break;
            }
          }
        }
        if (!is_peak) continue;
        const Peak p{c + 1, x, y, static_cast<double>(v)};
        if (static_cast<int>(best.size()) < k) {
          best.push(p);
        } else if (detail::peak_before(p, best.top())) {
          best.pop();
          best.push(p);
        }
      }
    }
  }
  out.reserve(best.size());
  while (!best.empty()) {
    out.push_back(best.top());
    best.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

/// Turn peaks into boxes in input-pixel coordinates, clamped to the image.
template <typename Real>
std::vector<Detection> decode(const BasicDetectionMaps<Real>& maps, int k = kDefaultTopK,
                              double score_floor = 0.0) {
  const std::vector<Peak> peaks = extract_peaks(maps, k, score_floor);
  std::vector<Detection> dets;
  dets.reserve(peaks.size());
  const double R = maps.stride;
  for (const Peak& p : peaks) {
    const double cx = (p.px + static_cast<double>(maps.offset(0, p.py, p.px))) * R;
    const double cy = (p.py + static_cast<double>(maps.offset(1, p.py, p.px))) * R;
    // Raw network heads can regress negative extents.
    const double hw = std::max(0.0, static_cast<double>(maps.size(0, p.py, p.px))) / 2.0;
    const double hh = std::max(0.0, static_cast<double>(maps.size(1, p.py, p.px))) / 2.0;
    const BBox box = clamp_box({cx - hw, cy - hh, cx + hw, cy + hh}, maps.input_width(),
                               maps.input_height());
    dets.push_back(Detection{p.class_id, box, p.score});
  }
  return dets;
}

}  // namespace centerdet
