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
#pragma once

#include <algorithm>
#include <cmath>

#include "centerdet/error.hpp"

namespace centerdet {

/// Axis-aligned box in corner form, input-image pixels. Sub-pixel coordinates
/// are kept as-is; rounding only happens when writing result files.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }
  double center_x() const noexcept { return 0.5 * (x1 + x2); }
  double center_y() const noexcept { return 0.5 * (y1 + y2); }

  bool valid() const noexcept {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
           x1 <= x2 && y1 <= y2;
  }

  static BBox from_xywh(double left, double top, double w, double h) noexcept {
    return {left, top, left + w, top + h};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection over union; zero when the union is empty.
inline double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// Mirror a box about the vertical axis of an image `image_width` pixels wide.
inline BBox flip_box(const BBox& b, double image_width) noexcept {
  return {image_width - b.x2, b.y1, image_width - b.x1, b.y2};
}

/// Map a box found in an image resized by (sx, sy) back to the unscaled frame.
inline BBox rescale_box(const BBox& b, double sx, double sy) {
  if (!(sx > 0.0) || !(sy > 0.0) || !std::isfinite(sx) || !std::isfinite(sy)) {
    throw Error(ErrorKind::NonPositiveScale, "scale factors must be positive and finite");
  }
  return {b.x1 / sx, b.y1 / sy, b.x2 / sx, b.y2 / sy};
}

inline BBox clamp_box(const BBox& b, double width, double height) noexcept {
  return {std::clamp(b.x1, 0.0, width), std::clamp(b.y1, 0.0, height),
          std::clamp(b.x2, 0.0, width), std::clamp(b.y2, 0.0, height)};
}

/// One scored box. `class_id` uses the VisDrone category ids (1..10 evaluated).
struct Detection {
  int class_id = 0;
  BBox bbox;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

}  // namespace centerdet
