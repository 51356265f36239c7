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
// Synthetic "perfect model": renders ground truth into the maps a detector
// would produce for each (scale, flip) view, optionally with heatmap noise.
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/geometry.hpp"
#include "centerdet/heatmap_codec.hpp"
#include "centerdet/tta.hpp"
#include "centerdet/visdrone_io.hpp"

namespace centerdet {

struct ImageSize {
  int width = 0;
  int height = 0;
};

/// Pixel side of the square network input for one scale.
inline int scaled_resolution(int base_resolution, double scale, int stride) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::UnknownScale, "scale " + std::to_string(scale));
  }
  const double exact = base_resolution * scale;
  const auto side = static_cast<int>(std::lround(exact));
  if (std::abs(exact - side) > 1e-9 || side < stride || side % stride != 0) {
    throw Error(ErrorKind::StrideMismatch, "base " + std::to_string(base_resolution) + " x scale " +
                                               std::to_string(scale) +
                                               " is not a multiple of the stride");
  }
  return side;
}

/// Ground truth as seen by the network at one view: stretched to the square
/// scaled input and optionally mirrored. Objects whose centers fall outside
/// the input, and non-evaluated categories, are left out.
inline std::vector<GroundTruthObject> view_objects(const ImageAnnotations& ann, ImageSize image,
                                                   int side, bool flipped) {
  const double sx = static_cast<double>(side) / image.width;
  const double sy = static_cast<double>(side) / image.height;
  std::vector<GroundTruthObject> out;
  for (const GroundTruthObject& o : ann.objects) {
    if (!is_evaluated_category(o.category)) continue;
    GroundTruthObject v = o;
    v.bbox = {o.bbox.x1 * sx, o.bbox.y1 * sy, o.bbox.x2 * sx, o.bbox.y2 * sy};
    if (flipped) v.bbox = flip_box(v.bbox, side);
    const double cx = v.bbox.center_x();
    const double cy = v.bbox.center_y();
    if (!(cx >= 0.0 && cx < side && cy >= 0.0 && cy < side)) continue;
    out.push_back(v);
  }
  return out;
}

namespace detail {

inline std::uint64_t view_seed(std::uint64_t seed, double scale, bool flipped) {
  // splitmix64 finaliser over the request
  std::uint64_t z = seed ^ std::bit_cast<std::uint64_t>(scale) ^ (flipped ? 0x9e3779b97f4a7c15ULL : 0);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Provider that encodes the annotations for whatever view is requested.
/// `image` is the original image size; it defaults to the square base
/// resolution, i.e. annotations already in base-frame pixels.
template <typename Real = double>
MapProvider<Real> oracle_provider(ImageAnnotations annotations, const TtaConfig& cfg, double noise,
                                  std::uint64_t seed, int stride = kDefaultStride,
                                  std::optional<ImageSize> image = std::nullopt) {
  if (!(noise >= 0.0)) throw Error(ErrorKind::InvalidConfig, "noise must be >= 0");
  const ImageSize size = image.value_or(ImageSize{cfg.base_resolution, cfg.base_resolution});
  if (size.width < 1 || size.height < 1) {
    throw Error(ErrorKind::InvalidConfig, "image size must be positive");
  }
  const int base = cfg.base_resolution;
  return [annotations = std::move(annotations), size, base, noise, seed, stride](
             double scale, bool flipped) -> BasicDetectionMaps<Real> {
    const int side = scaled_resolution(base, scale, stride);
    const auto objects = view_objects(annotations, size, side, flipped);
    BasicDetectionMaps<Real> maps = encode_targets<Real>(objects, side, side, stride);
    if (noise > 0.0) {
      std::mt19937_64 gen(detail::view_seed(seed, scale, flipped));
      for (Real& v : maps.heatmap) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double jitter = (2.0 * u - 1.0) * noise;
        v = static_cast<Real>(std::clamp(static_cast<double>(v) + jitter, 0.0, 1.0));
      }
    }
    return maps;
  };
}

}  // namespace centerdet
