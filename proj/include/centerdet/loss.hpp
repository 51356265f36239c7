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
// Training objective of the center-point detector, evaluated on CPU arrays.
// Only the objective and its heatmap gradient are provided; there is no
// optimiser.
//
//   focal  = -1/N * sum_cells { (1-p)^a log(p)                 if t == 1
//                             { (1-t)^b p^a log(1-p)           otherwise
//   total  = focal + l_size * L1(size) + l_off * L1(offset)
//
// L1 terms only look at cells that hold an object center.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "centerdet/error.hpp"
#include "centerdet/heatmap_codec.hpp"

namespace centerdet {

inline constexpr double kProbClamp = 1e-4;

struct LossWeights {
  double lambda_size = 0.1;
  double lambda_off = 1.0;
  double alpha = 2.0;
  double beta = 4.0;
};

// Hyper-parameters of the published training run. Kept as a record only.
struct TrainConfig {
  double initial_lr = 2.5e-4;
  std::array<int, 2> lr_drop_epochs = {90, 120};
  double lr_drop_factor = 10.0;
  std::string optimizer_name = "ADAM";
  int train_resolution = 1024;
  std::array<double, 3> normalization_mean = {0.485, 0.456, 0.406};
  std::array<double, 3> normalization_std = {0.229, 0.224, 0.225};
};

struct Cell {
  int px = 0;
  int py = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

namespace detail {

inline double clamp_prob(double p) noexcept { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

inline void check_focal_args(std::span<const double> pred, std::span<const double> target,
                             double num_objects) {
  if (pred.size() != target.size()) {
    throw Error(ErrorKind::ShapeMismatch, "prediction and target sizes differ");
  }
  if (!(num_objects >= 1.0)) {
    throw Error(ErrorKind::NonPositiveObjectCount, "num_objects must be >= 1");
  }
}

}  // namespace detail

inline double focal_loss(std::span<const double> pred, std::span<const double> target,
                         double num_objects, const LossWeights& w = {}) {
  detail::check_focal_args(pred, target, num_objects);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = detail::clamp_prob(pred[i]);
    const double t = target[i];
    if (t == 1.0) {
      sum += std::pow(1.0 - p, w.alpha) * std::log(p);
    } else {
      sum += std::pow(1.0 - t, w.beta) * std::pow(p, w.alpha) * std::log1p(-p);
    }
  }
  return static_cast<double>(-sum / num_objects);
}

/// d focal_loss / d pred, cell by cell. Zero where the clamp is active.
inline std::vector<double> focal_loss_grad(std::span<const double> pred,
                                           std::span<const double> target, double num_objects,
                                           const LossWeights& w = {}) {
  detail::check_focal_args(pred, target, num_objects);
  std::vector<double> grad(pred.size(), 0.0);
  const double a = w.alpha;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;
    const double t = target[i];
    double g = 0.0;
    if (t == 1.0) {
      // d/dp (1-p)^a log p
      g = -a * std::pow(1.0 - p, a - 1.0) * std::log(p) + std::pow(1.0 - p, a) / p;
    } else {
      // d/dp (1-t)^b p^a log(1-p)
      g = std::pow(1.0 - t, w.beta) *
          (a * std::pow(p, a - 1.0) * std::log1p(-p) - std::pow(p, a) / (1.0 - p));
    }
    grad[i] = -g / num_objects;
  }
  return grad;
}

/// Sum of |pred - target| over both channels of the listed cells, over N.
inline double masked_l1_loss(std::span<const double> pred, std::span<const double> target,
                             int height, int width, std::span<const Cell> object_cells,
                             double num_objects) {
  const auto plane = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (height < 1 || width < 1 || pred.size() != 2 * plane || target.size() != 2 * plane) {
    throw Error(ErrorKind::ShapeMismatch, "regression maps must be 2 x H x W");
  }
  if (object_cells.empty()) return 0.0;
  if (!(num_objects > 0.0)) {
    throw Error(ErrorKind::NonPositiveObjectCount, "object cells given with num_objects <= 0");
  }
  double sum = 0.0;
  for (const Cell& c : object_cells) {
    if (c.px < 0 || c.py < 0 || c.px >= width || c.py >= height) {
      throw Error(ErrorKind::CellOutOfBounds,
                  "cell (" + std::to_string(c.px) + "," + std::to_string(c.py) + ")");
    }
    const std::size_t idx = static_cast<std::size_t>(c.py) * static_cast<std::size_t>(width) +
                            static_cast<std::size_t>(c.px);
    sum += std::abs(pred[idx] - target[idx]) + std::abs(pred[plane + idx] - target[plane + idx]);
  }
  return sum / num_objects;
}

/// Cells of `targets` holding a unit heat value, in row-major order, and the
/// number of (class, cell) centers.
inline std::pair<std::vector<Cell>, int> object_centers(const DetectionMaps& targets) {
  std::vector<Cell> cells;
  int count = 0;
  for (int y = 0; y < targets.height; ++y) {
    for (int x = 0; x < targets.width; ++x) {
      int here = 0;
      for (int c = 0; c < targets.num_classes; ++c) here += targets.heat(c, y, x) == 1.0 ? 1 : 0;
      if (here > 0) cells.push_back({x, y});
      count += here;
    }
  }
  return {std::move(cells), count};
}

struct LossBreakdown {
  double focal = 0.0;
  double size = 0.0;
  double offset = 0.0;
  double total = 0.0;
};

/// Full objective. An empty scene is normalised by one object, so only the
/// background term remains.
inline LossBreakdown total_loss_breakdown(const DetectionMaps& preds, const DetectionMaps& targets,
                                          const LossWeights& w = {}) {
  if (!preds.same_shape(targets) || !preds.consistent() || !targets.consistent()) {
    throw Error(ErrorKind::ShapeMismatch, "prediction and target maps differ in shape");
  }
  const auto [cells, count] = object_centers(targets);
  const double n = std::max(count, 1);
  LossBreakdown out;
  out.focal = focal_loss(preds.heatmap, targets.heatmap, n, w);
  out.size = masked_l1_loss(preds.size_map, targets.size_map, targets.height, targets.width, cells,
                            n);
  out.offset = masked_l1_loss(preds.offset_map, targets.offset_map, targets.height, targets.width,
                              cells, n);
  out.total = out.focal + w.lambda_size * out.size + w.lambda_off * out.offset;
  return out;
}

inline double total_loss(const DetectionMaps& preds, const DetectionMaps& targets,
                         const LossWeights& w = {}) {
  return total_loss_breakdown(preds, targets, w).total;
}

}  // namespace centerdet
