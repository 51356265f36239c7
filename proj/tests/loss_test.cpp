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
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "centerdet/loss.hpp"
#include "test_support.hpp"

namespace centerdet {
namespace {

// Scalar form of the penalty-reduced focal term, written out directly.
double focal_term(double p, double t, double alpha = 2.0, double beta = 4.0) {
  p = std::min(std::max(p, 1e-4), 1.0 - 1e-4);
  if (t == 1.0) return -std::pow(1.0 - p, alpha) * std::log(p);
  return -std::pow(1.0 - t, beta) * std::pow(p, alpha) * std::log(1.0 - p);
}

TEST(FocalLoss, HalfConfidentPositive) {
  const std::vector<double> pred = {0.5};
  const std::vector<double> target = {1.0};
  EXPECT_NEAR(focal_loss(pred, target, 1), 0.25 * std::log(2.0), 1e-15);
  EXPECT_NEAR(focal_loss(pred, target, 1), 0.1733, 5e-5);
}

TEST(FocalLoss, ConfidentBackgroundIsNearZero) {
  const std::vector<double> pred = {1e-4};
  const std::vector<double> target = {0.0};
  EXPECT_LT(focal_loss(pred, target, 1), 1e-8);
}

TEST(FocalLoss, SaturatedPerfectPredictionIsNearZero) {
  std::vector<double> target(400, 0.0);
  target[17] = 1.0;
  target[230] = 1.0;
  std::vector<double> pred(400, 1e-4);
  pred[17] = 1.0 - 1e-4;
  pred[230] = 1.0 - 1e-4;
  EXPECT_LE(focal_loss(pred, target, 1), 1e-3);
}

TEST(FocalLoss, MatchesScalarSum) {
  testing::Rng rng(1);
  std::vector<double> pred(64);
  std::vector<double> target(64);
  double expected = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i] = testing::uniform(rng, 0.0, 1.0);
    target[i] = i % 7 == 0 ? 1.0 : testing::uniform(rng, 0.0, 1.0);
    expected += focal_term(pred[i], target[i]);
  }
  EXPECT_NEAR(focal_loss(pred, target, 3), expected / 3, 1e-12);
}

TEST(FocalLoss, Errors) {
  const std::vector<double> a = {0.5, 0.5};
  const std::vector<double> b = {1.0};
  try {
    focal_loss(a, b, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
  try {
    focal_loss(a, a, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositiveObjectCount);
  }
}

TEST(FocalLoss, NonNegative) {
  testing::Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> pred(16);
    std::vector<double> target(16);
    for (std::size_t i = 0; i < 16; ++i) {
      pred[i] = testing::uniform(rng, -0.2, 1.2);  // clamped internally
      target[i] = testing::uniform_int(rng, 0, 3) == 0 ? 1.0 : testing::uniform(rng, 0.0, 1.0);
    }
    EXPECT_GE(focal_loss(pred, target, testing::uniform_int(rng, 1, 5)), 0.0);
  }
}

TEST(FocalLossGrad, CentralDifferences) {
  testing::Rng rng(77);
  const std::size_t n = 200;
  std::vector<double> pred(n);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred[i] = testing::uniform(rng, 1e-3, 1.0 - 1e-3);
    target[i] = i % 5 == 0 ? 1.0 : testing::uniform(rng, 0.0, 0.999);
  }
  const double N = 4;
  const auto grad = focal_loss_grad(pred, target, N);
  const double h = 1e-5;
  // Only cell i changes, so difference its own term; differencing the whole
  // map would bury gradients near 1e-11 (targets close to 1) in rounding.
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> up = {pred[i] + h};
    const std::vector<double> down = {pred[i] - h};
    const std::vector<double> t = {target[i]};
    const double fd = (focal_loss(up, t, N) - focal_loss(down, t, N)) / (2 * h);
    EXPECT_LT(std::abs(grad[i] - fd), 1e-4 * std::abs(fd)) << "cell " << i << " p=" << pred[i];
  }
}

TEST(FocalLossGrad, SignAndLimits) {
  const std::vector<double> one = {1.0};
  EXPECT_LT(focal_loss_grad(std::vector<double>{0.5}, one, 1)[0], 0.0);
  const double near_one = std::abs(focal_loss_grad(std::vector<double>{1.0 - 1e-3}, one, 1)[0]);
  const double closer = std::abs(focal_loss_grad(std::vector<double>{1.0 - 1e-4}, one, 1)[0]);
  EXPECT_LT(near_one, 3e-3);
  EXPECT_LT(closer, near_one);
  // A background cell is pushed down.
  EXPECT_GT(focal_loss_grad(std::vector<double>{0.3}, std::vector<double>{0.2}, 1)[0], 0.0);
  // Saturated inputs sit on the clamp and get no gradient.
  EXPECT_EQ(focal_loss_grad(std::vector<double>{1.0}, one, 1)[0], 0.0);
}

TEST(MaskedL1, Examples) {
  // 1 x 2 map, channel-major.
  const std::vector<double> pred = {3, 0, 4, 0};
  const std::vector<double> target = {1, 9, 1, 9};
  const std::vector<Cell> cells = {{0, 0}};
  EXPECT_EQ(masked_l1_loss(pred, target, 1, 2, cells, 1), 5.0);
  EXPECT_EQ(masked_l1_loss(pred, pred, 1, 2, cells, 1), 0.0);
  EXPECT_EQ(masked_l1_loss(pred, target, 1, 2, {}, 0), 0.0);
  const std::vector<Cell> both = {{0, 0}, {1, 0}};
  EXPECT_EQ(masked_l1_loss(pred, target, 1, 2, both, 2), (5.0 + 18.0) / 2);
}

TEST(MaskedL1, Errors) {
  const std::vector<double> pred = {3, 0, 4, 0};
  const std::vector<Cell> outside = {{2, 0}};
  try {
    masked_l1_loss(pred, pred, 1, 2, outside, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CellOutOfBounds);
  }
  try {
    masked_l1_loss(pred, pred, 2, 2, std::vector<Cell>{{0, 0}}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

GroundTruthObject object(int category, BBox box) {
  GroundTruthObject o;
  o.category = category;
  o.bbox = box;
  return o;
}

// Saturated prediction of `targets`: unit peaks at 1-1e-4, every other heat
// cell at 1e-4, regression heads copied.
DetectionMaps saturated(const DetectionMaps& targets) {
  DetectionMaps p = targets;
  for (double& v : p.heatmap) v = v == 1.0 ? 1.0 - kProbClamp : kProbClamp;
  return p;
}

std::vector<GroundTruthObject> small_scene() {
  return {object(1, {2, 3, 6, 7}), object(4, {20, 9, 24, 12}), object(4, {40, 40, 44, 46})};
}

TEST(TotalLoss, PerfectPredictionIsNearZero) {
  const auto targets = encode_targets(small_scene(), 64, 64);
  EXPECT_LE(total_loss(saturated(targets), targets), 1e-3);
  // Small objects carry only a thin Gaussian ring, so clamping the targets
  // themselves also scores near zero.
  DetectionMaps clamped = targets;
  for (double& v : clamped.heatmap) v = std::clamp(v, kProbClamp, 1.0 - kProbClamp);
  EXPECT_LE(total_loss(clamped, targets), 1e-3);
}

TEST(TotalLoss, Linearity) {
  testing::Rng rng(4);
  const auto targets = encode_targets(small_scene(), 64, 64);
  const auto preds = maps_cast<double>(testing::random_maps(rng, 10, 16, 16, 4));
  LossWeights none;
  none.lambda_size = 0;
  none.lambda_off = 0;
  const auto [cells, count] = object_centers(targets);
  EXPECT_EQ(count, 3);
  EXPECT_EQ(total_loss(preds, targets, none), focal_loss(preds.heatmap, targets.heatmap, 3));

  LossWeights w1;
  LossWeights w2;
  w2.lambda_size = 2 * w1.lambda_size;
  const auto b = total_loss_breakdown(preds, targets, w1);
  EXPECT_GT(b.size, 0.0);
  EXPECT_NEAR(total_loss(preds, targets, w2) - total_loss(preds, targets, w1),
              w1.lambda_size * b.size, 1e-12);
  EXPECT_NEAR(b.size, masked_l1_loss(preds.size_map, targets.size_map, 16, 16, cells, 3), 0.0);
}

TEST(TotalLoss, MinimumAtTruth) {
  const auto targets = encode_targets(small_scene(), 64, 64);
  const auto best = saturated(targets);
  const double base = total_loss(best, targets);
  for (std::size_t i = 0; i < best.heatmap.size(); ++i) {
    DetectionMaps p = best;
    p.heatmap[i] += targets.heatmap[i] == 1.0 ? -0.01 : 0.01;
    EXPECT_GT(total_loss(p, targets), base) << "heat " << i;
  }
  const auto [cells, count] = object_centers(targets);
  for (const Cell& c : cells) {
    for (int ch = 0; ch < 2; ++ch) {
      for (double delta : {-0.01, 0.01}) {
        DetectionMaps p = best;
        p.size(ch, c.py, c.px) += delta;
        EXPECT_GT(total_loss(p, targets), base);
        p = best;
        p.offset(ch, c.py, c.px) += delta;
        EXPECT_GT(total_loss(p, targets), base);
      }
    }
  }
}

TEST(TotalLoss, EmptySceneUsesUnitCount) {
  const auto targets = encode_targets({}, 32, 32);
  auto preds = targets;
  for (double& v : preds.heatmap) v = 0.5;
  EXPECT_NEAR(total_loss(preds, targets), focal_loss(preds.heatmap, targets.heatmap, 1), 0.0);
}

TEST(TotalLoss, ShapeMismatch) {
  const auto a = encode_targets({}, 32, 32);
  const auto b = encode_targets({}, 32, 64);
  try {
    total_loss(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(TrainConfigRecord, PublishedValues) {
  const TrainConfig c;
  EXPECT_EQ(c.initial_lr, 2.5e-4);
  EXPECT_EQ(c.lr_drop_epochs[0], 90);
  EXPECT_EQ(c.lr_drop_epochs[1], 120);
  EXPECT_EQ(c.lr_drop_factor, 10.0);
  EXPECT_EQ(c.optimizer_name, "ADAM");
  EXPECT_EQ(c.train_resolution, 1024);
}

}  // namespace
}  // namespace centerdet
