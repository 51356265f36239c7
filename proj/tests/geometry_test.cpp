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

#include <random>

#include "centerdet/geometry.hpp"
#include "test_support.hpp"

namespace centerdet {
namespace {

TEST(Iou, IdenticalBoxesGiveOne) {
  const BBox a{3, 4, 10, 12};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
}

TEST(Iou, DisjointBoxesGiveZero) {
  EXPECT_EQ(iou({0, 0, 1, 1}, {2, 2, 3, 3}), 0.0);
  // Touching edges share no area.
  EXPECT_EQ(iou({0, 0, 1, 1}, {1, 0, 2, 1}), 0.0);
}

TEST(Iou, HalfOverlap) {
  // intersection 2, union 6
  EXPECT_DOUBLE_EQ(iou({0, 0, 2, 2}, {1, 0, 3, 2}), 1.0 / 3.0);
}

TEST(Iou, DegenerateBoxesGiveZero) {
  EXPECT_EQ(iou({1, 1, 1, 1}, {1, 1, 1, 1}), 0.0);
  EXPECT_EQ(iou({0, 0, 0, 5}, {0, 0, 3, 5}), 0.0);
}

TEST(FlipBox, Reflects) {
  EXPECT_EQ(flip_box({10, 5, 30, 25}, 100), (BBox{70, 5, 90, 25}));
  EXPECT_EQ(flip_box({40, 0, 60, 10}, 100), (BBox{40, 0, 60, 10}));
}

TEST(RescaleBox, MapsBack) {
  const BBox b{10, 20, 30, 40};
  EXPECT_EQ(rescale_box(b, 1.0, 1.0), b);
  EXPECT_EQ(rescale_box(b, 2.0, 2.0), (BBox{5, 10, 15, 20}));
  EXPECT_EQ(rescale_box(b, 2.0, 4.0), (BBox{5, 5, 15, 10}));
}

TEST(RescaleBox, RejectsNonPositiveScale) {
  const BBox b{10, 20, 30, 40};
  for (double s : {0.0, -1.0}) {
    try {
      rescale_box(b, s, 1.0);
      FAIL() << "expected NonPositiveScale";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::NonPositiveScale);
    }
  }
  EXPECT_THROW(rescale_box(b, 1.0, 0.0), Error);
}

class GeometryProperties : public ::testing::Test {
 protected:
  BBox random_box() {
    const double x = testing::uniform(rng_, 0, 90);
    const double y = testing::uniform(rng_, 0, 90);
    return {x, y, x + testing::uniform(rng_, 0.5, 10), y + testing::uniform(rng_, 0.5, 10)};
  }
  testing::Rng rng_{20260101};
};

TEST_F(GeometryProperties, IouSymmetricAndBounded) {
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box();
    const BBox b = random_box();
    const double v = iou(a, b);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  }
}

TEST_F(GeometryProperties, FlipIsInvolutionAndPreservesIou) {
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box();
    const BBox b = random_box();
    const BBox back = flip_box(flip_box(a, 100.0), 100.0);
    EXPECT_NEAR(back.x1, a.x1, 1e-12);
    EXPECT_NEAR(back.x2, a.x2, 1e-12);
    EXPECT_EQ(back.y1, a.y1);
    EXPECT_NEAR(iou(flip_box(a, 100.0), flip_box(b, 100.0)), iou(a, b), 1e-12);
  }
}

TEST_F(GeometryProperties, UniformRescalePreservesIou) {
  for (int i = 0; i < 2000; ++i) {
    const BBox a = random_box();
    const BBox b = random_box();
    for (double s : {0.5, 0.75, 1.25, 2.0}) {
      EXPECT_NEAR(iou(rescale_box(a, s, s), rescale_box(b, s, s)), iou(a, b), 1e-12);
    }
  }
}

}  // namespace
}  // namespace centerdet
