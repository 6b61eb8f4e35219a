//
// Copyright 2026 The PCEvolve Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "pcevolve/core.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "pcevolve/rng.h"

namespace pcevolve {
namespace {

TEST(FeatureVectorTest, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(FeatureVector(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(FeatureVector({1.0, NAN}), std::invalid_argument);
  EXPECT_THROW(FeatureVector({INFINITY}), std::invalid_argument);
}

TEST(L2DistanceTest, Examples) {
  EXPECT_DOUBLE_EQ(L2Distance({0, 0}, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(L2Distance({1, 1}, {1, 1}), 0.0);
  EXPECT_NEAR(L2Distance({0, 0, 0}, {1, 1, 1}), 1.7320508075688772, 1e-15);
}

TEST(L2DistanceTest, DimensionMismatchThrows) {
  EXPECT_THROW(L2Distance({0, 0}, {0, 0, 0}), DimensionMismatchError);
}

TEST(L2DistanceTest, TriangleInequalityAndSymmetryOnRandomTriples) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + trial % 7;
    auto draw = [&] {
      std::vector<double> v(d);
      for (double& x : v) x = rng.Normal(0.0, 1.0 + trial % 5);
      return FeatureVector(std::move(v));
    };
    const FeatureVector a = draw(), b = draw(), c = draw();
    const double ab = L2Distance(a, b), bc = L2Distance(b, c),
                 ac = L2Distance(a, c);
    EXPECT_LE(ac, (ab + bc) * (1 + 1e-9));
    EXPECT_EQ(ab, L2Distance(b, a));
    EXPECT_GE(ab, 0.0);
  }
}

TEST(MeanCenterTest, Examples) {
  const std::vector<FeatureVector> sym = {{0, 0}, {2, 2}};
  EXPECT_EQ(MeanCenter(sym), FeatureVector({1, 1}));
  const std::vector<FeatureVector> single = {{5, 0}};
  EXPECT_EQ(MeanCenter(single), FeatureVector({5, 0}));
  const std::vector<FeatureVector> zero = {{1, 0}, {0, 1}, {-1, -1}};
  EXPECT_EQ(MeanCenter(zero), FeatureVector({0, 0}));
}

TEST(MeanCenterTest, EmptyAndMixedDimensionThrow) {
  EXPECT_THROW(MeanCenter({}), std::invalid_argument);
  const std::vector<FeatureVector> mixed = {{1, 2}, {1, 2, 3}};
  EXPECT_THROW(MeanCenter(mixed), DimensionMismatchError);
}

TEST(MeanCenterTest, BitIdenticalUnderPermutation) {
  Rng rng(5);
  std::mt19937_64 shuffler(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FeatureVector> pts;
    for (int i = 0; i < 25; ++i) {
      pts.push_back(FeatureVector({rng.Normal() * 1e3, rng.Normal() * 1e-3,
                                   rng.Normal()}));
    }
    const FeatureVector reference = MeanCenter(pts);
    std::shuffle(pts.begin(), pts.end(), shuffler);
    EXPECT_EQ(MeanCenter(pts), reference);
  }
}

TEST(ClassCentersTest, DuplicatedPointsReturnedExactly) {
  Dataset data(3, 2);
  const std::vector<FeatureVector> pts = {{0.1, 0.7}, {-3.3, 1e-9}, {5, 5}};
  for (int rep = 0; rep < 7; ++rep) {
    for (int c = 0; c < 3; ++c) data.Add(pts[c], c);
  }
  const ClassCenterSet centers = ClassCenters(data);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(centers[c], pts[c]);
}

TEST(ClassCentersTest, EmptyClassNamesTheClass) {
  Dataset data(3, 1);
  data.Add({1.0}, 0);
  data.Add({2.0}, 2);
  try {
    ClassCenters(data);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos);
  }
}

TEST(DatasetTest, ValidatesLabelsAndDimension) {
  EXPECT_THROW(Dataset(1, 2), std::invalid_argument);
  Dataset data(2, 2);
  EXPECT_THROW(data.Add({1, 2}, 2), std::out_of_range);
  EXPECT_THROW(data.Add({1, 2}, -1), std::out_of_range);
  EXPECT_THROW(data.Add({1, 2, 3}, 0), DimensionMismatchError);
  data.Add({1, 2}, 1);
  data.Add({3, 4}, 0);
  EXPECT_EQ(data.IndicesOfClass(0), std::vector<std::size_t>{1});
  EXPECT_EQ(data.ClassCounts(), (std::vector<std::size_t>{1, 1}));
}

TEST(RngTest, SameSeedSameStreamDifferentLabelsDiffer) {
  Rng a(42, "select", 3, 1), b(42, "select", 3, 1), c(42, "select", 3, 0);
  for (int i = 0; i < 100; ++i) {
    const double x = a.Normal();
    EXPECT_EQ(x, b.Normal());
    (void)c;
  }
  EXPECT_NE(DeriveSeed(42, "select", 3, 1), DeriveSeed(42, "select", 3, 0));
  EXPECT_NE(DeriveSeed(42, "select", 3, 1), DeriveSeed(42, "refine", 3, 1));
}

TEST(RngTest, UniformInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace pcevolve
