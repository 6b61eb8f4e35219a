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

#include "pcevolve/generator.h"

#include <cmath>
#include <numeric>

#include "gtest/gtest.h"

namespace pcevolve {
namespace {

const PromptSpec kPrompt{"synthetic", {"class 0", "class 1"}};

std::vector<double> ClassMean(const Dataset& data, int c) {
  std::vector<double> mean(data.dimension(), 0.0);
  const auto pts = data.OfClass(c);
  for (const LabeledPoint& p : pts) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p.features[j];
  }
  for (double& v : mean) v /= static_cast<double>(pts.size());
  return mean;
}

TEST(StrengthScheduleTest, AnnealsToFloor) {
  const StrengthSchedule s;
  EXPECT_EQ(s.At(0), 0.8);
  EXPECT_EQ(s.At(1), 0.78);
  EXPECT_EQ(s.At(10), 0.6);
  EXPECT_EQ(s.At(11), 0.6);
  EXPECT_EQ(s.At(19), 0.6);
  for (int t = 0; t < 30; ++t) {
    EXPECT_LE(s.At(t + 1), s.At(t));
    EXPECT_GE(s.At(t), 0.6);
  }
}

TEST(StrengthScheduleTest, Validation) {
  EXPECT_THROW((StrengthSchedule{0.5, 0.02, 0.6}.Validate()),
               std::invalid_argument);
  EXPECT_NO_THROW(StrengthSchedule{}.Validate());
}

TEST(PromptSpecTest, Validation) {
  EXPECT_THROW((PromptSpec{"", {"a", "b"}}.Validate()), std::invalid_argument);
  EXPECT_THROW((PromptSpec{"x", {"a"}}.Validate()), std::invalid_argument);
}

TEST(MockWorldTest, DefaultShapeAndValidation) {
  const MockWorld w = MockWorld::Default(3, 5, 2.0);
  EXPECT_EQ(w.class_count(), 3);
  EXPECT_EQ(w.dimension(), 5u);
  EXPECT_NEAR(L2Distance(w.private_means[1], w.generator_means[1]), 2.0,
              1e-12);
  EXPECT_DOUBLE_EQ(w.jitter, 0.05 * w.generator_spread);
  MockWorld bad = w;
  bad.generator_spread = 0;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = w;
  bad.private_means.erase(bad.private_means.begin() + 1,
                           bad.private_means.end());
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(InitPoolTest, CardinalityAndDeterminism) {
  MockBackend backend(MockWorld::Default());
  const Dataset a = InitPool(kPrompt, 100, backend, 42);
  EXPECT_EQ(a.size(), 200u);
  EXPECT_EQ(a.ClassCounts(), (std::vector<std::size_t>{100, 100}));
  EXPECT_EQ(a, InitPool(kPrompt, 100, backend, 42));
  EXPECT_NE(a, InitPool(kPrompt, 100, backend, 43));
  EXPECT_THROW(InitPool(kPrompt, 0, backend, 1), std::invalid_argument);
}

TEST(InitPoolTest, SampleMeanWithinCltBound) {
  const MockWorld world = MockWorld::Default();
  MockBackend backend(world);
  const int n = 100;
  const double bound = 3.0 * world.generator_spread / std::sqrt(double(n));
  int violations = 0, checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset pool = InitPool(kPrompt, n, backend, seed);
    for (int c = 0; c < 2; ++c) {
      const auto mean = ClassMean(pool, c);
      for (std::size_t j = 0; j < mean.size(); ++j, ++checks) {
        if (std::abs(mean[j] - world.generator_means[c][j]) > bound) {
          ++violations;
        }
      }
    }
  }
  // Each coordinate exceeds 3 sigma with probability 0.27%.
  EXPECT_LE(violations, 2) << "of " << checks;
}

TEST(InitPoolTest, PromptClassCountMustMatchWorld) {
  MockBackend backend(MockWorld::Default(3));
  EXPECT_THROW(InitPool(kPrompt, 5, backend, 0), BackendError);
}

TEST(RefinePoolTest, ZeroStrengthWithoutJitterCopiesPrototypes) {
  MockWorld world = MockWorld::Default();
  world.jitter = 0;
  MockBackend backend(world);
  const std::vector<LabeledPoint> protos = {
      {FeatureVector({0.5, 0.1, -0.2, 3.0}), 0},
      {FeatureVector({-1.0, 2.0, 0.0, 0.25}), 1}};
  const Dataset out = RefinePool(protos, 7, 0.0, backend, 9);
  ASSERT_EQ(out.size(), 14u);
  for (const LabeledPoint& p : out.points()) {
    EXPECT_EQ(p.features, protos[p.class_id].features);
  }
}

TEST(RefinePoolTest, FullStrengthMatchesInitDistribution) {
  MockWorld world = MockWorld::Default();
  world.jitter = 0;
  MockBackend backend(world);
  const std::vector<LabeledPoint> protos = {
      {FeatureVector({50, 50, 50, 50}), 0},
      {FeatureVector({-50, 0, 0, 0}), 1}};
  const int n = 20000;
  const Dataset refined = RefinePool(protos, n, 1.0, backend, 3);
  const Dataset init = InitPool(kPrompt, n, backend, 3);
  const double tol = 4.0 * world.generator_spread * std::sqrt(2.0 / n);
  for (int c = 0; c < 2; ++c) {
    const auto a = ClassMean(refined, c);
    const auto b = ClassMean(init, c);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], tol);
    double var = 0;
    for (const LabeledPoint& p : refined.OfClass(c)) {
      var += std::pow(p.features[0] - a[0], 2);
    }
    EXPECT_NEAR(std::sqrt(var / n), world.generator_spread, 0.03);
  }
}

TEST(RefinePoolTest, InterpolationMeanAtStrengthPointSix) {
  const MockWorld world = MockWorld::Default();
  MockBackend backend(world);
  std::vector<LabeledPoint> protos;
  for (int c = 0; c < 2; ++c) protos.push_back({world.private_means[c], c});
  const int n = 20000;
  const Dataset out = RefinePool(protos, n, 0.6, backend, 11);
  const double sd = std::sqrt(std::pow(0.6 * world.generator_spread, 2) +
                              world.jitter * world.jitter);
  const double tol = 4.0 * sd / std::sqrt(double(n));
  for (int c = 0; c < 2; ++c) {
    const auto mean = ClassMean(out, c);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double expected =
          0.4 * world.private_means[c][j] + 0.6 * world.generator_means[c][j];
      EXPECT_NEAR(mean[j], expected, tol);
    }
  }
}

TEST(RefinePoolTest, ContractChecks) {
  MockBackend backend(MockWorld::Default());
  const std::vector<LabeledPoint> protos = {
      {FeatureVector::Zeros(4), 0}, {FeatureVector::Zeros(4), 1}};
  EXPECT_THROW(RefinePool(protos, 5, 1.5, backend, 0), std::invalid_argument);
  EXPECT_THROW(RefinePool(protos, 5, -0.1, backend, 0), std::invalid_argument);
  const std::vector<LabeledPoint> swapped = {protos[1], protos[0]};
  EXPECT_THROW(RefinePool(swapped, 5, 0.5, backend, 0), std::invalid_argument);
  const std::vector<LabeledPoint> wrong_dim = {
      {FeatureVector::Zeros(3), 0}, {FeatureVector::Zeros(3), 1}};
  EXPECT_THROW(RefinePool(wrong_dim, 5, 0.5, backend, 0),
               DimensionMismatchError);
  EXPECT_EQ(RefinePool(protos, 5, 0.5, backend, 4),
            RefinePool(protos, 5, 0.5, backend, 4));
}

// A backend that returns the wrong number of candidates.
class ShortBackend : public GeneratorBackend {
 public:
  Dataset Init(const PromptSpec&, int per_class, std::uint64_t) override {
    Dataset d(2, 1);
    for (int i = 0; i < per_class; ++i) d.Add({0.0}, 0);
    return d;
  }
  Dataset Refine(std::span<const LabeledPoint>, int per_class, double,
                 std::uint64_t seed) override {
    return Init(kPrompt, per_class, seed);
  }
};

TEST(RefinePoolTest, CardinalityIsEnforcedForEveryBackend) {
  ShortBackend backend;
  EXPECT_THROW(InitPool(kPrompt, 3, backend, 0), BackendError);
  const std::vector<LabeledPoint> protos = {{FeatureVector({0.0}), 0},
                                            {FeatureVector({1.0}), 1}};
  EXPECT_THROW(RefinePool(protos, 3, 0.5, backend, 0), BackendError);
}

TEST(MockWorldTest, DomainGapSeparatesInitPoolFromPrivateData) {
  const MockWorld world = MockWorld::Default();
  MockBackend backend(world);
  Rng rng(0, "test/private");
  const Dataset priv = world.SamplePrivate(1000, rng);
  const ClassCenterSet centers = ClassCenters(priv);
  const Dataset pool = InitPool(kPrompt, 1000, backend, 0);
  auto mean_dist = [&](const Dataset& d) {
    double sum = 0;
    for (const LabeledPoint& p : d.points()) {
      sum += L2Distance(p.features, centers[p.class_id]);
    }
    return sum / static_cast<double>(d.size());
  };
  EXPECT_GT(mean_dist(pool), mean_dist(priv) + 2.0);

  const MockWorld oracle = MockWorld::Oracle();
  MockBackend oracle_backend(oracle);
  const Dataset same = InitPool(kPrompt, 1000, oracle_backend, 0);
  EXPECT_NEAR(mean_dist(same), mean_dist(priv), 0.1);
}

TEST(DpImageTest, ClipToUnitBall) {
  EXPECT_EQ(ClipToUnitBall(FeatureVector({0.3, 0.4})),
            FeatureVector({0.3, 0.4}));
  const FeatureVector c = ClipToUnitBall(FeatureVector({3, 4}));
  EXPECT_DOUBLE_EQ(c[0], 0.6);
  EXPECT_DOUBLE_EQ(c[1], 0.8);
}

TEST(DpImageTest, NoiseScaleAndLimit) {
  Dataset priv(2, 3);
  priv.Add({10, 0, 0}, 0);
  priv.Add({0, 0, 0}, 1);
  Rng rng(1);
  const Dataset huge = DpImageBaseline(priv, {1e9, 1e-5, 1, 2}, rng);
  EXPECT_NEAR(huge[0].features[0], 1.0, 1e-6);
  EXPECT_NEAR(huge[1].features[2], 0.0, 1e-6);

  // Zero vector input: pure noise at sigma = gm_sigma(2, 8, 1e-5).
  Dataset zeros(2, 1);
  for (int i = 0; i < 20000; ++i) zeros.Add({0.0}, i % 2);
  Rng rng2(2);
  const Dataset noised = DpImageBaseline(zeros, {8.0, 1e-5, 20, 2}, rng2);
  double ss = 0;
  for (const LabeledPoint& p : noised.points()) ss += p.features[0] * p.features[0];
  EXPECT_NEAR(std::sqrt(ss / noised.size()), 1.21120131565134736, 0.03);
  EXPECT_NEAR(GmSigma(kDpImageSensitivity, 8.0, 1e-5), 1.21120131565134736,
              1e-12);
}

TEST(DpImageTest, FirstOfEachClassPicksLowestIndex) {
  Dataset d(2, 1);
  d.Add({5.0}, 1);
  d.Add({1.0}, 0);
  d.Add({2.0}, 0);
  d.Add({6.0}, 1);
  const auto firsts = FirstOfEachClass(d);
  EXPECT_EQ(firsts[0].features[0], 1.0);
  EXPECT_EQ(firsts[1].features[0], 5.0);
  Dataset missing(2, 1);
  missing.Add({1.0}, 0);
  EXPECT_THROW(FirstOfEachClass(missing), std::invalid_argument);
}

}  // namespace
}  // namespace pcevolve
