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

#include "pcevolve/selector.h"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "oracles/sensitivity_oracle.h"

namespace pcevolve {
namespace {

const ClassCenterSet kLine({FeatureVector({0, 0}), FeatureVector({10, 0})});

LabeledPoint At(double x, double y, int c = 0) {
  return {FeatureVector({x, y}), c};
}

TEST(ContrastiveFilterTest, Examples) {
  EXPECT_TRUE(ContrastiveFilter(At(1, 0), kLine));
  EXPECT_FALSE(ContrastiveFilter(At(5, 0), kLine));  // tie fails
  EXPECT_FALSE(ContrastiveFilter(At(9, 0), kLine));
  EXPECT_TRUE(ContrastiveFilter(At(9, 0, 1), kLine));
}

TEST(ContrastiveFilterTest, ChecksEveryOtherClass) {
  const ClassCenterSet three(
      {FeatureVector({0, 0}), FeatureVector({10, 0}), FeatureVector({2, 1})});
  EXPECT_FALSE(ContrastiveFilter(At(1.5, 1), three));
  EXPECT_TRUE(ContrastiveFilter(At(2, 1, 2), three));
}

TEST(ContrastiveFilterTest, DimensionMismatchThrows) {
  EXPECT_THROW(ContrastiveFilter({FeatureVector({1, 2, 3}), 0}, kLine),
               DimensionMismatchError);
}

TEST(RawSimilarityTest, Examples) {
  EXPECT_DOUBLE_EQ(RawSimilarity(At(0, 0), kLine), 1.0);
  EXPECT_NEAR(RawSimilarity(At(std::log(2.0), 0), kLine), 0.5, 1e-15);
  EXPECT_EQ(RawSimilarity(At(9, 0), kLine), 0.0);
}

TEST(CalibratedUtilitiesTest, ThreePassingDistances) {
  const std::vector<LabeledPoint> pool = {At(0, 2), At(0, 4), At(0, 6)};
  const UtilityScores u = CalibratedUtilities(pool, kLine, {10.0});
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  EXPECT_NEAR(u[1], 6.73794699908546710e-3, 1e-17);
  EXPECT_NEAR(u[2], 4.53999297624848515e-5, 1e-19);
}

TEST(CalibratedUtilitiesTest, FailingCandidatesScoreZeroAndDoNotSetRange) {
  // (9, 0) fails; passing distances are 2 and 4 only.
  const std::vector<LabeledPoint> pool = {At(0, 2), At(9, 0), At(0, 4)};
  const UtilityScores u = CalibratedUtilities(pool, kLine, {10.0});
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  EXPECT_EQ(u[1], 0.0);
  EXPECT_NEAR(u[2], std::exp(-10.0), 1e-18);
}

TEST(CalibratedUtilitiesTest, DegenerateRanges) {
  const std::vector<LabeledPoint> one = {At(9, 0), At(0, 3), At(7, 0)};
  const UtilityScores u1 = CalibratedUtilities(one, kLine, {10.0});
  EXPECT_EQ(std::vector<double>(u1.values().begin(), u1.values().end()),
            (std::vector<double>{0, 1, 0}));

  const std::vector<LabeledPoint> equal = {At(0, 3), At(3, 0), At(0, -3)};
  const UtilityScores u2 = CalibratedUtilities(equal, kLine, {10.0});
  for (double v : u2.values()) EXPECT_EQ(v, 1.0);

  const std::vector<LabeledPoint> none = {At(9, 0), At(5, 0)};
  const UtilityScores u3 = CalibratedUtilities(none, kLine, {10.0});
  for (double v : u3.values()) EXPECT_EQ(v, 0.0);
  const auto p = EmProbabilities(u3, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
}

TEST(CalibratedUtilitiesTest, RejectsMixedLabelsAndBadTau) {
  const std::vector<LabeledPoint> mixed = {At(0, 1, 0), At(10, 1, 1)};
  EXPECT_THROW(CalibratedUtilities(mixed, kLine, {10.0}),
               std::invalid_argument);
  const std::vector<LabeledPoint> ok = {At(0, 1)};
  EXPECT_THROW(CalibratedUtilities(ok, kLine, {0.0}), std::invalid_argument);
}

// Random per-class pools around two random centers.
struct RandomPool {
  ClassCenterSet centers;
  std::vector<LabeledPoint> pool;
};

RandomPool DrawPool(Rng& rng, int class_id, int size, std::size_t d) {
  std::vector<FeatureVector> centers;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.Normal(0, 3);
    centers.emplace_back(std::move(v));
  }
  std::vector<LabeledPoint> pool;
  for (int i = 0; i < size; ++i) {
    std::vector<double> v(d);
    for (double& x : v) x = rng.Normal(0, 4);
    pool.push_back({FeatureVector(std::move(v)), class_id});
  }
  return {ClassCenterSet(std::move(centers)), std::move(pool)};
}

TEST(CalibratedUtilitiesTest, RangeLawAndUniqueMaximum) {
  Rng rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const double tau = 0.5 + 30 * rng.Uniform();
    const RandomPool rp =
        DrawPool(rng, trial % 2, 1 + trial % 12, 1 + trial % 5);
    const UtilityScores u = CalibratedUtilities(rp.pool, rp.centers, {tau});
    int ones = 0;
    std::vector<double> passing;
    for (std::size_t i = 0; i < u.size(); ++i) {
      EXPECT_TRUE(u[i] == 0.0 || (u[i] >= std::exp(-tau) && u[i] <= 1.0));
      if (u[i] == 1.0) ++ones;
      if (ContrastiveFilter(rp.pool[i], rp.centers)) {
        passing.push_back(
            L2Distance(rp.pool[i].features, rp.centers[rp.pool[i].class_id]));
      }
    }
    std::sort(passing.begin(), passing.end());
    passing.erase(std::unique(passing.begin(), passing.end()), passing.end());
    if (passing.size() >= 2) EXPECT_EQ(ones, 1);
  }
}

TEST(CalibratedUtilitiesTest, NearestPassingCandidateHasHighestUtility) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const RandomPool rp = DrawPool(rng, 0, 8, 3);
    const UtilityScores u = CalibratedUtilities(rp.pool, rp.centers, {10.0});
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < rp.pool.size(); ++i) {
      const double d = L2Distance(rp.pool[i].features, rp.centers[0]);
      if (ContrastiveFilter(rp.pool[i], rp.centers) && d < best) {
        best = d;
        best_i = i;
      }
    }
    if (std::isinf(best)) continue;
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_GE(u[best_i], u[i]);
  }
}

TEST(CalibratedUtilitiesTest, ScaleCovariance) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const RandomPool rp = DrawPool(rng, 1, 10, 2);
    const double scale = 0.01 + 50 * rng.Uniform();
    std::vector<FeatureVector> scaled_centers;
    for (const FeatureVector& c : rp.centers.centers()) {
      std::vector<double> v(c.values().begin(), c.values().end());
      for (double& x : v) x *= scale;
      scaled_centers.emplace_back(std::move(v));
    }
    std::vector<LabeledPoint> scaled_pool;
    for (const LabeledPoint& p : rp.pool) {
      std::vector<double> v(p.features.values().begin(),
                            p.features.values().end());
      for (double& x : v) x *= scale;
      scaled_pool.push_back({FeatureVector(std::move(v)), p.class_id});
    }
    const ClassCenterSet sc(std::move(scaled_centers));
    const UtilityScores a = CalibratedUtilities(rp.pool, rp.centers, {10.0});
    const UtilityScores b = CalibratedUtilities(scaled_pool, sc, {10.0});
    for (std::size_t i = 0; i < rp.pool.size(); ++i) {
      EXPECT_EQ(ContrastiveFilter(rp.pool[i], rp.centers),
                ContrastiveFilter(scaled_pool[i], sc));
      for (std::size_t j = 0; j < rp.pool.size(); ++j) {
        // Ranking is preserved; values agree up to rounding.
        if (a[i] > a[j] + 1e-9) EXPECT_GE(b[i], b[j]);
      }
      EXPECT_NEAR(a[i], b[i], 1e-9);
    }
  }
}

TEST(VariantUtilitiesTest, Examples) {
  const std::vector<LabeledPoint> pool = {At(0, 2), At(0, 4), At(9, 0)};
  const UtilityScores g =
      VariantUtilities(UtilityMode::kFilterOnly, pool, kLine, {10.0});
  EXPECT_EQ(std::vector<double>(g.values().begin(), g.values().end()),
            (std::vector<double>{1, 1, 0}));

  const UtilityScores raw =
      VariantUtilities(UtilityMode::kRawFiltered, pool, kLine, {10.0});
  EXPECT_DOUBLE_EQ(raw[0], std::exp(-2.0));
  EXPECT_EQ(raw[2], 0.0);

  // All pass: h and h o g coincide.
  const std::vector<LabeledPoint> passing = {At(0, 2), At(0, 4), At(1, 5)};
  const UtilityScores h = VariantUtilities(UtilityMode::kCalibratedUnfiltered,
                                           passing, kLine, {10.0});
  const UtilityScores hg = VariantUtilities(UtilityMode::kCalibratedFiltered,
                                            passing, kLine, {10.0});
  for (std::size_t i = 0; i < passing.size(); ++i) EXPECT_EQ(h[i], hg[i]);

  // Without the filter the failing candidate gets a nonzero score.
  const UtilityScores h_all = VariantUtilities(
      UtilityMode::kCalibratedUnfiltered, pool, kLine, {10.0});
  EXPECT_GT(h_all[2], 0.0);
}

TEST(PeVotesTest, Examples) {
  Dataset pool(2, 2);
  for (int i = 0; i < 5; ++i) pool.Add({double(i), 0}, 0);
  pool.Add({0, 100}, 1);
  Dataset priv(2, 2);
  for (int i = 0; i < 10; ++i) priv.Add({3.1, 0.01 * i}, 0);
  priv.Add({0, 0}, 1);
  const auto votes = PeVotes(priv, pool);
  EXPECT_EQ(votes[0], (std::vector<int>{0, 0, 0, 10, 0}));
  EXPECT_EQ(votes[1], (std::vector<int>{1}));

  Dataset tie_pool(2, 1);
  tie_pool.Add({-1.0}, 0);
  tie_pool.Add({1.0}, 0);
  tie_pool.Add({5.0}, 1);
  Dataset tie_priv(2, 1);
  tie_priv.Add({0.0}, 0);
  tie_priv.Add({5.0}, 1);
  EXPECT_EQ(PeVotes(tie_priv, tie_pool)[0], (std::vector<int>{1, 0}));
}

TEST(PeVotesTest, ConservationOnRandomData) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + trial % 3;
    Dataset pool(classes, 3), priv(classes, 3);
    std::vector<int> k(classes);
    for (int c = 0; c < classes; ++c) {
      for (int i = 0; i < 7; ++i) {
        pool.Add({rng.Normal(), rng.Normal(), rng.Normal()}, c);
      }
      k[c] = 1 + static_cast<int>(rng.Uniform() * 12);
      for (int i = 0; i < k[c]; ++i) {
        priv.Add({rng.Normal(), rng.Normal(), rng.Normal()}, c);
      }
    }
    const auto votes = PeVotes(priv, pool);
    for (int c = 0; c < classes; ++c) {
      int sum = 0;
      for (int v : votes[c]) sum += v;
      EXPECT_EQ(sum, k[c]);
    }
  }
}

TEST(PeEmUtilitiesTest, NormalizesVotes) {
  const std::vector<int> votes = {10, 0};
  const UtilityScores u = PeEmUtilities(votes, 10);
  EXPECT_EQ(u[0], 1.0);
  EXPECT_EQ(u[1], 0.0);
  EXPECT_DOUBLE_EQ(PeEmSensitivity(10), 0.1);
  EXPECT_THROW(PeEmUtilities(votes, 0), std::invalid_argument);
}

TEST(ArgmaxTest, LowestIndexOnTies) {
  const std::vector<double> v = {1, 3, 3, 2};
  EXPECT_EQ(ArgmaxLowestIndex(v), 1u);
}

Dataset TwoClassPool() {
  Dataset pool(2, 2);
  for (int i = 0; i < 6; ++i) pool.Add({double(i), 1.0}, 0);
  for (int i = 0; i < 6; ++i) pool.Add({10.0 - i, -1.0}, 1);
  return pool;
}

TEST(SelectPrototypesTest, ChargesOncePerClassAndPicksOnePrototypeEach) {
  const PrivacyParams params{8.0, 1e-5, 20, 2};
  BudgetLedger ledger(params.TotalEpsilon());
  SelectionContext ctx{&kLine, {10.0}, params, &ledger, 7, 3};
  const Dataset pool = TwoClassPool();
  const SelectionOutcome out = SelectPrototypes(pool, ctx);
  ASSERT_EQ(out.prototypes.size(), 2u);
  EXPECT_EQ(out.prototypes[0].class_id, 0);
  EXPECT_EQ(out.prototypes[1].class_id, 1);
  EXPECT_EQ(ledger.charge_count(), 2u);
  EXPECT_EQ(ledger.spent(), Rational(2, 5));
  EXPECT_EQ(ledger.log()[0].label, "em/t3/c0");
  for (const ClassSelection& s : out.per_class) {
    EXPECT_EQ(pool[s.pool_index], out.prototypes[s.class_id]);
    EXPECT_EQ(s.utilities.size(), 6u);
    EXPECT_EQ(s.probabilities.size(), 6u);
  }
  // Deterministic in (seed, iteration).
  BudgetLedger again(params.TotalEpsilon());
  ctx.ledger = &again;
  const SelectionOutcome repeat = SelectPrototypes(pool, ctx);
  for (int c = 0; c < 2; ++c) {
    EXPECT_EQ(repeat.per_class[c].chosen_index, out.per_class[c].chosen_index);
  }
}

TEST(SelectPrototypesTest, EmptyClassPoolAndExhaustedBudgetAbort) {
  const PrivacyParams params{8.0, 1e-5, 20, 2};
  BudgetLedger ledger(params.TotalEpsilon());
  SelectionContext ctx{&kLine, {10.0}, params, &ledger, 0, 1};
  Dataset only_class0(2, 2);
  only_class0.Add({0, 0}, 0);
  EXPECT_THROW(SelectPrototypes(only_class0, ctx), EmptyClassPoolError);

  BudgetLedger tiny(Rational(1, 5));
  ctx.ledger = &tiny;
  EXPECT_THROW(SelectPrototypes(TwoClassPool(), ctx), BudgetExceededError);
  EXPECT_EQ(tiny.spent(), Rational(1, 5));
}

TEST(SelectPrototypesTest, LargeEpsilonConcentratesOnBestCandidate) {
  const PrivacyParams params{4000.0, 1e-5, 1, 2};
  BudgetLedger ledger(params.TotalEpsilon());
  SelectionContext ctx{&kLine, {10.0}, params, &ledger, 0, 1};
  const SelectionOutcome out = SelectPrototypes(TwoClassPool(), ctx);
  // Class 0 candidates sit at (i, 1); (0, 1) is nearest to (0, 0).
  EXPECT_EQ(out.per_class[0].chosen_index, 0u);
  EXPECT_EQ(out.per_class[1].chosen_index, 0u);
}

TEST(SelectVariantsTest, PeEmAndGaussianChargePerClass) {
  const PrivacyParams params{8.0, 1e-5, 20, 2};
  Dataset priv(2, 2);
  for (int i = 0; i < 3; ++i) priv.Add({0.0, 1.0}, 0);
  for (int i = 0; i < 3; ++i) priv.Add({10.0, -1.0}, 1);
  const ClassCenterSet centers = ClassCenters(priv);
  BudgetLedger ledger(params.TotalEpsilon());
  SelectionContext ctx{&centers, {10.0}, params, &ledger, 1, 1};
  const SelectionOutcome em = SelectPeEm(TwoClassPool(), priv, ctx);
  EXPECT_EQ(em.per_class[0].utilities[0], 1.0);  // all 3 votes on (0, 1)
  const SelectionOutcome gm = SelectGaussianUtilities(TwoClassPool(), 3, ctx);
  EXPECT_EQ(gm.prototypes.size(), 2u);
  EXPECT_EQ(ledger.charge_count(), 4u);
  EXPECT_EQ(ledger.log()[2].label, "gm/t1/c0");
}

// Literal enumeration of replace-one neighbours, used to validate the
// oracle's sum-rectangle shortcut on an instance small enough to enumerate.
double EnumeratedMaxChange(int k, int grid,
                           const std::vector<std::vector<LabeledPoint>>& pools) {
  std::vector<FeatureVector> cells;
  for (int x = 0; x < grid; ++x) {
    for (int y = 0; y < grid; ++y) cells.push_back(FeatureVector({double(x), double(y)}));
  }
  const int n = static_cast<int>(cells.size());
  const int points = 2 * k;
  auto centers_of = [&](const std::vector<int>& d) {
    std::vector<FeatureVector> c;
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<FeatureVector> members;
      for (int i = 0; i < k; ++i) members.push_back(cells[d[cls * k + i]]);
      c.push_back(MeanCenter(members));
    }
    return ClassCenterSet(std::move(c));
  };
  double max_change = 0;
  std::vector<int> d(points, 0);
  while (true) {
    const ClassCenterSet base = centers_of(d);
    for (const auto& pool : pools) {
      const UtilityScores u = CalibratedUtilities(pool, base, {10.0});
      for (int i = 0; i < points; ++i) {
        std::vector<int> nb = d;
        for (int q = 0; q < n; ++q) {
          nb[i] = q;
          const UtilityScores v =
              CalibratedUtilities(pool, centers_of(nb), {10.0});
          for (std::size_t r = 0; r < pool.size(); ++r) {
            max_change = std::max(max_change, std::abs(u[r] - v[r]));
          }
        }
      }
    }
    int pos = 0;
    while (pos < points && ++d[pos] == n) d[pos++] = 0;
    if (pos == points) break;
  }
  return max_change;
}

TEST(SensitivityOracleTest, AgreesWithLiteralEnumeration) {
  const auto pools = testing::GridPools(/*grid=*/3, /*max_pool=*/2,
                                        /*sampled_per_size=*/0);
  const std::vector<std::vector<LabeledPoint>> some(pools.begin(),
                                                    pools.begin() + 12);
  for (int k = 1; k <= 2; ++k) {
    const testing::SensitivityReport r =
        testing::BruteForceSensitivity(k, 3, some, {10.0});
    // The oracle accumulates over K = 1..k; compare against the max of the
    // literal enumeration over the same K range.
    double literal = 0;
    for (int j = 1; j <= k; ++j) {
      literal = std::max(literal, EnumeratedMaxChange(j, 3, some));
    }
    EXPECT_DOUBLE_EQ(r.max_change, literal) << "K <= " << k;
  }
}

TEST(SensitivityOracleTest, SmallExhaustiveInstanceStaysWithinOne) {
  const auto pools = testing::GridPools(/*grid=*/3, /*max_pool=*/3,
                                        /*sampled_per_size=*/10);
  const testing::SensitivityReport r =
      testing::BruteForceSensitivity(/*max_k=*/2, /*grid=*/3, pools, {10.0});
  EXPECT_GE(r.min_utility, 0.0);
  EXPECT_LE(r.max_utility, 1.0);
  EXPECT_LE(r.max_change, 1.0);
  EXPECT_EQ(r.max_change, 1.0);
}

}  // namespace
}  // namespace pcevolve
