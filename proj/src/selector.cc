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

#include <cmath>
#include <limits>

namespace pcevolve {
namespace {

void CheckCandidate(const LabeledPoint& candidate,
                    const ClassCenterSet& centers) {
  if (centers.class_count() < 2) {
    throw std::invalid_argument("contrastive filter needs at least 2 classes");
  }
  if (candidate.features.dimension() != centers.dimension()) {
    throw DimensionMismatchError(centers.dimension(),
                                 candidate.features.dimension());
  }
  if (candidate.class_id < 0 || candidate.class_id >= centers.class_count()) {
    throw std::out_of_range("candidate class " +
                            std::to_string(candidate.class_id) +
                            " has no center");
  }
}

std::string SelectLabel(const char* kind, int iteration, int class_id) {
  return std::string(kind) + "/t" + std::to_string(iteration) + "/c" +
         std::to_string(class_id);
}

struct ClassPool {
  std::vector<LabeledPoint> candidates;
  std::vector<std::size_t> indices;
};

ClassPool PoolOfClass(const Dataset& pool, int class_id) {
  ClassPool out{pool.OfClass(class_id), pool.IndicesOfClass(class_id)};
  if (out.candidates.empty()) throw EmptyClassPoolError(class_id);
  return out;
}

void CheckContext(const SelectionContext& ctx, const Dataset& pool) {
  if (ctx.centers == nullptr || ctx.ledger == nullptr) {
    throw std::invalid_argument("selection context is missing centers/ledger");
  }
  if (ctx.centers->class_count() != pool.class_count()) {
    throw std::invalid_argument("pool and center set disagree on class count");
  }
  ctx.calibration.Validate();
  ctx.params.Validate();
}

}  // namespace

void CalibrationConfig::Validate() const {
  if (!(tau > 0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be finite and > 0");
  }
}

const char* UtilityModeName(UtilityMode mode) {
  switch (mode) {
    case UtilityMode::kCalibratedFiltered:
      return "h_g";
    case UtilityMode::kFilterOnly:
      return "g";
    case UtilityMode::kRawFiltered:
      return "hraw_g";
    case UtilityMode::kCalibratedUnfiltered:
      return "h";
  }
  return "unknown";
}

EmptyClassPoolError::EmptyClassPoolError(int class_id)
    : std::runtime_error("candidate pool has no points for class " +
                         std::to_string(class_id)),
      class_id_(class_id) {}

bool ContrastiveFilter(const LabeledPoint& candidate,
                       const ClassCenterSet& centers) {
  CheckCandidate(candidate, centers);
  const double own = L2Distance(candidate.features, centers[candidate.class_id]);
  for (int c = 0; c < centers.class_count(); ++c) {
    if (c == candidate.class_id) continue;
    if (!(own < L2Distance(candidate.features, centers[c]))) return false;
  }
  return true;
}

double RawSimilarity(const LabeledPoint& candidate,
                     const ClassCenterSet& centers) {
  if (!ContrastiveFilter(candidate, centers)) return 0.0;
  return std::exp(-L2Distance(candidate.features, centers[candidate.class_id]));
}

namespace {

UtilityScores Calibrate(std::span<const LabeledPoint> pool,
                        const ClassCenterSet& centers,
                        const CalibrationConfig& cfg, bool apply_filter) {
  cfg.Validate();
  std::vector<double> distance(pool.size());
  std::vector<bool> passing(pool.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const LabeledPoint& p = pool[i];
    if (p.class_id != pool.front().class_id) {
      throw std::invalid_argument("calibration pool mixes class labels");
    }
    passing[i] = apply_filter ? ContrastiveFilter(p, centers) : true;
    CheckCandidate(p, centers);
    distance[i] = L2Distance(p.features, centers[p.class_id]);
    if (passing[i]) {
      lo = std::min(lo, distance[i]);
      hi = std::max(hi, distance[i]);
    }
  }
  std::vector<double> scores(pool.size(), 0.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!passing[i]) continue;
    if (hi == lo) {
      scores[i] = 1.0;
    } else {
      const double normalized = (distance[i] - lo) / (hi - lo);
      scores[i] = std::exp(-normalized * cfg.tau);
    }
  }
  return UtilityScores(std::move(scores));
}

}  // namespace

UtilityScores CalibratedUtilities(std::span<const LabeledPoint> pool,
                                  const ClassCenterSet& centers,
                                  const CalibrationConfig& cfg) {
  return Calibrate(pool, centers, cfg, /*apply_filter=*/true);
}

UtilityScores VariantUtilities(UtilityMode mode,
                               std::span<const LabeledPoint> pool,
                               const ClassCenterSet& centers,
                               const CalibrationConfig& cfg) {
  switch (mode) {
    case UtilityMode::kCalibratedFiltered:
      return Calibrate(pool, centers, cfg, /*apply_filter=*/true);
    case UtilityMode::kCalibratedUnfiltered:
      return Calibrate(pool, centers, cfg, /*apply_filter=*/false);
    case UtilityMode::kFilterOnly: {
      std::vector<double> scores;
      scores.reserve(pool.size());
      for (const LabeledPoint& p : pool) {
        scores.push_back(ContrastiveFilter(p, centers) ? 1.0 : 0.0);
      }
      return UtilityScores(std::move(scores));
    }
    case UtilityMode::kRawFiltered: {
      std::vector<double> scores;
      scores.reserve(pool.size());
      for (const LabeledPoint& p : pool) {
        scores.push_back(RawSimilarity(p, centers));
      }
      return UtilityScores(std::move(scores));
    }
  }
  throw std::invalid_argument("unknown utility mode");
}

std::vector<std::vector<int>> PeVotes(const Dataset& private_data,
                                      const Dataset& pool) {
  if (private_data.class_count() != pool.class_count()) {
    throw std::invalid_argument("private data and pool disagree on classes");
  }
  if (private_data.dimension() != pool.dimension()) {
    throw DimensionMismatchError(private_data.dimension(), pool.dimension());
  }
  std::vector<std::vector<int>> votes(pool.class_count());
  for (int c = 0; c < pool.class_count(); ++c) {
    const std::vector<LabeledPoint> candidates = pool.OfClass(c);
    if (candidates.empty()) throw EmptyClassPoolError(c);
    votes[c].assign(candidates.size(), 0);
    for (const LabeledPoint& q : private_data.points()) {
      if (q.class_id != c) continue;
      std::size_t best = 0;
      double best_distance = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double d = L2Distance(q.features, candidates[i].features);
        if (d < best_distance) {
          best_distance = d;
          best = i;
        }
      }
      ++votes[c][best];
    }
  }
  return votes;
}

UtilityScores PeEmUtilities(std::span<const int> votes, int private_count) {
  if (private_count < 1) {
    throw std::invalid_argument("PE-EM needs at least one private point");
  }
  std::vector<double> scores;
  scores.reserve(votes.size());
  for (int v : votes) {
    scores.push_back(static_cast<double>(v) / private_count);
  }
  return UtilityScores(std::move(scores));
}

std::size_t ArgmaxLowestIndex(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of empty list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

SelectionOutcome SelectPrototypes(const Dataset& pool,
                                  const SelectionContext& ctx,
                                  UtilityMode mode) {
  CheckContext(ctx, pool);
  const Rational epsilon = ctx.params.PerQueryEpsilon();
  SelectionOutcome out;
  for (int c = 0; c < pool.class_count(); ++c) {
    const ClassPool cp = PoolOfClass(pool, c);
    const UtilityScores u =
        VariantUtilities(mode, cp.candidates, *ctx.centers, ctx.calibration);
    ctx.ledger->Charge(SelectLabel("em", ctx.iteration, c), epsilon);
    Rng rng(ctx.seed, "select", ctx.iteration, c);
    EmDraw draw = EmSample(u, epsilon.ToDouble(), /*sensitivity=*/1.0, rng);
    out.per_class.push_back({c, draw.index, cp.indices[draw.index],
                             {u.values().begin(), u.values().end()},
                             std::move(draw.probabilities)});
    out.prototypes.push_back(cp.candidates[draw.index]);
  }
  return out;
}

SelectionOutcome SelectPeEm(const Dataset& pool, const Dataset& private_data,
                            const SelectionContext& ctx) {
  CheckContext(ctx, pool);
  const Rational epsilon = ctx.params.PerQueryEpsilon();
  const std::vector<std::vector<int>> votes = PeVotes(private_data, pool);
  const std::vector<std::size_t> private_counts = private_data.ClassCounts();
  SelectionOutcome out;
  for (int c = 0; c < pool.class_count(); ++c) {
    const ClassPool cp = PoolOfClass(pool, c);
    const int k = static_cast<int>(private_counts[c]);
    const UtilityScores u = PeEmUtilities(votes[c], k);
    ctx.ledger->Charge(SelectLabel("pe_em", ctx.iteration, c), epsilon);
    Rng rng(ctx.seed, "select", ctx.iteration, c);
    EmDraw draw = EmSample(u, epsilon.ToDouble(), PeEmSensitivity(k), rng);
    out.per_class.push_back({c, draw.index, cp.indices[draw.index],
                             {u.values().begin(), u.values().end()},
                             std::move(draw.probabilities)});
    out.prototypes.push_back(cp.candidates[draw.index]);
  }
  return out;
}

SelectionOutcome SelectGaussianUtilities(const Dataset& pool,
                                         std::size_t private_per_class,
                                         const SelectionContext& ctx) {
  CheckContext(ctx, pool);
  const Rational epsilon = ctx.params.PerQueryEpsilon();
  SelectionOutcome out;
  for (int c = 0; c < pool.class_count(); ++c) {
    const ClassPool cp = PoolOfClass(pool, c);
    const UtilityScores u =
        CalibratedUtilities(cp.candidates, *ctx.centers, ctx.calibration);
    const double sensitivity = static_cast<double>(private_per_class) *
                               static_cast<double>(cp.candidates.size());
    const double sigma =
        GmSigma(sensitivity, epsilon.ToDouble(), ctx.params.delta);
    ctx.ledger->Charge(SelectLabel("gm", ctx.iteration, c), epsilon);
    Rng rng(ctx.seed, "select", ctx.iteration, c);
    const std::vector<double> noisy = GmPerturb(u.values(), sigma, rng);
    const std::size_t chosen = ArgmaxLowestIndex(noisy);
    out.per_class.push_back({c, chosen, cp.indices[chosen], noisy, {}});
    out.prototypes.push_back(cp.candidates[chosen]);
  }
  return out;
}

}  // namespace pcevolve
