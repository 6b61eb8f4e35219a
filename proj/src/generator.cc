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

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pcevolve {
namespace {

void CheckCardinality(const Dataset& pool, int class_count, int per_class) {
  if (pool.class_count() != class_count) {
    throw BackendError("backend returned " +
                       std::to_string(pool.class_count()) +
                       " classes, expected " + std::to_string(class_count));
  }
  const std::vector<std::size_t> counts = pool.ClassCounts();
  for (int c = 0; c < class_count; ++c) {
    if (counts[c] != static_cast<std::size_t>(per_class)) {
      throw BackendError("backend returned " + std::to_string(counts[c]) +
                         " candidates for class " + std::to_string(c) +
                         ", expected " + std::to_string(per_class));
    }
  }
}

}  // namespace

void PromptSpec::Validate() const {
  if (domain_name.empty()) throw std::invalid_argument("empty domain name");
  if (class_labels.size() < 2) {
    throw std::invalid_argument("prompt needs at least 2 class labels");
  }
}

void StrengthSchedule::Validate() const {
  if (!(floor <= initial)) {
    throw std::invalid_argument("strength floor exceeds initial strength");
  }
  if (!(floor >= 0 && initial <= 1) || decrement_per_iteration < 0) {
    throw std::invalid_argument("strength schedule outside [0, 1]");
  }
}

double StrengthSchedule::At(int step) const {
  // Rounded to 1e-12 so 0.8 - 0.02 * 10 lands on 0.6 exactly.
  const double raw = initial - decrement_per_iteration * step;
  const double rounded = std::round(raw * 1e12) / 1e12;
  return std::max(floor, rounded);
}

MockWorld MockWorld::Default(int class_count, std::size_t dimension,
                             double gap) {
  if (dimension < 2) throw std::invalid_argument("mock world needs d >= 2");
  MockWorld w;
  for (int c = 0; c < class_count; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / class_count;
    std::vector<double> mean(dimension, 0.0);
    mean[0] = std::cos(angle);
    mean[1] = std::sin(angle);
    std::vector<double> shifted = mean;
    shifted[0] += -gap * std::sin(angle);
    shifted[1] += gap * std::cos(angle);
    w.private_means.emplace_back(std::move(mean));
    w.generator_means.emplace_back(std::move(shifted));
    w.private_spread.push_back(0.7);
  }
  w.generator_spread = 1.5;
  w.jitter = 0.05 * w.generator_spread;
  return w;
}

MockWorld MockWorld::Oracle(int class_count, std::size_t dimension) {
  MockWorld w = Default(class_count, dimension, /*gap=*/0.0);
  w.generator_spread = w.private_spread.front();
  w.jitter = 0.05 * w.generator_spread;
  return w;
}

void MockWorld::Validate() const {
  if (private_means.size() < 2) {
    throw std::invalid_argument("mock world needs at least 2 classes");
  }
  if (generator_means.size() != private_means.size() ||
      private_spread.size() != private_means.size()) {
    throw std::invalid_argument("mock world per-class arrays differ in size");
  }
  for (std::size_t c = 0; c < private_means.size(); ++c) {
    if (private_means[c].dimension() != dimension() ||
        generator_means[c].dimension() != dimension()) {
      throw DimensionMismatchError(dimension(),
                                   generator_means[c].dimension());
    }
    if (!(private_spread[c] > 0)) {
      throw std::invalid_argument("private spread must be > 0");
    }
  }
  if (!(generator_spread > 0)) {
    throw std::invalid_argument("generator spread must be > 0");
  }
  if (!(jitter >= 0)) throw std::invalid_argument("jitter must be >= 0");
}

Dataset MockWorld::SamplePrivate(int per_class, Rng& rng) const {
  Dataset out(class_count(), dimension());
  for (int c = 0; c < class_count(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> v(dimension());
      for (std::size_t j = 0; j < v.size(); ++j) {
        v[j] = rng.Normal(private_means[c][j], private_spread[c]);
      }
      out.Add(FeatureVector(std::move(v)), c);
    }
  }
  return out;
}

FeatureVector MockWorld::SampleGenerator(int class_id, Rng& rng) const {
  std::vector<double> v(dimension());
  for (std::size_t j = 0; j < v.size(); ++j) {
    v[j] = rng.Normal(generator_means[class_id][j], generator_spread);
  }
  return FeatureVector(std::move(v));
}

MockBackend::MockBackend(MockWorld world) : world_(std::move(world)) {
  world_.Validate();
}

Dataset MockBackend::Init(const PromptSpec& prompt, int per_class,
                          std::uint64_t seed) {
  if (prompt.class_count() != world_.class_count()) {
    throw BackendError("prompt has " + std::to_string(prompt.class_count()) +
                       " labels but the mock world has " +
                       std::to_string(world_.class_count()) + " classes");
  }
  Dataset out(world_.class_count(), world_.dimension());
  for (int c = 0; c < world_.class_count(); ++c) {
    Rng rng(seed, "mock/init", 0, c);
    for (int i = 0; i < per_class; ++i) {
      out.Add(world_.SampleGenerator(c, rng), c);
    }
  }
  return out;
}

Dataset MockBackend::Refine(std::span<const LabeledPoint> prototypes,
                            int per_class, double strength,
                            std::uint64_t seed) {
  Dataset out(world_.class_count(), world_.dimension());
  for (const LabeledPoint& proto : prototypes) {
    if (proto.features.dimension() != world_.dimension()) {
      throw DimensionMismatchError(world_.dimension(),
                                   proto.features.dimension());
    }
    Rng rng(seed, "mock/refine", 0, proto.class_id);
    for (int i = 0; i < per_class; ++i) {
      const FeatureVector prior = world_.SampleGenerator(proto.class_id, rng);
      std::vector<double> v(world_.dimension());
      for (std::size_t j = 0; j < v.size(); ++j) {
        v[j] = (1.0 - strength) * proto.features[j] + strength * prior[j];
        if (world_.jitter > 0) v[j] += world_.jitter * rng.Normal();
      }
      out.Add(FeatureVector(std::move(v)), proto.class_id);
    }
  }
  return out;
}

Dataset InitPool(const PromptSpec& prompt, int per_class,
                 GeneratorBackend& backend, std::uint64_t seed) {
  prompt.Validate();
  if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
  Dataset pool = backend.Init(prompt, per_class, seed);
  CheckCardinality(pool, prompt.class_count(), per_class);
  return pool;
}

Dataset RefinePool(std::span<const LabeledPoint> prototypes, int per_class,
                   double strength, GeneratorBackend& backend,
                   std::uint64_t seed) {
  if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
  if (!(strength >= 0 && strength <= 1)) {
    throw std::invalid_argument("strength must lie in [0, 1]");
  }
  const int class_count = static_cast<int>(prototypes.size());
  for (int c = 0; c < class_count; ++c) {
    if (prototypes[c].class_id != c) {
      throw std::invalid_argument(
          "refine needs exactly one prototype per class, ordered by class id");
    }
  }
  Dataset pool = backend.Refine(prototypes, per_class, strength, seed);
  CheckCardinality(pool, class_count, per_class);
  return pool;
}

FeatureVector ClipToUnitBall(const FeatureVector& v) {
  double norm2 = 0.0;
  for (double x : v.values()) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (norm <= 1.0) return v;
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= norm;
  return FeatureVector(std::move(out));
}

Dataset DpImageBaseline(const Dataset& private_data,
                        const PrivacyParams& params, Rng& rng) {
  params.Validate();
  const double sigma =
      GmSigma(kDpImageSensitivity, params.epsilon_total, params.delta);
  Dataset out(private_data.class_count(), private_data.dimension());
  for (const LabeledPoint& p : private_data.points()) {
    const FeatureVector clipped = ClipToUnitBall(p.features);
    out.Add(FeatureVector(GmPerturb(clipped.values(), sigma, rng)),
            p.class_id);
  }
  return out;
}

std::vector<LabeledPoint> FirstOfEachClass(const Dataset& data) {
  std::vector<LabeledPoint> out;
  for (int c = 0; c < data.class_count(); ++c) {
    const std::vector<std::size_t> idx = data.IndicesOfClass(c);
    if (idx.empty()) {
      throw std::invalid_argument("no point for class " + std::to_string(c));
    }
    out.push_back(data[idx.front()]);
  }
  return out;
}

}  // namespace pcevolve
