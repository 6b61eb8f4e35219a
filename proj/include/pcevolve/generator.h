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

#ifndef PCEVOLVE_GENERATOR_H_
#define PCEVOLVE_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcevolve/core.h"
#include "pcevolve/mechanisms.h"
#include "pcevolve/rng.h"

namespace pcevolve {

// Plain class-label prompt, e.g. domain "leather texture", labels
// {"cut defect", "no defect"}.
struct PromptSpec {
  std::string domain_name;
  std::vector<std::string> class_labels;

  void Validate() const;
  int class_count() const { return static_cast<int>(class_labels.size()); }
};

// i2i strength annealed linearly from `initial` down to `floor`.
struct StrengthSchedule {
  double initial = 0.8;
  double decrement_per_iteration = 0.02;
  double floor = 0.6;

  void Validate() const;
  // Strength for the refine call after selection round `step` (0-based).
  double At(int step) const;
};

// Raised when a generation backend cannot produce a usable pool.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Candidate-pool source. Implementations must return exactly `per_class`
// candidates for every class, and must be deterministic in `seed`.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  // Text-conditioned initial pool.
  virtual Dataset Init(const PromptSpec& prompt, int per_class,
                       std::uint64_t seed) = 0;
  // Image-conditioned variations of one prototype per class (ordered by
  // class id).
  virtual Dataset Refine(std::span<const LabeledPoint> prototypes,
                         int per_class, double strength,
                         std::uint64_t seed) = 0;
};

// Feature-space stand-in for a diffusion API. The private data of each class
// is N(private_means[c], private_spread[c]^2 I); the generator's own prior is
// N(generator_means[c], generator_spread^2 I), displaced from the private
// distribution to model the domain gap.
struct MockWorld {
  std::vector<FeatureVector> private_means;
  std::vector<double> private_spread;
  std::vector<FeatureVector> generator_means;
  double generator_spread = 1.5;
  // Isotropic std added to every refined candidate.
  double jitter = 0.075;

  // Private means on the unit circle in the first two coordinates; the
  // generator prior of each class is pushed `gap` along the tangent, which
  // tilts the class boundary a synthetic-only classifier would learn.
  static MockWorld Default(int class_count = 2, std::size_t dimension = 4,
                           double gap = 3.0);
  // Generator prior equals the private distribution (no domain gap).
  static MockWorld Oracle(int class_count = 2, std::size_t dimension = 4);

  void Validate() const;
  int class_count() const { return static_cast<int>(private_means.size()); }
  std::size_t dimension() const { return private_means.front().dimension(); }

  // `per_class` draws from each class's private distribution.
  Dataset SamplePrivate(int per_class, Rng& rng) const;
  FeatureVector SampleGenerator(int class_id, Rng& rng) const;
};

class MockBackend : public GeneratorBackend {
 public:
  explicit MockBackend(MockWorld world);

  Dataset Init(const PromptSpec& prompt, int per_class,
               std::uint64_t seed) override;
  // candidate = (1 - s) * prototype + s * prior_sample + jitter * z.
  Dataset Refine(std::span<const LabeledPoint> prototypes, int per_class,
                 double strength, std::uint64_t seed) override;

  const MockWorld& world() const { return world_; }

 private:
  MockWorld world_;
};

// Initial pool through the backend, with cardinality checked.
Dataset InitPool(const PromptSpec& prompt, int per_class,
                 GeneratorBackend& backend, std::uint64_t seed);

// Refined pool through the backend, with cardinality checked.
Dataset RefinePool(std::span<const LabeledPoint> prototypes, int per_class,
                   double strength, GeneratorBackend& backend,
                   std::uint64_t seed);

// Scales `v` onto the unit ball when its norm exceeds 1.
FeatureVector ClipToUnitBall(const FeatureVector& v);

// Replace-one sensitivity of a unit-ball-clipped record.
inline constexpr double kDpImageSensitivity = 2.0;

// Every private record clipped to the unit ball and noised with
// sigma = GmSigma(2, epsilon_total, delta). Spends the whole budget; the
// caller is responsible for charging the ledger.
Dataset DpImageBaseline(const Dataset& private_data,
                        const PrivacyParams& params, Rng& rng);

// First point of each class, ordered by class id.
std::vector<LabeledPoint> FirstOfEachClass(const Dataset& data);

}  // namespace pcevolve

#endif  // PCEVOLVE_GENERATOR_H_
