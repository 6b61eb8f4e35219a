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

#ifndef PCEVOLVE_SELECTOR_H_
#define PCEVOLVE_SELECTOR_H_

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

struct CalibrationConfig {
  // Similarity calibrating factor; passing candidates score in
  // [exp(-tau), 1].
  double tau = 10.0;

  void Validate() const;
};

// How per-candidate utilities are built for the exponential mechanism.
enum class UtilityMode {
  kCalibratedFiltered,    // u = h o g (PCEvolve)
  kFilterOnly,            // u = g
  kRawFiltered,           // u = h' o g
  kCalibratedUnfiltered,  // u = h, every candidate treated as passing
};

const char* UtilityModeName(UtilityMode mode);

class EmptyClassPoolError : public std::runtime_error {
 public:
  explicit EmptyClassPoolError(int class_id);
  int class_id() const { return class_id_; }

 private:
  int class_id_;
};

// 1 iff the candidate is strictly closer to its own class center than to
// every other class center. Ties fail.
bool ContrastiveFilter(const LabeledPoint& candidate,
                       const ClassCenterSet& centers);

// exp(-distance to own center) for passing candidates, else 0.
double RawSimilarity(const LabeledPoint& candidate,
                     const ClassCenterSet& centers);

// Calibrated similarity for one class's candidates. Passing candidates score
// exp(-tau * (l - l_min) / (l_max - l_min)) where the extremes range over
// passing candidates only; failing candidates score 0. When l_max == l_min
// every passing candidate scores 1.
UtilityScores CalibratedUtilities(std::span<const LabeledPoint> pool,
                                  const ClassCenterSet& centers,
                                  const CalibrationConfig& cfg);

UtilityScores VariantUtilities(UtilityMode mode,
                               std::span<const LabeledPoint> pool,
                               const ClassCenterSet& centers,
                               const CalibrationConfig& cfg);

// Votes of every private point for its nearest same-class candidate (ties to
// the lowest candidate index). result[c][i] counts votes for the i-th class-c
// candidate in pool order.
std::vector<std::vector<int>> PeVotes(const Dataset& private_data,
                                      const Dataset& pool);

// votes / private_count, used as exponential-mechanism utility.
UtilityScores PeEmUtilities(std::span<const int> votes, int private_count);
// A replace-one change moves at most one vote per candidate.
inline double PeEmSensitivity(int private_count) {
  return 1.0 / static_cast<double>(private_count);
}

// Index of the largest value, lowest index on ties.
std::size_t ArgmaxLowestIndex(std::span<const double> values);

struct ClassSelection {
  int class_id = 0;
  // Position within this class's candidates, in pool order.
  std::size_t chosen_index = 0;
  // Position within the full pool dataset.
  std::size_t pool_index = 0;
  std::vector<double> utilities;
  std::vector<double> probabilities;
};

struct SelectionOutcome {
  std::vector<ClassSelection> per_class;
  // One prototype per class, ordered by class id.
  std::vector<LabeledPoint> prototypes;
};

// What a single selection round needs besides the pool. `iteration` keys the
// ledger labels and the per-class random streams.
struct SelectionContext {
  const ClassCenterSet* centers = nullptr;
  CalibrationConfig calibration;
  PrivacyParams params;
  BudgetLedger* ledger = nullptr;
  std::uint64_t seed = 0;
  int iteration = 0;
};

// Per class: builds utilities with `mode`, charges epsilon*/(T*C), and draws
// one candidate with the exponential mechanism at sensitivity 1.
SelectionOutcome SelectPrototypes(const Dataset& pool,
                                  const SelectionContext& ctx,
                                  UtilityMode mode =
                                      UtilityMode::kCalibratedFiltered);

// PE-EM: exponential mechanism over normalized PE votes at sensitivity 1/K_c.
SelectionOutcome SelectPeEm(const Dataset& pool, const Dataset& private_data,
                            const SelectionContext& ctx);

// PCEvolve-GM: Gaussian noise on the h o g utilities with sensitivity K*N,
// then the per-class noisy argmax.
SelectionOutcome SelectGaussianUtilities(const Dataset& pool,
                                         std::size_t private_per_class,
                                         const SelectionContext& ctx);

}  // namespace pcevolve

#endif  // PCEVOLVE_SELECTOR_H_
