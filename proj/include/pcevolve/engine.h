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

#ifndef PCEVOLVE_ENGINE_H_
#define PCEVOLVE_ENGINE_H_

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcevolve/core.h"
#include "pcevolve/generator.h"
#include "pcevolve/mechanisms.h"
#include "pcevolve/selector.h"

namespace pcevolve {

enum class Algorithm {
  kPcEvolve,     // EM over u = h o g
  kPe,           // GM-noised nearest-neighbour votes, noisy argmax
  kPeEm,         // EM over normalized votes
  kPcEvolveGm,   // GM over u = h o g, sensitivity K*N
  kDpImg,        // GM on clipped private records, single refine
  kAblationG,    // EM over u = g
  kAblationH,    // EM over u = h
  kAblationRawG  // EM over u = h' o g
};

const char* AlgorithmName(Algorithm algorithm);
// Accepts the names produced by AlgorithmName.
Algorithm ParseAlgorithm(const std::string& name);

struct RunConfig {
  Algorithm algorithm = Algorithm::kPcEvolve;
  // iterations = T, class_count = C.
  PrivacyParams params;
  CalibrationConfig calibration;
  // K: private records per class (informational for loaded data).
  int private_per_class = 10;
  // N: synthetic candidates per class.
  int synthetic_per_class = 100;
  std::uint64_t seed = 0;
  StrengthSchedule strength;
  PromptSpec prompt;
  // Fit a probe on the pool after every refine (needs a test set).
  bool probe_each_iteration = true;

  void Validate() const;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  double strength = 0.0;
  std::vector<ClassSelection> selections;
  std::vector<LabeledPoint> prototypes;
  double mean_prototype_distance = 0.0;
  Rational ledger_spent;
  std::optional<double> probe_accuracy;
};

struct RunTrace {
  Algorithm algorithm = Algorithm::kPcEvolve;
  // Mean candidate-to-own-center distance of the initial pool: the expected
  // prototype distance before any private selection.
  std::optional<double> initial_mean_distance;
  std::optional<double> initial_probe_accuracy;
  std::vector<IterationRecord> iterations;
  Rational ledger_total;
  Rational ledger_spent;
  std::vector<BudgetLedger::Entry> ledger_log;
  bool aborted = false;
  std::string abort_reason;

  // Value after the last completed iteration.
  double FinalMeanPrototypeDistance() const;
};

struct RunInputs {
  const Dataset* private_data = nullptr;
  // Held-out evaluation data; probes are skipped when null.
  const Dataset* test_data = nullptr;
  GeneratorBackend* backend = nullptr;
};

struct RunResult {
  RunTrace trace;
  Dataset final_pool;
};

// A run stopped on a budget, pool or backend failure. Carries the trace up to
// the failure with `aborted` set.
class RunAbortedError : public std::runtime_error {
 public:
  RunAbortedError(RunTrace partial, const std::string& reason);
  const RunTrace& partial_trace() const { return partial_; }

 private:
  RunTrace partial_;
};

RunResult RunPcEvolve(const RunConfig& cfg, const RunInputs& inputs);
RunResult RunPe(const RunConfig& cfg, const RunInputs& inputs);
// PE-EM, PCEvolve-GM, DPImg and the utility ablations.
RunResult RunVariant(const RunConfig& cfg, const RunInputs& inputs);
// Dispatches on cfg.algorithm.
RunResult Run(const RunConfig& cfg, const RunInputs& inputs);

// PE's per-iteration noise next to the K votes a class can contribute.
struct NoiseDemoReport {
  int max_votes = 0;
  double noise_sigma = 0.0;
  bool exceeds = false;
  // One noised vote histogram over N candidates where all K votes landed on
  // candidate 0.
  std::vector<int> clean_histogram;
  std::vector<double> noisy_histogram;
};

NoiseDemoReport NoiseDemo(int private_per_class, int synthetic_per_class,
                          const PrivacyParams& params, std::uint64_t seed = 0);

// L2 sensitivity of PE's vote histogram under replace-one.
inline constexpr double kPeHistogramSensitivity = std::numbers::sqrt2;

struct FinalMetrics {
  std::optional<double> probe_accuracy;
  std::optional<double> mixed_accuracy;
  std::vector<double> mean_center_distance;
  double filter_pass_rate = 0.0;
};

// Post-processing only: never touches a ledger.
FinalMetrics EvaluateFinal(const Dataset& synthetic,
                           const Dataset& private_data,
                           const Dataset* test_data);

}  // namespace pcevolve

#endif  // PCEVOLVE_ENGINE_H_
