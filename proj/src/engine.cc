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

#include "pcevolve/engine.h"

#include <spdlog/spdlog.h>

#include <cmath>
#include <functional>

#include "pcevolve/eval.h"

namespace pcevolve {
namespace {

double MeanDistanceToCenters(const Dataset& pool,
                             const ClassCenterSet& centers) {
  const QualityMetrics q = ComputeQualityMetrics(pool, centers);
  double sum = 0.0;
  for (double d : q.mean_center_distance) sum += d;
  return sum / static_cast<double>(q.mean_center_distance.size());
}

double MeanPrototypeDistance(const std::vector<LabeledPoint>& prototypes,
                             const ClassCenterSet& centers) {
  double sum = 0.0;
  for (const LabeledPoint& p : prototypes) {
    sum += L2Distance(p.features, centers[p.class_id]);
  }
  return sum / static_cast<double>(prototypes.size());
}

std::optional<double> Probe(const Dataset& pool, const Dataset* test) {
  if (test == nullptr) return std::nullopt;
  return ProbeAccuracy(FitProbe(pool), *test);
}

void CheckInputs(const RunConfig& cfg, const RunInputs& inputs) {
  cfg.Validate();
  if (inputs.private_data == nullptr || inputs.backend == nullptr) {
    throw std::invalid_argument("run needs private data and a backend");
  }
  if (inputs.private_data->class_count() != cfg.params.class_count) {
    throw std::invalid_argument("private data class count differs from config");
  }
  if (inputs.private_data->empty()) {
    throw std::invalid_argument("private dataset is empty");
  }
}

void FillLedger(RunTrace& trace, const BudgetLedger& ledger) {
  trace.ledger_total = ledger.total();
  trace.ledger_spent = ledger.spent();
  trace.ledger_log = ledger.log();
}

// Selection strategy for one round of the evolution loop.
using SelectFn = std::function<SelectionOutcome(
    const Dataset& pool, int iteration, BudgetLedger& ledger)>;

RunResult EvolutionLoop(const RunConfig& cfg, const RunInputs& inputs,
                        const ClassCenterSet& centers, BudgetLedger& ledger,
                        const SelectFn& select) {
  RunTrace trace;
  trace.algorithm = cfg.algorithm;
  const bool probe = cfg.probe_each_iteration && inputs.test_data != nullptr;
  int iteration = 0;
  try {
    Dataset pool = InitPool(cfg.prompt, cfg.synthetic_per_class,
                            *inputs.backend, DeriveSeed(cfg.seed, "init"));
    trace.initial_mean_distance = MeanDistanceToCenters(pool, centers);
    if (probe) trace.initial_probe_accuracy = Probe(pool, inputs.test_data);

    for (iteration = 1; iteration <= cfg.params.iterations; ++iteration) {
      IterationRecord rec;
      rec.iteration = iteration;
      SelectionOutcome sel = select(pool, iteration, ledger);
      rec.strength = cfg.strength.At(iteration - 1);
      pool = RefinePool(sel.prototypes, cfg.synthetic_per_class, rec.strength,
                        *inputs.backend,
                        DeriveSeed(cfg.seed, "refine", iteration));
      rec.mean_prototype_distance =
          MeanPrototypeDistance(sel.prototypes, centers);
      rec.prototypes = std::move(sel.prototypes);
      rec.selections = std::move(sel.per_class);
      rec.ledger_spent = ledger.spent();
      if (probe) rec.probe_accuracy = Probe(pool, inputs.test_data);
      spdlog::debug("{} t={} strength={} proto_dist={:.4f} spent={}",
                    AlgorithmName(cfg.algorithm), iteration, rec.strength,
                    rec.mean_prototype_distance,
                    rec.ledger_spent.ToString());
      trace.iterations.push_back(std::move(rec));
    }
    FillLedger(trace, ledger);
    return {std::move(trace), std::move(pool)};
  } catch (const BudgetExceededError& e) {
    FillLedger(trace, ledger);
    throw RunAbortedError(std::move(trace), "iteration " +
                                                std::to_string(iteration) +
                                                ": " + e.what());
  } catch (const EmptyClassPoolError& e) {
    FillLedger(trace, ledger);
    throw RunAbortedError(std::move(trace),
                          "iteration " + std::to_string(iteration) +
                              ", class " + std::to_string(e.class_id()) +
                              ": " + e.what());
  } catch (const BackendError& e) {
    FillLedger(trace, ledger);
    throw RunAbortedError(std::move(trace), "iteration " +
                                                std::to_string(iteration) +
                                                ": " + e.what());
  }
}

SelectionContext MakeContext(const RunConfig& cfg,
                             const ClassCenterSet& centers,
                             BudgetLedger& ledger, int iteration) {
  SelectionContext ctx;
  ctx.centers = &centers;
  ctx.calibration = cfg.calibration;
  ctx.params = cfg.params;
  ctx.ledger = &ledger;
  ctx.seed = cfg.seed;
  ctx.iteration = iteration;
  return ctx;
}

RunResult RunEmVariant(const RunConfig& cfg, const RunInputs& inputs,
                       UtilityMode mode) {
  CheckInputs(cfg, inputs);
  const ClassCenterSet centers = ClassCenters(*inputs.private_data);
  BudgetLedger ledger(cfg.params.TotalEpsilon());
  return EvolutionLoop(
      cfg, inputs, centers, ledger,
      [&](const Dataset& pool, int t, BudgetLedger& l) {
        return SelectPrototypes(pool, MakeContext(cfg, centers, l, t), mode);
      });
}

RunResult RunDpImg(const RunConfig& cfg, const RunInputs& inputs) {
  CheckInputs(cfg, inputs);
  const ClassCenterSet centers = ClassCenters(*inputs.private_data);
  BudgetLedger ledger(cfg.params.TotalEpsilon());
  RunTrace trace;
  trace.algorithm = cfg.algorithm;
  try {
    ledger.Charge("dpimg", cfg.params.TotalEpsilon());
    Rng rng(cfg.seed, "dpimg");
    const Dataset noised =
        DpImageBaseline(*inputs.private_data, cfg.params, rng);
    IterationRecord rec;
    rec.iteration = 1;
    rec.prototypes = FirstOfEachClass(noised);
    rec.strength = cfg.strength.At(0);
    Dataset pool =
        RefinePool(rec.prototypes, cfg.synthetic_per_class, rec.strength,
                   *inputs.backend, DeriveSeed(cfg.seed, "refine", 1));
    rec.mean_prototype_distance =
        MeanPrototypeDistance(rec.prototypes, centers);
    rec.ledger_spent = ledger.spent();
    if (cfg.probe_each_iteration) {
      rec.probe_accuracy = Probe(pool, inputs.test_data);
    }
    trace.iterations.push_back(std::move(rec));
    FillLedger(trace, ledger);
    return {std::move(trace), std::move(pool)};
  } catch (const BudgetExceededError& e) {
    FillLedger(trace, ledger);
    throw RunAbortedError(std::move(trace), e.what());
  } catch (const BackendError& e) {
    FillLedger(trace, ledger);
    throw RunAbortedError(std::move(trace), e.what());
  }
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kPcEvolve:
      return "pcevolve";
    case Algorithm::kPe:
      return "pe";
    case Algorithm::kPeEm:
      return "pe_em";
    case Algorithm::kPcEvolveGm:
      return "pcevolve_gm";
    case Algorithm::kDpImg:
      return "dpimg";
    case Algorithm::kAblationG:
      return "ablation_g";
    case Algorithm::kAblationH:
      return "ablation_h";
    case Algorithm::kAblationRawG:
      return "ablation_hraw_g";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a :
       {Algorithm::kPcEvolve, Algorithm::kPe, Algorithm::kPeEm,
        Algorithm::kPcEvolveGm, Algorithm::kDpImg, Algorithm::kAblationG,
        Algorithm::kAblationH, Algorithm::kAblationRawG}) {
    if (name == AlgorithmName(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void RunConfig::Validate() const {
  params.Validate();
  calibration.Validate();
  strength.Validate();
  prompt.Validate();
  if (prompt.class_count() != params.class_count) {
    throw std::invalid_argument("prompt labels differ from class_count");
  }
  if (private_per_class < 1) {
    throw std::invalid_argument("private_per_class must be >= 1");
  }
  if (synthetic_per_class < 1) {
    throw std::invalid_argument("synthetic_per_class must be >= 1");
  }
}

double RunTrace::FinalMeanPrototypeDistance() const {
  if (iterations.empty()) throw std::logic_error("trace has no iterations");
  return iterations.back().mean_prototype_distance;
}

RunAbortedError::RunAbortedError(RunTrace partial, const std::string& reason)
    : std::runtime_error("run aborted: " + reason),
      partial_(std::move(partial)) {
  partial_.aborted = true;
  partial_.abort_reason = reason;
}

RunResult RunPcEvolve(const RunConfig& cfg, const RunInputs& inputs) {
  return RunEmVariant(cfg, inputs, UtilityMode::kCalibratedFiltered);
}

RunResult RunPe(const RunConfig& cfg, const RunInputs& inputs) {
  CheckInputs(cfg, inputs);
  const ClassCenterSet centers = ClassCenters(*inputs.private_data);
  BudgetLedger ledger(cfg.params.TotalEpsilon());
  const Rational per_iteration =
      cfg.params.TotalEpsilon() / Rational(cfg.params.iterations);
  const double sigma = GmSigma(kPeHistogramSensitivity,
                               per_iteration.ToDouble(), cfg.params.delta);
  const Dataset& private_data = *inputs.private_data;
  return EvolutionLoop(
      cfg, inputs, centers, ledger,
      [&](const Dataset& pool, int t, BudgetLedger& l) {
        const std::vector<std::vector<int>> votes = PeVotes(private_data, pool);
        // One histogram release covering every class.
        std::vector<double> histogram;
        for (const auto& class_votes : votes) {
          histogram.insert(histogram.end(), class_votes.begin(),
                           class_votes.end());
        }
        l.Charge("pe/t" + std::to_string(t), per_iteration);
        Rng rng(cfg.seed, "pe/noise", t);
        const std::vector<double> noisy = GmPerturb(histogram, sigma, rng);
        SelectionOutcome out;
        std::size_t offset = 0;
        for (int c = 0; c < pool.class_count(); ++c) {
          const std::vector<std::size_t> idx = pool.IndicesOfClass(c);
          const std::span<const double> slice(noisy.data() + offset,
                                              votes[c].size());
          const std::size_t chosen = ArgmaxLowestIndex(slice);
          out.per_class.push_back({c, chosen, idx[chosen],
                                   {slice.begin(), slice.end()}, {}});
          out.prototypes.push_back(pool[idx[chosen]]);
          offset += votes[c].size();
        }
        return out;
      });
}

RunResult RunVariant(const RunConfig& cfg, const RunInputs& inputs) {
  switch (cfg.algorithm) {
    case Algorithm::kAblationG:
      return RunEmVariant(cfg, inputs, UtilityMode::kFilterOnly);
    case Algorithm::kAblationH:
      return RunEmVariant(cfg, inputs, UtilityMode::kCalibratedUnfiltered);
    case Algorithm::kAblationRawG:
      return RunEmVariant(cfg, inputs, UtilityMode::kRawFiltered);
    case Algorithm::kDpImg:
      return RunDpImg(cfg, inputs);
    case Algorithm::kPeEm: {
      CheckInputs(cfg, inputs);
      const ClassCenterSet centers = ClassCenters(*inputs.private_data);
      BudgetLedger ledger(cfg.params.TotalEpsilon());
      return EvolutionLoop(
          cfg, inputs, centers, ledger,
          [&](const Dataset& pool, int t, BudgetLedger& l) {
            return SelectPeEm(pool, *inputs.private_data,
                              MakeContext(cfg, centers, l, t));
          });
    }
    case Algorithm::kPcEvolveGm: {
      CheckInputs(cfg, inputs);
      const ClassCenterSet centers = ClassCenters(*inputs.private_data);
      BudgetLedger ledger(cfg.params.TotalEpsilon());
      return EvolutionLoop(
          cfg, inputs, centers, ledger,
          [&](const Dataset& pool, int t, BudgetLedger& l) {
            return SelectGaussianUtilities(pool, cfg.private_per_class,
                                           MakeContext(cfg, centers, l, t));
          });
    }
    case Algorithm::kPcEvolve:
    case Algorithm::kPe:
      break;
  }
  throw std::invalid_argument(std::string("not a variant: ") +
                              AlgorithmName(cfg.algorithm));
}

RunResult Run(const RunConfig& cfg, const RunInputs& inputs) {
  switch (cfg.algorithm) {
    case Algorithm::kPcEvolve:
      return RunPcEvolve(cfg, inputs);
    case Algorithm::kPe:
      return RunPe(cfg, inputs);
    default:
      return RunVariant(cfg, inputs);
  }
}

NoiseDemoReport NoiseDemo(int private_per_class, int synthetic_per_class,
                          const PrivacyParams& params, std::uint64_t seed) {
  if (private_per_class < 1) {
    throw std::invalid_argument("noise demo needs K >= 1 private records");
  }
  if (synthetic_per_class < 1) {
    throw std::invalid_argument("noise demo needs N >= 1 candidates");
  }
  params.Validate();
  NoiseDemoReport r;
  r.max_votes = private_per_class;
  const Rational per_iteration =
      params.TotalEpsilon() / Rational(params.iterations);
  r.noise_sigma = GmSigma(kPeHistogramSensitivity, per_iteration.ToDouble(),
                          params.delta);
  r.exceeds = r.noise_sigma > static_cast<double>(r.max_votes);
  r.clean_histogram.assign(synthetic_per_class, 0);
  r.clean_histogram[0] = private_per_class;
  std::vector<double> clean(r.clean_histogram.begin(),
                            r.clean_histogram.end());
  Rng rng(seed, "noise_demo");
  r.noisy_histogram = GmPerturb(clean, r.noise_sigma, rng);
  return r;
}

FinalMetrics EvaluateFinal(const Dataset& synthetic,
                           const Dataset& private_data,
                           const Dataset* test_data) {
  FinalMetrics m;
  const QualityMetrics q =
      ComputeQualityMetrics(synthetic, ClassCenters(private_data));
  m.mean_center_distance = q.mean_center_distance;
  m.filter_pass_rate = q.filter_pass_rate;
  if (test_data != nullptr) {
    m.probe_accuracy = ProbeAccuracy(FitProbe(synthetic), *test_data);
    m.mixed_accuracy = MixedEval(synthetic, private_data, *test_data);
  }
  return m;
}

}  // namespace pcevolve
