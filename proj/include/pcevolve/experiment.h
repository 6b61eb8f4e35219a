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

#ifndef PCEVOLVE_EXPERIMENT_H_
#define PCEVOLVE_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcevolve/engine.h"
#include "pcevolve/generator.h"

namespace pcevolve {

// Experiments are described by one JSON document; every field has a default
// (see DefaultExperimentJson). Dotted-path overrides mutate it before use.
nlohmann::json DefaultExperimentJson();

// Fills missing fields from the defaults. Unknown top-level keys are kept.
nlohmann::json WithDefaults(const nlohmann::json& config);

// "selector.tau=20" -> sets config["selector"]["tau"] = 20. The value is
// parsed as JSON when possible, otherwise taken as a string.
void ApplyOverride(nlohmann::json& config, const std::string& assignment);

// JSON path a sweep parameter name maps to ("tau" -> "selector.tau").
std::string SweepParamPath(const std::string& param);

// A fully materialized experiment: config, data and backend.
struct Experiment {
  nlohmann::json config;
  RunConfig run;
  Dataset private_data;
  std::optional<Dataset> test_data;
  std::unique_ptr<GeneratorBackend> backend;
  std::vector<std::string> notes;

  RunInputs Inputs() const;
};

// Builds the experiment for `config` (defaults applied) and `seed`.
Experiment BuildExperiment(const nlohmann::json& config);

struct RunOutcome {
  nlohmann::json report;
  std::string trace_csv;
  std::optional<Dataset> final_pool;
  bool aborted = false;
};

// Runs one experiment and assembles its report. Budget aborts are reported,
// not thrown. Timing lives under report["timing"] only.
RunOutcome RunExperiment(const nlohmann::json& config);

std::string TraceCsv(const RunTrace& trace);
nlohmann::json TraceToJson(const RunTrace& trace);
nlohmann::json LedgerToJson(const RunTrace& trace);
nlohmann::json NoiseDemoToJson(const NoiseDemoReport& report);
std::string NoiseDemoCsv(const NoiseDemoReport& report);

// Writes report.json, trace.csv and (when the run completed)
// final_pool.bin under `outdir`.
void WriteRunOutputs(const std::filesystem::path& outdir,
                     const RunOutcome& outcome);

struct CompareOutcome {
  nlohmann::json summary;
  std::string csv;
  bool any_aborted = false;
};

// Every algorithm in config["algorithms"] on seeds seed..seed+n-1.
CompareOutcome RunCompare(const nlohmann::json& config, int seeds,
                          int jobs = 1);

struct SweepOutcome {
  std::string csv;
  bool any_aborted = false;
};

SweepOutcome RunSweep(const nlohmann::json& config, const std::string& param,
                      const std::vector<std::string>& values, int seeds,
                      int jobs = 1);

}  // namespace pcevolve

#endif  // PCEVOLVE_EXPERIMENT_H_
