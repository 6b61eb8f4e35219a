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

// Command-line entry point: run, compare, sweep, noise-demo, evaluate.

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pcevolve/embedder.h"
#include "pcevolve/engine.h"
#include "pcevolve/experiment.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAborted = 2;

json LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return json::parse(in);
}

void WriteText(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private synthetic-data evolution"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Per-iteration debug logging");

  std::string config_path;
  std::string outdir;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::uint64_t seed = 0;
  run->add_option("--config", config_path, "Experiment JSON")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  run->add_option("--set", overrides, "Override, e.g. selector.tau=20");
  run->add_option("--outdir", outdir, "Output directory");

  auto* compare = app.add_subcommand("compare", "Compare algorithms");
  int seeds = 1;
  int jobs = 1;
  compare->add_option("--config", config_path, "Experiment JSON")->required();
  compare->add_option("--seeds", seeds, "Number of seeds")->required();
  compare->add_option("--set", overrides, "Override, e.g. T=10");
  compare->add_option("--jobs", jobs, "Parallel workers");
  compare->add_option("--outdir", outdir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter");
  std::string param;
  std::string values;
  sweep->add_option("--config", config_path, "Experiment JSON")->required();
  sweep->add_option("--param", param, "tau, K, N or epsilon_total")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--seeds", seeds, "Seeds per value");
  sweep->add_option("--set", overrides, "Override, e.g. algorithm=pe");
  sweep->add_option("--jobs", jobs, "Parallel workers");
  sweep->add_option("--outdir", outdir, "Output directory");

  auto* noise = app.add_subcommand("noise-demo",
                                   "PE vote noise versus the K private votes");
  int k = 10, n = 100, t = 20;
  double eps = 8.0, delta = 1e-5;
  noise->add_option("--k", k, "Private records per class");
  noise->add_option("--n", n, "Synthetic candidates per class");
  noise->add_option("--eps", eps, "Total epsilon");
  noise->add_option("--t", t, "Iterations");
  noise->add_option("--delta", delta, "Delta");
  noise->add_option("--seed", seed, "Seed for the histogram sample");
  noise->add_option("--outdir", outdir, "Output directory");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Re-evaluate a finished run without touching its budget");
  std::string run_dir;
  evaluate->add_option("--run-dir", run_dir, "Directory written by `run`")
      ->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*run) {
      json config = LoadConfig(config_path);
      for (const std::string& o : overrides) pcevolve::ApplyOverride(config, o);
      if (*seed_opt) config["seed"] = seed;
      if (!outdir.empty()) config["outdir"] = outdir;
      config = pcevolve::WithDefaults(config);
      const pcevolve::RunOutcome outcome = pcevolve::RunExperiment(config);
      const fs::path dir = config["outdir"].get<std::string>();
      pcevolve::WriteRunOutputs(dir, outcome);
      const json& m = outcome.report["final_metrics"];
      std::cout << "status: " << outcome.report["status"].get<std::string>()
                << "\nledger spent: "
                << outcome.report["ledger"]["spent"].get<std::string>()
                << " of " << outcome.report["ledger"]["total"].get<std::string>()
                << "\n";
      if (!m.is_null()) std::cout << "final metrics: " << m.dump() << "\n";
      std::cout << "wrote " << (dir / "report.json").string() << "\n";
      return outcome.aborted ? kExitAborted : kExitOk;
    }
    if (*compare || *sweep) {
      json config = LoadConfig(config_path);
      for (const std::string& o : overrides) pcevolve::ApplyOverride(config, o);
      if (!outdir.empty()) config["outdir"] = outdir;
      config = pcevolve::WithDefaults(config);
      const fs::path dir = config["outdir"].get<std::string>();
      if (*compare) {
        const pcevolve::CompareOutcome out =
            pcevolve::RunCompare(config, seeds, jobs);
        WriteText(dir / "compare.csv", out.csv);
        WriteText(dir / "compare.json", out.summary.dump(2) + "\n");
        std::cout << out.csv;
        return out.any_aborted ? kExitAborted : kExitOk;
      }
      const pcevolve::SweepOutcome out =
          pcevolve::RunSweep(config, param, SplitList(values), seeds, jobs);
      WriteText(dir / "sweep.csv", out.csv);
      std::cout << out.csv;
      return out.any_aborted ? kExitAborted : kExitOk;
    }
    if (*noise) {
      pcevolve::PrivacyParams params;
      params.epsilon_total = eps;
      params.delta = delta;
      params.iterations = t;
      const pcevolve::NoiseDemoReport report =
          pcevolve::NoiseDemo(k, n, params, seed);
      const json j = pcevolve::NoiseDemoToJson(report);
      std::cout << "max_votes: " << report.max_votes
                << "\nnoise_sigma: " << report.noise_sigma
                << "\nexceeds: " << (report.exceeds ? "true" : "false")
                << "\n";
      const fs::path dir = outdir.empty() ? fs::path("out") : fs::path(outdir);
      WriteText(dir / "noise_demo.csv", pcevolve::NoiseDemoCsv(report));
      WriteText(dir / "noise_demo.json", j.dump(2) + "\n");
      return kExitOk;
    }
    if (*evaluate) {
      const fs::path dir = run_dir;
      const json report = LoadConfig((dir / "report.json").string());
      // Rebuild private/test data from the embedded config; the pool comes
      // from disk. Nothing here consults or charges a ledger.
      pcevolve::Experiment exp = pcevolve::BuildExperiment(report["config"]);
      const pcevolve::Dataset pool = pcevolve::ReadDatasetFile(
          (dir / "final_pool.bin").string(),
          pcevolve::EmbeddingSource::Format::kBinary,
          exp.run.params.class_count);
      const pcevolve::FinalMetrics m = pcevolve::EvaluateFinal(
          pool, exp.private_data,
          exp.test_data ? &*exp.test_data : nullptr);
      json out = {{"ledger_spent", report["ledger"]["spent"]},
                  {"filter_pass_rate", m.filter_pass_rate},
                  {"mean_center_distance", m.mean_center_distance}};
      if (m.probe_accuracy) out["probe_accuracy"] = *m.probe_accuracy;
      if (m.mixed_accuracy) out["mixed_accuracy"] = *m.mixed_accuracy;
      std::cout << out.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitOk;
}
