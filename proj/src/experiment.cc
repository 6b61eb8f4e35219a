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

#include "pcevolve/experiment.h"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "pcevolve/embedder.h"
#include "pcevolve/http_backend.h"

namespace pcevolve {
namespace {

using nlohmann::json;

void MergeDefaults(json& target, const json& defaults) {
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (!target.contains(it.key())) {
      target[it.key()] = it.value();
    } else if (it.value().is_object() && target[it.key()].is_object()) {
      MergeDefaults(target[it.key()], it.value());
    }
  }
}

std::vector<FeatureVector> VectorsFromJson(const json& j) {
  std::vector<FeatureVector> out;
  for (const json& v : j) out.emplace_back(v.get<std::vector<double>>());
  return out;
}

MockWorld WorldFromJson(const json& w, int class_count) {
  const std::string preset = w.at("preset").get<std::string>();
  const auto dimension = w.at("dimension").get<std::size_t>();
  MockWorld world;
  if (preset == "default") {
    world = MockWorld::Default(class_count, dimension, w.at("gap").get<double>());
  } else if (preset == "oracle") {
    world = MockWorld::Oracle(class_count, dimension);
  } else {
    throw std::invalid_argument("unknown world preset '" + preset + "'");
  }
  if (w.contains("private_means")) {
    world.private_means = VectorsFromJson(w["private_means"]);
  }
  if (w.contains("generator_means")) {
    world.generator_means = VectorsFromJson(w["generator_means"]);
  }
  if (w.contains("private_spread")) {
    world.private_spread = w["private_spread"].get<std::vector<double>>();
  }
  if (w.contains("generator_spread")) {
    world.generator_spread = w["generator_spread"].get<double>();
    world.jitter = 0.05 * world.generator_spread;
  }
  if (w.contains("jitter")) world.jitter = w["jitter"].get<double>();
  world.Validate();
  if (world.class_count() != class_count) {
    throw std::invalid_argument("world defines " +
                                std::to_string(world.class_count()) +
                                " classes but class_count is " +
                                std::to_string(class_count));
  }
  return world;
}

Dataset LoadData(const json& spec, int class_count) {
  const std::string path = spec.at("path").get<std::string>();
  EmbeddingSource::Format format = FormatForPath(path);
  if (spec.contains("format")) {
    format = spec["format"].get<std::string>() == "csv"
                 ? EmbeddingSource::Format::kCsv
                 : EmbeddingSource::Format::kBinary;
  }
  const auto dimension = spec.value("dimension", std::size_t{0});
  return EmbedDataset(EmbeddingSource::File(path, format, dimension),
                      class_count);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "";
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json OptionalToJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(n);
  for (int w = 0; w < std::min(jobs, n); ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

json DefaultExperimentJson() {
  return json{
      {"algorithm", "pcevolve"},
      {"seed", 0},
      {"class_count", 2},
      {"K", 10},
      {"N", 100},
      {"T", 20},
      {"privacy", {{"epsilon_total", 8.0}, {"delta", 1e-5}}},
      {"selector", {{"tau", 10.0}}},
      {"strength", {{"initial", 0.8}, {"decrement", 0.02}, {"floor", 0.6}}},
      {"prompt", {{"domain", "synthetic"}, {"labels", nullptr}}},
      {"world", {{"preset", "default"}, {"dimension", 4}, {"gap", 3.0}}},
      {"backend", {{"kind", "mock"}}},
      {"private_data", {{"source", "mock"}}},
      {"test_data", {{"source", "mock"}, {"per_class", 1000}}},
      {"probe_each_iteration", true},
      {"algorithms", json::array({"pcevolve", "pe"})},
      {"outdir", "out"},
  };
}

json WithDefaults(const json& config) {
  json out = config.is_null() ? json::object() : config;
  if (!out.is_object()) {
    throw std::invalid_argument("experiment config must be a JSON object");
  }
  MergeDefaults(out, DefaultExperimentJson());
  if (out["prompt"]["labels"].is_null()) {
    json labels = json::array();
    for (int c = 0; c < out["class_count"].get<int>(); ++c) {
      labels.push_back("class " + std::to_string(c));
    }
    out["prompt"]["labels"] = labels;
  }
  return out;
}

void ApplyOverride(json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("override must look like key.path=value: " +
                                assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("empty key in " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!(*node)[key].is_object()) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string SweepParamPath(const std::string& param) {
  if (param == "tau") return "selector.tau";
  if (param == "K") return "K";
  if (param == "N") return "N";
  if (param == "epsilon_total") return "privacy.epsilon_total";
  throw std::invalid_argument("cannot sweep '" + param +
                              "' (expected tau, K, N or epsilon_total)");
}

RunInputs Experiment::Inputs() const {
  RunInputs in;
  in.private_data = &private_data;
  in.test_data = test_data ? &*test_data : nullptr;
  in.backend = backend.get();
  return in;
}

Experiment BuildExperiment(const json& raw) {
  const json config = WithDefaults(raw);
  RunConfig run;
  run.algorithm = ParseAlgorithm(config.at("algorithm").get<std::string>());
  run.seed = config.at("seed").get<std::uint64_t>();
  run.params.class_count = config.at("class_count").get<int>();
  run.params.iterations = config.at("T").get<int>();
  run.params.epsilon_total =
      config.at("privacy").at("epsilon_total").get<double>();
  run.params.delta = config.at("privacy").at("delta").get<double>();
  run.calibration.tau = config.at("selector").at("tau").get<double>();
  run.private_per_class = config.at("K").get<int>();
  run.synthetic_per_class = config.at("N").get<int>();
  run.strength.initial = config.at("strength").at("initial").get<double>();
  run.strength.decrement_per_iteration =
      config.at("strength").at("decrement").get<double>();
  run.strength.floor = config.at("strength").at("floor").get<double>();
  run.prompt.domain_name = config.at("prompt").at("domain").get<std::string>();
  run.prompt.class_labels =
      config.at("prompt").at("labels").get<std::vector<std::string>>();
  run.probe_each_iteration = config.at("probe_each_iteration").get<bool>();
  run.Validate();

  const int class_count = run.params.class_count;
  const std::string backend_kind =
      config.at("backend").at("kind").get<std::string>();
  const std::string private_source =
      config.at("private_data").at("source").get<std::string>();
  const std::string test_source =
      config.at("test_data").at("source").get<std::string>();
  const bool needs_world = backend_kind == "mock" ||
                           private_source == "mock" || test_source == "mock";
  std::optional<MockWorld> world;
  if (needs_world) world = WorldFromJson(config.at("world"), class_count);

  Experiment exp{config, run, Dataset(class_count, 1), std::nullopt, nullptr,
                 {}};
  if (private_source == "mock") {
    Rng rng(run.seed, "private");
    exp.private_data = world->SamplePrivate(run.private_per_class, rng);
  } else if (private_source == "file") {
    exp.private_data = LoadData(config.at("private_data"), class_count);
  } else {
    throw std::invalid_argument("unknown private_data.source '" +
                                private_source + "'");
  }

  if (test_source == "mock") {
    Rng rng(run.seed, "test");
    exp.test_data = world->SamplePrivate(
        config.at("test_data").at("per_class").get<int>(), rng);
  } else if (test_source == "file") {
    exp.test_data = LoadData(config.at("test_data"), class_count);
  } else if (test_source != "none") {
    throw std::invalid_argument("unknown test_data.source '" + test_source +
                                "'");
  }

  if (backend_kind == "mock") {
    exp.backend = std::make_unique<MockBackend>(*world);
  } else if (backend_kind == "http") {
    const json& b = config.at("backend");
    HttpBackendConfig hc;
    hc.base_url = b.at("url").get<std::string>();
    hc.timeout = std::chrono::seconds(b.value("timeout_s", 60));
    hc.retry.max_retries = b.value("max_retries", 3);
    hc.retry.initial_backoff =
        std::chrono::milliseconds(b.value("initial_backoff_ms", 1000));
    exp.backend = std::make_unique<HttpBackend>(hc);
  } else {
    throw std::invalid_argument("unknown backend.kind '" + backend_kind + "'");
  }

  switch (run.algorithm) {
    case Algorithm::kPe:
      exp.notes.push_back(
          "PE accounting: epsilon_total/T per iteration, one Gaussian release "
          "of the per-class vote histograms (all classes concatenated) with "
          "L2 sensitivity sqrt(2); selection is the per-class noisy argmax "
          "with threshold H=0.");
      break;
    case Algorithm::kPeEm:
      exp.notes.push_back(
          "PE-EM: utilities are votes/K_c with sensitivity 1/K_c; "
          "epsilon_total/(T*C) per class per iteration.");
      break;
    case Algorithm::kPcEvolveGm:
      exp.notes.push_back(
          "PCEvolve-GM: Gaussian noise on calibrated utilities with "
          "sensitivity K*N; epsilon_total/(T*C) per class per iteration.");
      break;
    case Algorithm::kDpImg:
      exp.notes.push_back(
          "DPImg: records clipped to the unit ball, sensitivity 2, whole "
          "budget in one release, single refine from the first noised record "
          "of each class.");
      break;
    default:
      exp.notes.push_back(
          "Exponential mechanism with sensitivity 1 at epsilon_total/(T*C) "
          "per class per iteration.");
      break;
  }
  if (needs_world && backend_kind == "mock") {
    exp.notes.push_back(
        "Mock backend: refine = (1-s)*prototype + s*prior + jitter; the "
        "mapping from real i2i strength to s is a modeling choice.");
  }
  return exp;
}

json TraceToJson(const RunTrace& trace) {
  json iterations = json::array();
  for (const IterationRecord& rec : trace.iterations) {
    json selections = json::array();
    for (const ClassSelection& s : rec.selections) {
      selections.push_back({{"class_id", s.class_id},
                            {"chosen_index", s.chosen_index},
                            {"pool_index", s.pool_index},
                            {"utilities", s.utilities},
                            {"probabilities", s.probabilities}});
    }
    json prototypes = json::array();
    for (const LabeledPoint& p : rec.prototypes) {
      prototypes.push_back(
          {{"class_id", p.class_id},
           {"features", std::vector<double>(p.features.values().begin(),
                                            p.features.values().end())}});
    }
    iterations.push_back(
        {{"iteration", rec.iteration},
         {"strength", rec.strength},
         {"mean_prototype_distance", rec.mean_prototype_distance},
         {"ledger_spent", rec.ledger_spent.ToString()},
         {"probe_accuracy", OptionalToJson(rec.probe_accuracy)},
         {"selections", std::move(selections)},
         {"prototypes", std::move(prototypes)}});
  }
  return {{"algorithm", AlgorithmName(trace.algorithm)},
          {"initial_mean_distance", OptionalToJson(trace.initial_mean_distance)},
          {"initial_probe_accuracy",
           OptionalToJson(trace.initial_probe_accuracy)},
          {"iterations", std::move(iterations)},
          {"aborted", trace.aborted},
          {"abort_reason", trace.abort_reason}};
}

json LedgerToJson(const RunTrace& trace) {
  json charges = json::array();
  for (const BudgetLedger::Entry& e : trace.ledger_log) {
    charges.push_back({{"label", e.label},
                       {"epsilon", e.epsilon.ToString()},
                       {"epsilon_value", e.epsilon.ToDouble()}});
  }
  return {{"total", trace.ledger_total.ToString()},
          {"spent", trace.ledger_spent.ToString()},
          {"spent_value", trace.ledger_spent.ToDouble()},
          {"charge_count", trace.ledger_log.size()},
          {"charges", std::move(charges)}};
}

std::string TraceCsv(const RunTrace& trace) {
  std::ostringstream os;
  os << "iteration,strength,mean_prototype_distance,ledger_spent,"
        "probe_accuracy,chosen_indices\n";
  os << "0,," << FormatDouble(trace.initial_mean_distance.value_or(NAN))
     << ",0," << FormatDouble(trace.initial_probe_accuracy.value_or(NAN))
     << ",\n";
  for (const IterationRecord& rec : trace.iterations) {
    os << rec.iteration << ',' << FormatDouble(rec.strength) << ','
       << FormatDouble(rec.mean_prototype_distance) << ','
       << rec.ledger_spent.ToString() << ','
       << FormatDouble(rec.probe_accuracy.value_or(NAN)) << ',';
    for (std::size_t i = 0; i < rec.selections.size(); ++i) {
      if (i > 0) os << ';';
      os << rec.selections[i].chosen_index;
    }
    os << '\n';
  }
  return os.str();
}

RunOutcome RunExperiment(const json& raw) {
  const auto start = std::chrono::steady_clock::now();
  Experiment exp = BuildExperiment(raw);
  RunOutcome out;
  json& report = out.report;
  report["config"] = exp.config;
  report["notes"] = exp.notes;
  RunTrace trace;
  std::optional<Dataset> final_pool;
  try {
    RunResult result = Run(exp.run, exp.Inputs());
    trace = std::move(result.trace);
    final_pool = std::move(result.final_pool);
  } catch (const RunAbortedError& e) {
    spdlog::error("{}", e.what());
    trace = e.partial_trace();
    out.aborted = true;
  }
  report["status"] = out.aborted ? "aborted" : "completed";
  report["trace"] = TraceToJson(trace);
  report["ledger"] = LedgerToJson(trace);
  if (final_pool) {
    const FinalMetrics m = EvaluateFinal(
        *final_pool, exp.private_data,
        exp.test_data ? &*exp.test_data : nullptr);
    report["final_metrics"] = {
        {"probe_accuracy", OptionalToJson(m.probe_accuracy)},
        {"mixed_accuracy", OptionalToJson(m.mixed_accuracy)},
        {"mean_center_distance", m.mean_center_distance},
        {"filter_pass_rate", m.filter_pass_rate},
        {"final_mean_prototype_distance", trace.FinalMeanPrototypeDistance()}};
  } else {
    report["final_metrics"] = nullptr;
  }
  out.trace_csv = TraceCsv(trace);
  out.final_pool = std::move(final_pool);
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  report["timing"] = {{"wall_seconds", elapsed.count()}};
  return out;
}

void WriteRunOutputs(const std::filesystem::path& outdir,
                     const RunOutcome& outcome) {
  std::filesystem::create_directories(outdir);
  std::ofstream(outdir / "report.json") << outcome.report.dump(2) << '\n';
  std::ofstream(outdir / "trace.csv") << outcome.trace_csv;
  if (outcome.final_pool) {
    WriteDatasetFile((outdir / "final_pool.bin").string(),
                     EmbeddingSource::Format::kBinary, *outcome.final_pool);
  }
}

json NoiseDemoToJson(const NoiseDemoReport& r) {
  return {{"max_votes", r.max_votes},
          {"noise_sigma", r.noise_sigma},
          {"exceeds", r.exceeds},
          {"clean_histogram", r.clean_histogram},
          {"noisy_histogram", r.noisy_histogram}};
}

std::string NoiseDemoCsv(const NoiseDemoReport& r) {
  std::ostringstream os;
  os << "candidate,clean_votes,noisy_votes\n";
  for (std::size_t i = 0; i < r.clean_histogram.size(); ++i) {
    os << i << ',' << r.clean_histogram[i] << ','
       << FormatDouble(r.noisy_histogram[i]) << '\n';
  }
  return os.str();
}

CompareOutcome RunCompare(const json& raw, int seeds, int jobs) {
  if (seeds < 1) throw std::invalid_argument("compare needs --seeds >= 1");
  const json config = WithDefaults(raw);
  const std::vector<std::string> algorithms =
      config.at("algorithms").get<std::vector<std::string>>();
  const auto base_seed = config.at("seed").get<std::uint64_t>();
  const int n = static_cast<int>(algorithms.size()) * seeds;
  std::vector<RunOutcome> outcomes(n);
  ParallelFor(n, jobs, [&](int i) {
    json c = config;
    c["algorithm"] = algorithms[i / seeds];
    c["seed"] = base_seed + static_cast<std::uint64_t>(i % seeds);
    outcomes[i] = RunExperiment(c);
  });

  CompareOutcome out;
  std::ostringstream csv;
  csv << "algorithm,seeds,completed,probe_accuracy_mean,probe_accuracy_std,"
         "final_distance_mean,final_distance_std,mixed_accuracy_mean\n";
  json rows = json::array();
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    std::vector<double> acc, dist, mixed;
    json per_seed = json::array();
    for (int s = 0; s < seeds; ++s) {
      const RunOutcome& o = outcomes[a * seeds + s];
      out.any_aborted |= o.aborted;
      const json& m = o.report["final_metrics"];
      json entry = {{"seed", base_seed + s},
                    {"status", o.report["status"]},
                    {"final_metrics", m}};
      per_seed.push_back(std::move(entry));
      if (m.is_null()) continue;
      if (!m["probe_accuracy"].is_null()) {
        acc.push_back(m["probe_accuracy"].get<double>());
      }
      if (!m["mixed_accuracy"].is_null()) {
        mixed.push_back(m["mixed_accuracy"].get<double>());
      }
      dist.push_back(m["final_mean_prototype_distance"].get<double>());
    }
    csv << algorithms[a] << ',' << seeds << ',' << dist.size() << ','
        << FormatDouble(Mean(acc)) << ',' << FormatDouble(SampleStd(acc))
        << ',' << FormatDouble(Mean(dist)) << ','
        << FormatDouble(SampleStd(dist)) << ',' << FormatDouble(Mean(mixed))
        << '\n';
    rows.push_back({{"algorithm", algorithms[a]},
                    {"completed", dist.size()},
                    {"probe_accuracy_mean", acc.empty() ? json(nullptr)
                                                        : json(Mean(acc))},
                    {"probe_accuracy_std", SampleStd(acc)},
                    {"final_distance_mean", dist.empty() ? json(nullptr)
                                                         : json(Mean(dist))},
                    {"final_distance_std", SampleStd(dist)},
                    {"runs", std::move(per_seed)}});
  }
  out.csv = csv.str();
  out.summary = {{"config", config}, {"seeds", seeds}, {"results", rows}};
  return out;
}

SweepOutcome RunSweep(const json& raw, const std::string& param,
                      const std::vector<std::string>& values, int seeds,
                      int jobs) {
  if (seeds < 1) throw std::invalid_argument("sweep needs seeds >= 1");
  if (values.empty()) throw std::invalid_argument("sweep needs values");
  const std::string path = SweepParamPath(param);
  const json config = WithDefaults(raw);
  const auto base_seed = config.at("seed").get<std::uint64_t>();
  const int n = static_cast<int>(values.size()) * seeds;
  std::vector<RunOutcome> outcomes(n);
  ParallelFor(n, jobs, [&](int i) {
    json c = config;
    ApplyOverride(c, path + "=" + values[i / seeds]);
    c["seed"] = base_seed + static_cast<std::uint64_t>(i % seeds);
    outcomes[i] = RunExperiment(c);
  });
  SweepOutcome out;
  std::ostringstream csv;
  csv << "param,value,seed,algorithm,status,probe_accuracy,"
         "final_mean_prototype_distance,ledger_spent\n";
  for (int i = 0; i < n; ++i) {
    const json& r = outcomes[i].report;
    out.any_aborted |= outcomes[i].aborted;
    const json& m = r["final_metrics"];
    csv << param << ',' << values[i / seeds] << ','
        << base_seed + static_cast<std::uint64_t>(i % seeds) << ','
        << r["config"]["algorithm"].get<std::string>() << ','
        << r["status"].get<std::string>() << ',';
    if (!m.is_null() && !m["probe_accuracy"].is_null()) {
      csv << FormatDouble(m["probe_accuracy"].get<double>());
    }
    csv << ',';
    if (!m.is_null()) {
      csv << FormatDouble(m["final_mean_prototype_distance"].get<double>());
    }
    csv << ',' << r["ledger"]["spent"].get<std::string>() << '\n';
  }
  out.csv = csv.str();
  return out;
}

}  // namespace pcevolve
