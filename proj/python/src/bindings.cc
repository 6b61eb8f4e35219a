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

// Python bindings for the pcevolve core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "pcevolve/core.h"
#include "pcevolve/engine.h"
#include "pcevolve/experiment.h"
#include "pcevolve/mechanisms.h"
#include "pcevolve/selector.h"

namespace py = pybind11;

namespace {

using pcevolve::FeatureVector;

std::vector<FeatureVector> ToVectors(
    const std::vector<std::vector<double>>& rows) {
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(r);
  return out;
}

std::vector<pcevolve::LabeledPoint> ToPool(
    const std::vector<std::vector<double>>& rows, int class_id) {
  std::vector<pcevolve::LabeledPoint> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({FeatureVector(r), class_id});
  return out;
}

std::vector<double> ToList(const pcevolve::UtilityScores& s) {
  return {s.values().begin(), s.values().end()};
}

}  // namespace

PYBIND11_MODULE(_pcevolve, m) {
  m.doc() = "Private few-shot synthetic data evolution (C++ core)";

  py::register_exception<pcevolve::BudgetExceededError>(
      m, "BudgetExceededError", PyExc_RuntimeError);
  py::register_exception<pcevolve::DimensionMismatchError>(
      m, "DimensionMismatchError", PyExc_ValueError);

  m.def(
      "l2_distance",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return pcevolve::L2Distance(FeatureVector(a), FeatureVector(b));
      },
      py::arg("a"), py::arg("b"), "Euclidean distance between two vectors.");

  m.def(
      "mean_center",
      [](const std::vector<std::vector<double>>& points) {
        const FeatureVector c = pcevolve::MeanCenter(ToVectors(points));
        return std::vector<double>(c.values().begin(), c.values().end());
      },
      py::arg("points"), "Order-independent mean of a list of vectors.");

  m.def("gm_sigma", &pcevolve::GmSigma, py::arg("sensitivity"),
        py::arg("epsilon"), py::arg("delta"),
        "Gaussian mechanism noise scale.");

  m.def(
      "em_probabilities",
      [](const std::vector<double>& scores, double epsilon,
         double sensitivity) {
        return pcevolve::EmProbabilities(pcevolve::UtilityScores(scores),
                                         epsilon, sensitivity);
      },
      py::arg("scores"), py::arg("epsilon"), py::arg("sensitivity") = 1.0,
      "Exponential mechanism selection probabilities.");

  m.def(
      "em_sample",
      [](const std::vector<double>& scores, double epsilon, double sensitivity,
         std::uint64_t seed) {
        pcevolve::Rng rng(seed);
        const pcevolve::EmDraw d = pcevolve::EmSample(
            pcevolve::UtilityScores(scores), epsilon, sensitivity, rng);
        return py::make_tuple(d.index, d.probabilities);
      },
      py::arg("scores"), py::arg("epsilon"), py::arg("sensitivity") = 1.0,
      py::arg("seed") = 0,
      "Draw one index with the exponential mechanism; returns "
      "(index, probabilities).");

  m.def(
      "contrastive_filter",
      [](const std::vector<double>& features, int class_id,
         const std::vector<std::vector<double>>& centers) {
        return pcevolve::ContrastiveFilter(
            {FeatureVector(features), class_id},
            pcevolve::ClassCenterSet(ToVectors(centers)));
      },
      py::arg("features"), py::arg("class_id"), py::arg("centers"),
      "True when the point is strictly nearest its own class center.");

  m.def(
      "calibrated_utilities",
      [](const std::vector<std::vector<double>>& pool, int class_id,
         const std::vector<std::vector<double>>& centers, double tau) {
        return ToList(pcevolve::CalibratedUtilities(
            ToPool(pool, class_id),
            pcevolve::ClassCenterSet(ToVectors(centers)), {tau}));
      },
      py::arg("pool"), py::arg("class_id"), py::arg("centers"),
      py::arg("tau") = 10.0,
      "Filtered, calibrated utilities of one class's candidates.");

  m.def(
      "noise_demo",
      [](int k, int n, double epsilon_total, int iterations, double delta,
         std::uint64_t seed) {
        pcevolve::PrivacyParams params;
        params.epsilon_total = epsilon_total;
        params.iterations = iterations;
        params.delta = delta;
        return pcevolve::NoiseDemoToJson(
                   pcevolve::NoiseDemo(k, n, params, seed))
            .dump();
      },
      py::arg("k") = 10, py::arg("n") = 100, py::arg("epsilon_total") = 8.0,
      py::arg("iterations") = 20, py::arg("delta") = 1e-5, py::arg("seed") = 0,
      "Noise-versus-votes report as a JSON string.");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        nlohmann::json config = nlohmann::json::parse(config_json);
        pcevolve::RunOutcome out;
        {
          py::gil_scoped_release release;
          out = pcevolve::RunExperiment(config);
        }
        return out.report.dump();
      },
      py::arg("config_json"),
      "Run one experiment from a JSON config; returns the report as JSON.");

  m.def("default_config",
        [] { return pcevolve::DefaultExperimentJson().dump(); },
        "Default experiment config as a JSON string.");

  py::class_<pcevolve::BudgetLedger>(m, "BudgetLedger")
      .def(py::init([](double total) {
             return pcevolve::BudgetLedger(
                 pcevolve::Rational::FromDouble(total));
           }),
           py::arg("total"))
      .def(
          "charge",
          [](pcevolve::BudgetLedger& l, const std::string& label,
             double epsilon) {
            l.Charge(label, pcevolve::Rational::FromDouble(epsilon));
          },
          py::arg("label"), py::arg("epsilon"))
      .def_property_readonly(
          "spent", [](const pcevolve::BudgetLedger& l) {
            return l.spent().ToString();
          })
      .def_property_readonly(
          "remaining", [](const pcevolve::BudgetLedger& l) {
            return l.remaining().ToString();
          })
      .def_property_readonly("charge_count",
                             &pcevolve::BudgetLedger::charge_count)
      .def("log", [](const pcevolve::BudgetLedger& l) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : l.log()) {
          out.emplace_back(e.label, e.epsilon.ToString());
        }
        return out;
      });
}
