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

#ifndef PCEVOLVE_EVAL_H_
#define PCEVOLVE_EVAL_H_

#include <vector>

#include "pcevolve/core.h"

namespace pcevolve {

// Nearest-centroid classifier used as the downstream-accuracy proxy.
class ProbeModel {
 public:
  explicit ProbeModel(ClassCenterSet centroids)
      : centroids_(std::move(centroids)) {}

  // Nearest centroid; ties go to the lowest class id.
  int Predict(const FeatureVector& x) const;
  const ClassCenterSet& centroids() const { return centroids_; }

 private:
  ClassCenterSet centroids_;
};

ProbeModel FitProbe(const Dataset& train);

// Fraction of `test` classified correctly.
double ProbeAccuracy(const ProbeModel& model, const Dataset& test);

// Probe fit on synthetic + private, evaluated on test.
double MixedEval(const Dataset& synthetic, const Dataset& private_data,
                 const Dataset& test);

struct QualityMetrics {
  // Mean distance from class-c synthetic points to private center c.
  std::vector<double> mean_center_distance;
  // Fraction of synthetic points passing the contrastive filter.
  double filter_pass_rate = 0.0;
};

QualityMetrics ComputeQualityMetrics(const Dataset& synthetic,
                                     const ClassCenterSet& private_centers);

}  // namespace pcevolve

#endif  // PCEVOLVE_EVAL_H_
