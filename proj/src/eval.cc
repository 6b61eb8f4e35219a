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

#include "pcevolve/eval.h"

#include <stdexcept>

#include "pcevolve/selector.h"

namespace pcevolve {

int ProbeModel::Predict(const FeatureVector& x) const {
  int best = 0;
  double best_distance = L2Distance(x, centroids_[0]);
  for (int c = 1; c < centroids_.class_count(); ++c) {
    const double d = L2Distance(x, centroids_[c]);
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

ProbeModel FitProbe(const Dataset& train) {
  return ProbeModel(ClassCenters(train));
}

double ProbeAccuracy(const ProbeModel& model, const Dataset& test) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  std::size_t correct = 0;
  for (const LabeledPoint& p : test.points()) {
    if (model.Predict(p.features) == p.class_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double MixedEval(const Dataset& synthetic, const Dataset& private_data,
                 const Dataset& test) {
  Dataset train(private_data.class_count(), private_data.dimension());
  for (const LabeledPoint& p : synthetic.points()) train.Add(p);
  for (const LabeledPoint& p : private_data.points()) train.Add(p);
  return ProbeAccuracy(FitProbe(train), test);
}

QualityMetrics ComputeQualityMetrics(const Dataset& synthetic,
                                     const ClassCenterSet& private_centers) {
  if (synthetic.class_count() != private_centers.class_count()) {
    throw std::invalid_argument("synthetic data and centers disagree on C");
  }
  QualityMetrics m;
  m.mean_center_distance.assign(synthetic.class_count(), 0.0);
  std::vector<std::size_t> counts(synthetic.class_count(), 0);
  std::size_t passing = 0;
  for (const LabeledPoint& p : synthetic.points()) {
    m.mean_center_distance[p.class_id] +=
        L2Distance(p.features, private_centers[p.class_id]);
    ++counts[p.class_id];
    if (ContrastiveFilter(p, private_centers)) ++passing;
  }
  for (int c = 0; c < synthetic.class_count(); ++c) {
    if (counts[c] > 0) m.mean_center_distance[c] /= counts[c];
  }
  m.filter_pass_rate =
      synthetic.empty() ? 0.0
                        : static_cast<double>(passing) / synthetic.size();
  return m;
}

}  // namespace pcevolve
