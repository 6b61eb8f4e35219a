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

#include "pcevolve/core.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcevolve {
namespace {

void CheckFinite(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("feature vector must have dimension >= 1");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("feature vector coordinate " +
                                  std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

FeatureVector::FeatureVector(std::vector<double> values)
    : values_(std::move(values)) {
  CheckFinite(values_);
}

FeatureVector::FeatureVector(std::initializer_list<double> values)
    : FeatureVector(std::vector<double>(values)) {}

FeatureVector FeatureVector::Zeros(std::size_t dimension) {
  return FeatureVector(std::vector<double>(dimension, 0.0));
}

Dataset::Dataset(int class_count, std::size_t dimension)
    : class_count_(class_count), dimension_(dimension) {
  if (class_count < 2) {
    throw std::invalid_argument("dataset needs at least 2 classes, got " +
                                std::to_string(class_count));
  }
  if (dimension < 1) {
    throw std::invalid_argument("dataset dimension must be >= 1");
  }
}

void Dataset::Add(LabeledPoint point) {
  if (point.features.dimension() != dimension_) {
    throw DimensionMismatchError(dimension_, point.features.dimension());
  }
  if (point.class_id < 0 || point.class_id >= class_count_) {
    throw std::out_of_range("class_id " + std::to_string(point.class_id) +
                            " outside [0, " + std::to_string(class_count_) +
                            ")");
  }
  points_.push_back(std::move(point));
}

void Dataset::Add(FeatureVector features, int class_id) {
  Add(LabeledPoint{std::move(features), class_id});
}

std::vector<LabeledPoint> Dataset::OfClass(int class_id) const {
  std::vector<LabeledPoint> out;
  for (const LabeledPoint& p : points_) {
    if (p.class_id == class_id) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> Dataset::IndicesOfClass(int class_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].class_id == class_id) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::ClassCounts() const {
  std::vector<std::size_t> counts(class_count_, 0);
  for (const LabeledPoint& p : points_) ++counts[p.class_id];
  return counts;
}

ClassCenterSet::ClassCenterSet(std::vector<FeatureVector> centers)
    : centers_(std::move(centers)) {
  if (centers_.size() < 2) {
    throw std::invalid_argument("center set needs at least 2 classes");
  }
  for (const FeatureVector& c : centers_) {
    if (c.dimension() != centers_.front().dimension()) {
      throw DimensionMismatchError(centers_.front().dimension(),
                                   c.dimension());
    }
  }
}

const FeatureVector& ClassCenterSet::operator[](int class_id) const {
  if (class_id < 0 || class_id >= class_count()) {
    throw std::out_of_range("no center for class " + std::to_string(class_id));
  }
  return centers_[class_id];
}

DimensionMismatchError::DimensionMismatchError(std::size_t expected,
                                               std::size_t actual)
    : std::invalid_argument("dimension mismatch: expected " +
                            std::to_string(expected) + ", got " +
                            std::to_string(actual)) {}

double L2Distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatchError(a.dimension(), b.dimension());
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

FeatureVector MeanCenter(std::span<const FeatureVector> points) {
  if (points.empty()) {
    throw std::invalid_argument("mean of an empty point list");
  }
  const std::size_t d = points.front().dimension();
  std::vector<const FeatureVector*> order;
  order.reserve(points.size());
  for (const FeatureVector& p : points) {
    if (p.dimension() != d) throw DimensionMismatchError(d, p.dimension());
    order.push_back(&p);
  }
  // Canonical summation order makes the result bit-identical under any
  // permutation of the input.
  std::ranges::sort(order, [](const FeatureVector* a, const FeatureVector* b) {
    return std::ranges::lexicographical_compare(a->values(), b->values());
  });
  std::vector<double> sum(d, 0.0);
  for (const FeatureVector* p : order) {
    for (std::size_t i = 0; i < d; ++i) sum[i] += (*p)[i];
  }
  const double n = static_cast<double>(points.size());
  for (std::size_t i = 0; i < d; ++i) {
    // The mean lies within the coordinate's range; clamping removes rounding
    // drift so that a class of identical points yields that point exactly.
    double lo = (*order.front())[i];
    double hi = lo;
    for (const FeatureVector* p : order) {
      lo = std::min(lo, (*p)[i]);
      hi = std::max(hi, (*p)[i]);
    }
    sum[i] = std::clamp(sum[i] / n, lo, hi);
  }
  return FeatureVector(std::move(sum));
}

ClassCenterSet ClassCenters(const Dataset& data) {
  std::vector<std::vector<FeatureVector>> by_class(data.class_count());
  for (const LabeledPoint& p : data.points()) {
    by_class[p.class_id].push_back(p.features);
  }
  std::vector<FeatureVector> centers;
  centers.reserve(by_class.size());
  for (int c = 0; c < data.class_count(); ++c) {
    if (by_class[c].empty()) {
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no private points");
    }
    centers.push_back(MeanCenter(by_class[c]));
  }
  return ClassCenterSet(std::move(centers));
}

}  // namespace pcevolve
