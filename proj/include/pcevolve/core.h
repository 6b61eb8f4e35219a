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

#ifndef PCEVOLVE_CORE_H_
#define PCEVOLVE_CORE_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace pcevolve {

// A point in the shared embedding space. Always at least one coordinate and
// never NaN/Inf; values are held as 64-bit reals regardless of input width.
class FeatureVector {
 public:
  explicit FeatureVector(std::vector<double> values);
  FeatureVector(std::initializer_list<double> values);
  // Zero vector of the given dimension.
  static FeatureVector Zeros(std::size_t dimension);

  std::size_t dimension() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const FeatureVector& other) const = default;

 private:
  std::vector<double> values_;
};

struct LabeledPoint {
  FeatureVector features;
  int class_id = 0;

  bool operator==(const LabeledPoint& other) const = default;
};

// Ordered collection of labeled points sharing one dimension and a class
// count C >= 2. Points keep insertion order.
class Dataset {
 public:
  Dataset(int class_count, std::size_t dimension);

  void Add(LabeledPoint point);
  void Add(FeatureVector features, int class_id);

  int class_count() const { return class_count_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<LabeledPoint>& points() const { return points_; }
  const LabeledPoint& operator[](std::size_t i) const { return points_[i]; }

  // Points with the given label, in dataset order.
  std::vector<LabeledPoint> OfClass(int class_id) const;
  // Indices (into points()) of points with the given label.
  std::vector<std::size_t> IndicesOfClass(int class_id) const;
  std::vector<std::size_t> ClassCounts() const;

  bool operator==(const Dataset& other) const = default;

 private:
  int class_count_;
  std::size_t dimension_;
  std::vector<LabeledPoint> points_;
};

// One center per class, index = class id.
class ClassCenterSet {
 public:
  explicit ClassCenterSet(std::vector<FeatureVector> centers);

  int class_count() const { return static_cast<int>(centers_.size()); }
  std::size_t dimension() const { return centers_.front().dimension(); }
  const FeatureVector& operator[](int class_id) const;
  const std::vector<FeatureVector>& centers() const { return centers_; }

 private:
  std::vector<FeatureVector> centers_;
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  DimensionMismatchError(std::size_t expected, std::size_t actual);
};

// Euclidean distance. Throws DimensionMismatchError on unequal dimensions.
double L2Distance(const FeatureVector& a, const FeatureVector& b);

// Coordinatewise arithmetic mean. Points are summed in lexicographic order so
// the result does not depend on input order.
FeatureVector MeanCenter(std::span<const FeatureVector> points);

// Per-class mean of the private points. Every class must be non-empty.
ClassCenterSet ClassCenters(const Dataset& data);

}  // namespace pcevolve

#endif  // PCEVOLVE_CORE_H_
