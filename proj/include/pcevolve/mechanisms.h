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

#ifndef PCEVOLVE_MECHANISMS_H_
#define PCEVOLVE_MECHANISMS_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcevolve/rng.h"

namespace pcevolve {

// Exact fraction used for privacy accounting. Always normalized with a
// positive denominator. Arithmetic throws std::overflow_error rather than
// wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator = 1);

  // Exact when `value` is a small dyadic or decimal-looking number (8, 0.5,
  // 0.1 -> 1/10); otherwise the closest fraction with denominator <= 1e12.
  static Rational FromDouble(double value);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  std::string ToString() const;

  Rational operator+(const Rational& other) const;
  Rational operator-(const Rational& other) const;
  Rational operator*(const Rational& other) const;
  Rational operator/(const Rational& other) const;
  Rational& operator+=(const Rational& other) { return *this = *this + other; }

  bool operator==(const Rational& other) const = default;
  std::strong_ordering operator<=>(const Rational& other) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct PrivacyParams {
  double epsilon_total = 8.0;
  double delta = 1e-5;
  int iterations = 20;
  int class_count = 2;

  // Throws std::invalid_argument when any field is out of range.
  void Validate() const;
  // epsilon_total / (iterations * class_count), exactly.
  Rational PerQueryEpsilon() const;
  Rational TotalEpsilon() const { return Rational::FromDouble(epsilon_total); }
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sequential-composition accountant. Charges are serialized; spent never
// exceeds total and always equals the sum of the charge log.
class BudgetLedger {
 public:
  struct Entry {
    std::string label;
    Rational epsilon;
  };

  explicit BudgetLedger(Rational total);
  BudgetLedger(const BudgetLedger& other);
  BudgetLedger& operator=(const BudgetLedger& other);

  // Appends a charge. Negative epsilon -> std::invalid_argument; a charge
  // that would push spent past total -> BudgetExceededError, ledger unchanged.
  void Charge(std::string label, Rational epsilon);

  Rational total() const { return total_; }
  Rational spent() const;
  Rational remaining() const;
  std::vector<Entry> log() const;
  std::size_t charge_count() const;

 private:
  Rational total_;
  mutable std::mutex mu_;
  Rational spent_;
  std::vector<Entry> log_;
};

// sigma = sensitivity * sqrt(2 ln(1.25 / delta)) / epsilon. Requires
// epsilon > 0, delta in (0, 1), sensitivity >= 0. Logs a warning when
// epsilon >= 1, outside the range where the classic bound is proven.
double GmSigma(double sensitivity, double epsilon, double delta);

// values + i.i.d. N(0, sigma^2) per coordinate.
std::vector<double> GmPerturb(std::span<const double> values, double sigma,
                              Rng& rng);

// Per-candidate utilities in [0, 1].
class UtilityScores {
 public:
  UtilityScores() = default;
  explicit UtilityScores(std::vector<double> scores);

  std::span<const double> values() const { return scores_; }
  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }
  double operator[](std::size_t i) const { return scores_[i]; }

 private:
  std::vector<double> scores_;
};

// Pr[r] proportional to exp(epsilon * u_r / (2 * sensitivity)), computed with
// a max-shifted softmax.
std::vector<double> EmProbabilities(const UtilityScores& scores,
                                    double epsilon, double sensitivity);

struct EmDraw {
  std::size_t index = 0;
  std::vector<double> probabilities;
};

EmDraw EmSample(const UtilityScores& scores, double epsilon,
                double sensitivity, Rng& rng);

}  // namespace pcevolve

#endif  // PCEVOLVE_MECHANISMS_H_
