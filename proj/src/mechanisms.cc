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

#include "pcevolve/mechanisms.h"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <numeric>

namespace pcevolve {
namespace {

using Wide = __int128;

std::int64_t Narrow(Wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("rational arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

Wide WideGcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational Reduce(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const Wide g = WideGcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(Narrow(num), Narrow(den));
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator)
    : num_(numerator), den_(denominator) {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rational Rational::FromDouble(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("cannot represent non-finite value exactly");
  }
  if (std::abs(value) > 1e15) {
    throw std::overflow_error("value too large for exact accounting");
  }
  // Continued-fraction convergents; stop at the first one that reproduces
  // the double exactly.
  constexpr std::int64_t kMaxDenominator = 1'000'000'000'000;
  const bool negative = value < 0;
  const double x = std::abs(value);
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  while (static_cast<double>(h) / static_cast<double>(k) != x && frac > 0) {
    const double inv = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    const Wide h_next = static_cast<Wide>(a) * h + h_prev;
    const Wide k_next = static_cast<Wide>(a) * k + k_prev;
    if (k_next > kMaxDenominator) break;
    h_prev = h;
    k_prev = k;
    h = static_cast<std::int64_t>(h_next);
    k = static_cast<std::int64_t>(k_next);
    frac = inv - std::floor(inv);
  }
  return Rational(negative ? -h : h, k);
}

std::string Rational::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
  return Reduce(static_cast<Wide>(num_) * o.den_ + static_cast<Wide>(o.num_) * den_,
                static_cast<Wide>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return Reduce(static_cast<Wide>(num_) * o.den_ - static_cast<Wide>(o.num_) * den_,
                static_cast<Wide>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return Reduce(static_cast<Wide>(num_) * o.num_,
                static_cast<Wide>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  return Reduce(static_cast<Wide>(num_) * o.den_,
                static_cast<Wide>(den_) * o.num_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const Wide lhs = static_cast<Wide>(num_) * o.den_;
  const Wide rhs = static_cast<Wide>(o.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

void PrivacyParams::Validate() const {
  if (!(epsilon_total > 0) || !std::isfinite(epsilon_total)) {
    throw std::invalid_argument("epsilon_total must be finite and > 0");
  }
  if (!(delta >= 0 && delta <= 1)) {
    throw std::invalid_argument("delta must lie in [0, 1]");
  }
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (class_count < 2) throw std::invalid_argument("class_count must be >= 2");
}

Rational PrivacyParams::PerQueryEpsilon() const {
  Validate();
  return TotalEpsilon() /
         Rational(static_cast<std::int64_t>(iterations) * class_count);
}

BudgetLedger::BudgetLedger(Rational total) : total_(total) {
  if (total_ <= Rational(0)) {
    throw std::invalid_argument("ledger total must be > 0");
  }
}

BudgetLedger::BudgetLedger(const BudgetLedger& other) : total_(other.total_) {
  std::lock_guard<std::mutex> lock(other.mu_);
  spent_ = other.spent_;
  log_ = other.log_;
}

BudgetLedger& BudgetLedger::operator=(const BudgetLedger& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  total_ = other.total_;
  spent_ = other.spent_;
  log_ = other.log_;
  return *this;
}

void BudgetLedger::Charge(std::string label, Rational epsilon) {
  if (epsilon < Rational(0)) {
    throw std::invalid_argument("negative privacy charge for '" + label + "'");
  }
  std::lock_guard<std::mutex> lock(mu_);
  const Rational next = spent_ + epsilon;
  if (next > total_) {
    throw BudgetExceededError(
        "privacy budget exceeded by charge '" + label + "' (" +
        epsilon.ToString() + "): spent " + spent_.ToString() + " of " +
        total_.ToString());
  }
  spent_ = next;
  log_.push_back({std::move(label), epsilon});
}

Rational BudgetLedger::spent() const {
  std::lock_guard<std::mutex> lock(mu_);
  return spent_;
}

Rational BudgetLedger::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  return total_ - spent_;
}

std::vector<BudgetLedger::Entry> BudgetLedger::log() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

std::size_t BudgetLedger::charge_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_.size();
}

double GmSigma(double sensitivity, double epsilon, double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("gaussian mechanism needs epsilon > 0");
  }
  if (!(delta > 0 && delta < 1)) {
    throw std::invalid_argument("gaussian mechanism needs delta in (0, 1)");
  }
  if (!(sensitivity >= 0) || !std::isfinite(sensitivity)) {
    throw std::invalid_argument("sensitivity must be finite and >= 0");
  }
  if (epsilon >= 1) {
    spdlog::warn("gaussian mechanism at epsilon={} >= 1: the classic sigma "
                 "bound is only proven for epsilon < 1",
                 epsilon);
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

std::vector<double> GmPerturb(std::span<const double> values, double sigma,
                              Rng& rng) {
  if (!(sigma >= 0)) throw std::invalid_argument("sigma must be >= 0");
  std::vector<double> out(values.begin(), values.end());
  if (sigma == 0) return out;
  for (double& v : out) v += sigma * rng.Normal();
  return out;
}

UtilityScores::UtilityScores(std::vector<double> scores)
    : scores_(std::move(scores)) {
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (!(scores_[i] >= 0.0 && scores_[i] <= 1.0)) {
      throw std::invalid_argument("utility " + std::to_string(i) +
                                  " outside [0, 1]");
    }
  }
}

std::vector<double> EmProbabilities(const UtilityScores& scores,
                                    double epsilon, double sensitivity) {
  if (scores.empty()) {
    throw std::invalid_argument("exponential mechanism over no candidates");
  }
  if (!(sensitivity > 0)) {
    throw std::invalid_argument("exponential mechanism needs sensitivity > 0");
  }
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("exponential mechanism needs epsilon >= 0");
  }
  const double scale = epsilon / (2.0 * sensitivity);
  std::vector<double> logits(scores.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    logits[i] = scale * scores[i];
    max_logit = std::max(max_logit, logits[i]);
  }
  double total = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    total += l;
  }
  for (double& l : logits) l /= total;
  return logits;
}

EmDraw EmSample(const UtilityScores& scores, double epsilon,
                double sensitivity, Rng& rng) {
  EmDraw draw;
  draw.probabilities = EmProbabilities(scores, epsilon, sensitivity);
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < draw.probabilities.size(); ++i) {
    cumulative += draw.probabilities[i];
    if (u < cumulative) {
      draw.index = i;
      return draw;
    }
  }
  // Rounding left u above the final cumulative sum: take the last candidate
  // with nonzero mass.
  for (std::size_t i = draw.probabilities.size(); i-- > 0;) {
    if (draw.probabilities[i] > 0) {
      draw.index = i;
      break;
    }
  }
  return draw;
}

}  // namespace pcevolve
