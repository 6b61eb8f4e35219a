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

#ifndef PCEVOLVE_RNG_H_
#define PCEVOLVE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace pcevolve {

// Seed for an independent sub-stream, keyed by (purpose, iteration, class).
// Every random draw in a run is reachable from one master seed this way.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view purpose,
                         std::uint64_t iteration = 0, std::uint64_t klass = 0);

// Seeded random stream. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; the real-valued transforms are implemented here
// because the std distributions are allowed to differ between library
// vendors, and runs must reproduce bit-for-bit across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::string_view purpose,
      std::uint64_t iteration = 0, std::uint64_t klass = 0)
      : engine_(DeriveSeed(master, purpose, iteration, klass)) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  // Standard normal (Box-Muller, one value cached).
  double Normal();
  double Normal(double mean, double stddev) {
    return mean + stddev * Normal();
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace pcevolve

#endif  // PCEVOLVE_RNG_H_
