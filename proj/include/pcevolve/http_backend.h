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

#ifndef PCEVOLVE_HTTP_BACKEND_H_
#define PCEVOLVE_HTTP_BACKEND_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcevolve/core.h"
#include "pcevolve/generator.h"

namespace pcevolve {

// JSON bodies exchanged with a remote generation service:
//   POST /v1/init   {"per_class", "prompt": {"domain", "labels"}, "seed"}
//   POST /v1/refine {"per_class", "prototypes": [...], "seed", "strength"}
//   response        {"candidates": [{"class_id", "features": [...]}]}
// Encoders emit compact JSON with keys in lexicographic order, so a decoded
// message re-encodes to the same bytes.
namespace wire {

struct InitRequest {
  PromptSpec prompt;
  int per_class = 0;
  std::uint64_t seed = 0;
};

struct RefineRequest {
  std::vector<LabeledPoint> prototypes;
  int per_class = 0;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

// Thrown for bodies that do not match the schema.
class MalformedMessageError : public BackendError {
 public:
  using BackendError::BackendError;
};

std::string EncodeInitRequest(const InitRequest& request);
InitRequest DecodeInitRequest(const std::string& body);

std::string EncodeRefineRequest(const RefineRequest& request);
RefineRequest DecodeRefineRequest(const std::string& body);

std::string EncodeCandidates(std::span<const LabeledPoint> candidates);
// class_ids must fall in [0, class_count).
std::vector<LabeledPoint> DecodeCandidates(const std::string& body);
Dataset CandidatesToDataset(std::span<const LabeledPoint> candidates,
                            int class_count);

}  // namespace wire

struct RetryPolicy {
  // Retries after the first attempt.
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;

  std::chrono::milliseconds BackoffBefore(int retry) const;
};

struct HttpBackendConfig {
  // e.g. "http://127.0.0.1:8080"
  std::string base_url;
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
};

// Generation backend talking to a remote service. Only DP-released
// prototypes ever leave the process. Non-2xx statuses, transport failures
// and malformed bodies are retried per the policy, then surface as
// BackendError.
class HttpBackend : public GeneratorBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {});

  Dataset Init(const PromptSpec& prompt, int per_class,
               std::uint64_t seed) override;
  Dataset Refine(std::span<const LabeledPoint> prototypes, int per_class,
                 double strength, std::uint64_t seed) override;

  // Attempts made by the most recent call (1 + retries).
  int last_attempts() const { return last_attempts_; }

 private:
  Dataset Post(const std::string& path, const std::string& body,
               int class_count);

  HttpBackendConfig config_;
  Sleeper sleeper_;
  int last_attempts_ = 0;
};

}  // namespace pcevolve

#endif  // PCEVOLVE_HTTP_BACKEND_H_
