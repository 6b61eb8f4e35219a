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

#include "pcevolve/http_backend.h"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <json.hpp>
#include <thread>

namespace pcevolve {
namespace wire {
namespace {

using nlohmann::json;

json PointToJson(const LabeledPoint& p) {
  return json{{"class_id", p.class_id},
              {"features", std::vector<double>(p.features.values().begin(),
                                               p.features.values().end())}};
}

LabeledPoint PointFromJson(const json& j, std::size_t index) {
  try {
    const int class_id = j.at("class_id").get<int>();
    if (class_id < 0) throw std::out_of_range("negative class_id");
    return {FeatureVector(j.at("features").get<std::vector<double>>()),
            class_id};
  } catch (const std::exception& e) {
    throw MalformedMessageError("record " + std::to_string(index) + ": " +
                                e.what());
  }
}

json Parse(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedMessageError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename Fn>
auto Guard(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const MalformedMessageError&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedMessageError(e.what());
  }
}

}  // namespace

std::string EncodeInitRequest(const InitRequest& request) {
  json j{{"per_class", request.per_class},
         {"prompt",
          {{"domain", request.prompt.domain_name},
           {"labels", request.prompt.class_labels}}},
         {"seed", request.seed}};
  return j.dump();
}

InitRequest DecodeInitRequest(const std::string& body) {
  const json j = Parse(body);
  return Guard([&] {
    InitRequest r;
    r.prompt.domain_name = j.at("prompt").at("domain").get<std::string>();
    r.prompt.class_labels =
        j.at("prompt").at("labels").get<std::vector<std::string>>();
    r.per_class = j.at("per_class").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  });
}

std::string EncodeRefineRequest(const RefineRequest& request) {
  json protos = json::array();
  for (const LabeledPoint& p : request.prototypes) {
    protos.push_back(PointToJson(p));
  }
  json j{{"per_class", request.per_class},
         {"prototypes", std::move(protos)},
         {"seed", request.seed},
         {"strength", request.strength}};
  return j.dump();
}

RefineRequest DecodeRefineRequest(const std::string& body) {
  const json j = Parse(body);
  return Guard([&] {
    RefineRequest r;
    const json& protos = j.at("prototypes");
    if (!protos.is_array()) throw MalformedMessageError("prototypes");
    for (std::size_t i = 0; i < protos.size(); ++i) {
      r.prototypes.push_back(PointFromJson(protos[i], i));
    }
    r.per_class = j.at("per_class").get<int>();
    r.strength = j.at("strength").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  });
}

std::string EncodeCandidates(std::span<const LabeledPoint> candidates) {
  json arr = json::array();
  for (const LabeledPoint& p : candidates) arr.push_back(PointToJson(p));
  return json{{"candidates", std::move(arr)}}.dump();
}

std::vector<LabeledPoint> DecodeCandidates(const std::string& body) {
  const json j = Parse(body);
  return Guard([&] {
    const json& arr = j.at("candidates");
    if (!arr.is_array()) {
      throw MalformedMessageError("candidates is not an array");
    }
    std::vector<LabeledPoint> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
      out.push_back(PointFromJson(arr[i], i));
    }
    return out;
  });
}

Dataset CandidatesToDataset(std::span<const LabeledPoint> candidates,
                            int class_count) {
  if (candidates.empty()) throw MalformedMessageError("no candidates");
  return Guard([&] {
    Dataset out(class_count, candidates.front().features.dimension());
    for (const LabeledPoint& p : candidates) out.Add(p);
    return out;
  });
}

}  // namespace wire

std::chrono::milliseconds RetryPolicy::BackoffBefore(int retry) const {
  const double scale = std::pow(multiplier, retry - 1);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(initial_backoff.count() * scale));
}

HttpBackend::HttpBackend(HttpBackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.base_url.empty()) {
    throw std::invalid_argument("http backend needs a base_url");
  }
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

Dataset HttpBackend::Post(const std::string& path, const std::string& body,
                          int class_count) {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  std::string last_error;
  last_attempts_ = 0;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto wait = config_.retry.BackoffBefore(attempt);
      spdlog::warn("{} attempt {} failed ({}); retrying in {} ms", path,
                   attempt, last_error, wait.count());
      sleeper_(wait);
    }
    ++last_attempts_;
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      return wire::CandidatesToDataset(wire::DecodeCandidates(res->body),
                                       class_count);
    } catch (const wire::MalformedMessageError& e) {
      last_error = std::string("malformed body: ") + e.what();
    }
  }
  throw BackendError(path + " failed after " + std::to_string(last_attempts_) +
                     " attempts: " + last_error);
}

Dataset HttpBackend::Init(const PromptSpec& prompt, int per_class,
                          std::uint64_t seed) {
  const std::string body =
      wire::EncodeInitRequest({prompt, per_class, seed});
  return Post("/v1/init", body, prompt.class_count());
}

Dataset HttpBackend::Refine(std::span<const LabeledPoint> prototypes,
                            int per_class, double strength,
                            std::uint64_t seed) {
  wire::RefineRequest request;
  request.prototypes.assign(prototypes.begin(), prototypes.end());
  request.per_class = per_class;
  request.strength = strength;
  request.seed = seed;
  return Post("/v1/refine", wire::EncodeRefineRequest(request),
              static_cast<int>(prototypes.size()));
}

}  // namespace pcevolve
