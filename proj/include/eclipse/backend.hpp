/*
 * Copyright 2026 The Eclipse Detector Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ECLIPSE_BACKEND_HPP_
#define ECLIPSE_BACKEND_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace eclipse {

enum class FinishReason { kStop, kLength, kError };

std::string_view FinishReasonName(FinishReason r);
FinishReason ParseFinishReason(std::string_view s);

// An answer with natural-log probabilities, one per answer token.
struct ScoredAnswer {
  std::string text;
  std::vector<double> token_logprobs;
  FinishReason finish_reason = FinishReason::kStop;

  double TotalLogprob() const;
  friend bool operator==(const ScoredAnswer&, const ScoredAnswer&) = default;
};

nlohmann::ordered_json ToJson(const ScoredAnswer& a);
ScoredAnswer ScoredAnswerFromJson(const nlohmann::ordered_json& j);

// Throws kInvalidArgument unless every logprob is <= 0 and non-error results
// carry at least one token.
void ValidateScoredAnswer(const ScoredAnswer& a);

enum class BackendKind { kRemote, kSynthetic };

std::string_view BackendKindName(BackendKind k);
BackendKind ParseBackendKind(std::string_view s);

struct BackendConfig {
  BackendKind kind = BackendKind::kSynthetic;
  std::string endpoint_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-3.5-turbo";
  // Model used for echo-scoring on the completions endpoint; empty means
  // model_name.
  std::string scoring_model_name;
  int max_in_flight = 4;
  int timeout_ms = 30000;
  std::string credential_env_var = "OPENAI_API_KEY";
  int top_logprobs = 1;
  int max_tokens = 256;
  // When set, raw remote responses are persisted here keyed by request hash
  // and replayed on identical requests.
  std::string raw_response_dir;

  void Validate() const;
};

struct SampleRequest {
  std::string example_id;
  std::string query;
  std::string evidence;
  int k = 10;
  double temperature = 0.7;
};

struct ScoreRequest {
  std::string example_id;
  std::string query;
  std::optional<std::string> evidence;  // absent or empty: query-only
  std::string answer;

  bool has_evidence() const { return evidence.has_value() && !evidence->empty(); }
};

// Answer sampling and scoring. Implementations must tolerate concurrent
// calls.
class Backend {
 public:
  virtual ~Backend() = default;

  // Exactly `k` answers conditioned on (query, evidence).
  virtual std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) = 0;

  // Log-probabilities of exactly the answer tokens under the requested
  // conditioning.
  virtual ScoredAnswer ScoreAnswer(const ScoreRequest& request) = 0;

  virtual std::string kind() const = 0;
  virtual std::string model_name() const = 0;
};

// Counts backend calls (k per sampling request, one per scoring request) and
// enforces an optional ceiling.
class CountingBackend final : public Backend {
 public:
  CountingBackend(Backend& inner, std::optional<std::uint64_t> budget = std::nullopt)
      : inner_(inner), budget_(budget) {}

  std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) override;
  ScoredAnswer ScoreAnswer(const ScoreRequest& request) override;
  std::string kind() const override { return inner_.kind(); }
  std::string model_name() const override { return inner_.model_name(); }

  std::uint64_t calls() const { return calls_.load(); }
  std::uint64_t sample_calls() const { return sample_calls_.load(); }
  std::uint64_t score_calls() const { return score_calls_.load(); }

 private:
  void Reserve(std::uint64_t n);

  Backend& inner_;
  std::optional<std::uint64_t> budget_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> sample_calls_{0};
  std::atomic<std::uint64_t> score_calls_{0};
};

// Persists results under `dir`, one JSON file per (request, k-index), keyed
// by a SHA-256 of the request fields. Each entry records its own request so
// tampering is detected on read (kCacheCorrupt).
class CachingBackend final : public Backend {
 public:
  CachingBackend(Backend& inner, std::filesystem::path dir);

  std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) override;
  ScoredAnswer ScoreAnswer(const ScoreRequest& request) override;
  std::string kind() const override { return inner_.kind(); }
  std::string model_name() const override { return inner_.model_name(); }

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }

  // Key material for one cached result.
  nlohmann::ordered_json SampleKey(const SampleRequest& request, int index) const;
  nlohmann::ordered_json ScoreKey(const ScoreRequest& request) const;
  static std::string KeyHash(const nlohmann::ordered_json& key);
  std::filesystem::path EntryPath(const std::string& hash) const;

 private:
  std::optional<ScoredAnswer> Load(const nlohmann::ordered_json& key) const;
  void Store(const nlohmann::ordered_json& key, const ScoredAnswer& value);

  Backend& inner_;
  std::filesystem::path dir_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
  std::mutex write_mu_;
};

// Replaces token logprobs with values derived only from surface features of
// the answer (token count, digit density) plus seeded noise. The first token
// always gets the same value, so the maximum token probability is constant.
ScoredAnswer DegradeToHeuristic(const ScoredAnswer& scored, std::uint64_t seed);

// Applies DegradeToHeuristic to every result of `inner`, seeded per
// (seed, example id, call, index).
class DegradingBackend final : public Backend {
 public:
  DegradingBackend(Backend& inner, std::uint64_t seed) : inner_(inner), seed_(seed) {}

  std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) override;
  ScoredAnswer ScoreAnswer(const ScoreRequest& request) override;
  std::string kind() const override { return inner_.kind(); }
  // Distinct from the inner name so cached results never mix.
  std::string model_name() const override { return "heuristic:" + inner_.model_name(); }

 private:
  Backend& inner_;
  std::uint64_t seed_;
};

}  // namespace eclipse

#endif  // ECLIPSE_BACKEND_HPP_
