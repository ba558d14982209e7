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

#include "eclipse/backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "eclipse/error.hpp"
#include "eclipse/hashing.hpp"
#include "eclipse/rng.hpp"

namespace eclipse {

using json = nlohmann::ordered_json;

std::string_view FinishReasonName(FinishReason r) {
  switch (r) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kError: return "error";
  }
  return "error";
}

FinishReason ParseFinishReason(std::string_view s) {
  if (s == "stop") return FinishReason::kStop;
  if (s == "length") return FinishReason::kLength;
  return FinishReason::kError;
}

double ScoredAnswer::TotalLogprob() const {
  return std::accumulate(token_logprobs.begin(), token_logprobs.end(), 0.0);
}

json ToJson(const ScoredAnswer& a) {
  return json{{"text", a.text},
              {"token_logprobs", a.token_logprobs},
              {"finish_reason", FinishReasonName(a.finish_reason)}};
}

ScoredAnswer ScoredAnswerFromJson(const json& j) {
  ScoredAnswer a;
  a.text = j.at("text").get<std::string>();
  a.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
  a.finish_reason = ParseFinishReason(j.at("finish_reason").get<std::string>());
  return a;
}

void ValidateScoredAnswer(const ScoredAnswer& a) {
  for (double lp : a.token_logprobs) {
    if (!(lp <= 0.0)) {
      throw Error(Errc::kInvalidArgument, "token logprob must be <= 0");
    }
  }
  if (a.finish_reason != FinishReason::kError && a.token_logprobs.empty()) {
    throw Error(Errc::kEmptyTokenList, "scored answer has no tokens");
  }
}

std::string_view BackendKindName(BackendKind k) {
  return k == BackendKind::kRemote ? "remote" : "synthetic";
}

BackendKind ParseBackendKind(std::string_view s) {
  if (s == "remote") return BackendKind::kRemote;
  if (s == "synthetic") return BackendKind::kSynthetic;
  throw Error(Errc::kInvalidArgument, "unknown backend kind '" + std::string(s) + "'");
}

void BackendConfig::Validate() const {
  if (max_in_flight < 1) {
    throw Error(Errc::kInvalidArgument, "max_in_flight must be >= 1");
  }
  if (timeout_ms < 1) throw Error(Errc::kInvalidArgument, "timeout_ms must be >= 1");
}

void CountingBackend::Reserve(std::uint64_t n) {
  std::uint64_t current = calls_.load();
  for (;;) {
    if (budget_ && current + n > *budget_) {
      throw Error(Errc::kBudgetExceeded,
                  "call ceiling of " + std::to_string(*budget_) + " reached");
    }
    if (calls_.compare_exchange_weak(current, current + n)) return;
  }
}

std::vector<ScoredAnswer> CountingBackend::SampleAnswers(const SampleRequest& request) {
  Reserve(static_cast<std::uint64_t>(std::max(request.k, 0)));
  sample_calls_ += static_cast<std::uint64_t>(std::max(request.k, 0));
  return inner_.SampleAnswers(request);
}

ScoredAnswer CountingBackend::ScoreAnswer(const ScoreRequest& request) {
  Reserve(1);
  ++score_calls_;
  return inner_.ScoreAnswer(request);
}

CachingBackend::CachingBackend(Backend& inner, std::filesystem::path dir)
    : inner_(inner), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

json CachingBackend::SampleKey(const SampleRequest& r, int index) const {
  return json{{"backend", inner_.kind()},  {"model", inner_.model_name()},
              {"call", "sample"},          {"example_id", r.example_id},
              {"query", r.query},          {"evidence", r.evidence},
              {"answer", ""},              {"temperature", r.temperature},
              {"k_index", index}};
}

json CachingBackend::ScoreKey(const ScoreRequest& r) const {
  return json{{"backend", inner_.kind()},
              {"model", inner_.model_name()},
              {"call", "score"},
              {"example_id", r.example_id},
              {"query", r.query},
              {"evidence", r.has_evidence() ? *r.evidence : std::string()},
              {"answer", r.answer},
              {"temperature", 0.0},
              {"k_index", -1}};
}

std::string CachingBackend::KeyHash(const json& key) { return Sha256Hex(key.dump()); }

std::filesystem::path CachingBackend::EntryPath(const std::string& hash) const {
  return dir_ / (hash + ".json");
}

std::optional<ScoredAnswer> CachingBackend::Load(const json& key) const {
  const std::string hash = KeyHash(key);
  const auto path = EntryPath(hash);
  if (!std::filesystem::exists(path)) return std::nullopt;
  json entry;
  try {
    entry = json::parse(ReadFile(path));
  } catch (const json::exception&) {
    throw Error(Errc::kCacheCorrupt, "unparseable cache entry " + path.string());
  }
  if (!entry.contains("request") || !entry.contains("response") ||
      entry.value("key", std::string()) != hash ||
      KeyHash(entry["request"]) != hash ||
      entry.value("response_sha256", std::string()) !=
          Sha256Hex(entry["response"].dump())) {
    throw Error(Errc::kCacheCorrupt, "cache entry fails its hash check: " + path.string());
  }
  try {
    return ScoredAnswerFromJson(entry["response"]);
  } catch (const json::exception&) {
    throw Error(Errc::kCacheCorrupt, "malformed cached response " + path.string());
  }
}

void CachingBackend::Store(const json& key, const ScoredAnswer& value) {
  const std::string hash = KeyHash(key);
  json response = ToJson(value);
  json entry{{"key", hash},
             {"request", key},
             {"response", response},
             {"response_sha256", Sha256Hex(response.dump())}};
  const auto path = EntryPath(hash);
  const auto tmp = dir_ / (hash + ".tmp");
  std::lock_guard<std::mutex> lock(write_mu_);
  WriteFile(tmp, entry.dump());
  std::filesystem::rename(tmp, path);
}

std::vector<ScoredAnswer> CachingBackend::SampleAnswers(const SampleRequest& request) {
  std::vector<ScoredAnswer> cached;
  cached.reserve(static_cast<std::size_t>(std::max(request.k, 0)));
  for (int i = 0; i < request.k; ++i) {
    auto hit = Load(SampleKey(request, i));
    if (!hit) break;
    cached.push_back(std::move(*hit));
  }
  if (static_cast<int>(cached.size()) == request.k) {
    hits_ += static_cast<std::uint64_t>(request.k);
    return cached;
  }
  misses_ += static_cast<std::uint64_t>(request.k);
  auto fresh = inner_.SampleAnswers(request);
  for (int i = 0; i < static_cast<int>(fresh.size()); ++i) {
    Store(SampleKey(request, i), fresh[static_cast<std::size_t>(i)]);
  }
  return fresh;
}

ScoredAnswer CachingBackend::ScoreAnswer(const ScoreRequest& request) {
  const json key = ScoreKey(request);
  if (auto hit = Load(key)) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  auto fresh = inner_.ScoreAnswer(request);
  Store(key, fresh);
  return fresh;
}

ScoredAnswer DegradeToHeuristic(const ScoredAnswer& scored, std::uint64_t seed) {
  ScoredAnswer out = scored;
  const std::size_t n = scored.token_logprobs.size();
  if (n == 0) return out;
  std::size_t digits = 0;
  for (char c : scored.text) digits += std::isdigit(static_cast<unsigned char>(c)) ? 1 : 0;
  const double digit_density =
      scored.text.empty() ? 0.0
                          : static_cast<double>(digits) / static_cast<double>(scored.text.size());
  constexpr double kAnchor = -0.05;
  const double base = 0.6 + 2.0 * digit_density + 0.01 * static_cast<double>(n);
  Rng rng(seed);
  out.token_logprobs[0] = kAnchor;
  for (std::size_t i = 1; i < n; ++i) {
    const double magnitude = std::clamp(base + rng.Normal(0.0, 0.35), -kAnchor, 8.0);
    out.token_logprobs[i] = -magnitude;
  }
  return out;
}

std::vector<ScoredAnswer> DegradingBackend::SampleAnswers(const SampleRequest& request) {
  auto answers = inner_.SampleAnswers(request);
  for (std::size_t i = 0; i < answers.size(); ++i) {
    answers[i] = DegradeToHeuristic(
        answers[i],
        SeedMixer(seed_).Add(request.example_id).Add("sample").Add(i).value());
  }
  return answers;
}

ScoredAnswer DegradingBackend::ScoreAnswer(const ScoreRequest& request) {
  return DegradeToHeuristic(
      inner_.ScoreAnswer(request),
      SeedMixer(seed_)
          .Add(request.example_id)
          .Add(request.has_evidence() ? "score_qe" : "score_q")
          .value());
}

}  // namespace eclipse
