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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "eclipse/remote_backend.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "eclipse/error.hpp"
#include "eclipse/hashing.hpp"
#include "httplib.h"

namespace eclipse {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSystemPrompt =
    "Answer the question using only the provided evidence. Be concise.";

std::string UserPrompt(const std::string& query, const std::string& evidence) {
  if (evidence.empty()) return "Question: " + query;
  return "Evidence: " + evidence + "\n\nQuestion: " + query;
}

std::atomic<std::uint64_t> g_requests{0};

struct SemaphoreGuard {
  explicit SemaphoreGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  std::counting_semaphore<>& sem;
};

}  // namespace

std::uint64_t RemoteRequestCount() { return g_requests.load(std::memory_order_relaxed); }

RemoteBackend::RemoteBackend(BackendConfig config, RetryPolicy retry)
    : config_(std::move(config)), retry_(std::move(retry)) {
  config_.Validate();
  if (!retry_.sleep) {
    retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  const std::string& url = config_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::kInvalidArgument, "endpoint_url needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  in_flight_ = std::make_unique<std::counting_semaphore<>>(config_.max_in_flight);
}

RemoteBackend::~RemoteBackend() = default;

ojson RemoteBackend::ChatRequestBody(const SampleRequest& r) const {
  return ojson{
      {"model", config_.model_name},
      {"messages",
       ojson::array({ojson{{"role", "system"}, {"content", kSystemPrompt}},
                     ojson{{"role", "user"}, {"content", UserPrompt(r.query, r.evidence)}}})},
      {"temperature", r.temperature},
      {"max_tokens", config_.max_tokens},
      {"logprobs", true},
      {"top_logprobs", config_.top_logprobs}};
}

std::string RemoteBackend::ScoringPrefix(const ScoreRequest& r) {
  std::string prefix;
  if (r.has_evidence()) prefix += "Evidence: " + *r.evidence + "\n\n";
  prefix += "Question: " + r.query + "\nAnswer:";
  return prefix;
}

ojson RemoteBackend::EchoRequestBody(const ScoreRequest& r) const {
  const std::string prompt = ScoringPrefix(r) + " " + r.answer;
  return ojson{{"model", config_.scoring_model_name.empty() ? config_.model_name
                                                            : config_.scoring_model_name},
               {"prompt", prompt},
               {"max_tokens", 0},
               {"echo", true},
               {"logprobs", config_.top_logprobs},
               {"temperature", 0.0}};
}

ScoredAnswer RemoteBackend::ParseChatResponse(const json& response) {
  ScoredAnswer out;
  try {
    const auto& choice = response.at("choices").at(0);
    out.text = choice.at("message").at("content").get<std::string>();
    out.finish_reason = ParseFinishReason(choice.value("finish_reason", std::string("stop")));
    const auto& lp = choice.at("logprobs");
    if (lp.is_null() || !lp.contains("content") || lp["content"].is_null()) {
      throw Error(Errc::kTokenizationMismatch, "response carries no token logprobs");
    }
    for (const auto& tok : lp["content"]) {
      out.token_logprobs.push_back(std::min(0.0, tok.at("logprob").get<double>()));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kRemoteUnavailable, std::string("malformed chat response: ") + e.what());
  }
  return out;
}

ScoredAnswer RemoteBackend::ParseEchoResponse(const json& response,
                                              std::size_t prefix_length,
                                              const std::string& answer) {
  ScoredAnswer out;
  out.text = answer;
  try {
    const auto& choice = response.at("choices").at(0);
    const auto& lp = choice.at("logprobs");
    if (lp.is_null() || !lp.contains("tokens") || !lp.contains("token_logprobs") ||
        !lp.contains("text_offset")) {
      throw Error(Errc::kTokenizationMismatch, "endpoint did not echo token logprobs");
    }
    const auto& tokens = lp["tokens"];
    const auto& logprobs = lp["token_logprobs"];
    const auto& offsets = lp["text_offset"];
    if (tokens.size() != logprobs.size() || tokens.size() != offsets.size()) {
      throw Error(Errc::kTokenizationMismatch, "echo arrays differ in length");
    }
    // The answer starts after the separator space; the first answer token
    // usually carries that space.
    std::string covered;
    bool aligned = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto offset = offsets[i].get<std::size_t>();
      if (offset < prefix_length) continue;
      if (!aligned && offset != prefix_length) {
        throw Error(Errc::kTokenizationMismatch, "no token boundary at answer start");
      }
      aligned = true;
      if (logprobs[i].is_null()) {
        throw Error(Errc::kTokenizationMismatch, "null logprob inside the answer");
      }
      covered += tokens[i].get<std::string>();
      out.token_logprobs.push_back(std::min(0.0, logprobs[i].get<double>()));
    }
    if (!aligned || covered != " " + answer) {
      throw Error(Errc::kTokenizationMismatch, "echoed tokens do not reproduce the answer");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kTokenizationMismatch,
                std::string("malformed echo response: ") + e.what());
  }
  return out;
}

json RemoteBackend::Post(const std::string& path, const ojson& body, bool scoring) {
  const std::string payload = body.dump();
  const std::string request_hash = Sha256Hex(path + "\n" + payload);
  std::filesystem::path raw_path;
  if (!config_.raw_response_dir.empty()) {
    raw_path = std::filesystem::path(config_.raw_response_dir) / (request_hash + ".json");
    if (std::filesystem::exists(raw_path)) return json::parse(ReadFile(raw_path));
  }

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.credential_env_var.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  std::string last_error;
  auto backoff = retry_.initial_backoff;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      retry_.sleep(backoff);
      backoff *= 2;
    }
    httplib::Result res;
    {
      SemaphoreGuard guard(*in_flight_);
      g_requests.fetch_add(1, std::memory_order_relaxed);
      httplib::Client client(scheme_host_port_);
      const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      res = client.Post(path_prefix_ + path, headers, payload, "application/json");
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      if (scoring && (res->status == 400 || res->status == 404)) {
        throw Error(Errc::kTokenizationMismatch,
                    "endpoint rejected echo scoring (HTTP " + std::to_string(res->status) + ")");
      }
      throw Error(Errc::kRemoteUnavailable, "HTTP " + std::to_string(res->status) + ": " +
                                                res->body.substr(0, 200));
    }
    json parsed;
    try {
      parsed = json::parse(res->body);
    } catch (const json::exception& e) {
      throw Error(Errc::kRemoteUnavailable, std::string("unparseable response: ") + e.what());
    }
    if (!raw_path.empty()) WriteFile(raw_path, res->body);
    return parsed;
  }
  throw Error(Errc::kRemoteUnavailable, "gave up after " +
                                            std::to_string(retry_.max_retries) +
                                            " retries: " + last_error);
}

std::vector<ScoredAnswer> RemoteBackend::SampleAnswers(const SampleRequest& request) {
  if (request.k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (!(request.temperature >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "temperature must be >= 0");
  }
  std::vector<ScoredAnswer> out;
  out.reserve(static_cast<std::size_t>(request.k));
  ojson body = ChatRequestBody(request);
  for (int i = 0; i < request.k; ++i) {
    // The index keeps otherwise identical requests distinct for replay.
    body["user"] = request.example_id + "#" + std::to_string(i);
    out.push_back(ParseChatResponse(Post("/chat/completions", body, false)));
  }
  return out;
}

ScoredAnswer RemoteBackend::ScoreAnswer(const ScoreRequest& request) {
  if (request.answer.empty()) throw Error(Errc::kInvalidArgument, "answer must be nonempty");
  const std::size_t prefix_length = ScoringPrefix(request).size();
  return ParseEchoResponse(Post("/completions", EchoRequestBody(request), true),
                           prefix_length, request.answer);
}

}  // namespace eclipse
