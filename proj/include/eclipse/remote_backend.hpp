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

#ifndef ECLIPSE_REMOTE_BACKEND_HPP_
#define ECLIPSE_REMOTE_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>

#include "eclipse/backend.hpp"
#include "json.hpp"

namespace eclipse {

// Bounded retry with exponential backoff.
struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to sleep_for
};

// HTTP requests attempted by every RemoteBackend in this process, retries
// included.
std::uint64_t RemoteRequestCount();

// OpenAI-compatible HTTP backend.
//
// Sampling posts to {endpoint}/chat/completions with logprobs=true and reads
// choices[0].logprobs.content[].logprob. Scoring echo-scores the answer on
// {endpoint}/completions (echo=true, max_tokens=0) and keeps the tokens whose
// text offsets fall inside the answer; APIs that cannot echo fail with
// kTokenizationMismatch.
class RemoteBackend final : public Backend {
 public:
  explicit RemoteBackend(BackendConfig config, RetryPolicy retry = {});
  ~RemoteBackend() override;

  std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) override;
  ScoredAnswer ScoreAnswer(const ScoreRequest& request) override;
  std::string kind() const override { return "remote"; }
  std::string model_name() const override { return config_.model_name; }

  // Wire formats, exposed for tests.
  nlohmann::ordered_json ChatRequestBody(const SampleRequest& request) const;
  nlohmann::ordered_json EchoRequestBody(const ScoreRequest& request) const;
  static std::string ScoringPrefix(const ScoreRequest& request);
  static ScoredAnswer ParseChatResponse(const nlohmann::json& response);
  static ScoredAnswer ParseEchoResponse(const nlohmann::json& response,
                                        std::size_t prefix_length,
                                        const std::string& answer);

 private:
  nlohmann::json Post(const std::string& path, const nlohmann::ordered_json& body,
                      bool scoring);

  BackendConfig config_;
  RetryPolicy retry_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace eclipse

#endif  // ECLIPSE_REMOTE_BACKEND_HPP_
