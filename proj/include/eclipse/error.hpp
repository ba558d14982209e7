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

#ifndef ECLIPSE_ERROR_HPP_
#define ECLIPSE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace eclipse {

// Failure categories surfaced by the library. The CLI maps each category to
// an exit code, see ExitCodeFor().
enum class Errc {
  kInvalidArgument,
  kIo,
  kParse,
  // qa-dataset
  kNoNumericValue,
  kNoDirectionalClaim,
  kNoEntityFound,
  kEmptyPool,
  kEmptyTemplateList,
  // model-backend
  kRemoteUnavailable,
  kBudgetExceeded,
  kTokenizationMismatch,
  kCacheCorrupt,
  // capacity
  kEmptyTokenList,
  kAnswerMismatch,
  // detector
  kTooFewRows,
  kSingleClass,
  kNonFinite,
  // eval
  kTooFewPerClass,
  kNoPositives,
  kDegenerateResamples,
};

std::string_view ErrcName(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Process exit code for a failure category.
int ExitCodeFor(Errc code);

}  // namespace eclipse

#endif  // ECLIPSE_ERROR_HPP_
