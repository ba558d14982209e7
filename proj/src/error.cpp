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

#include "eclipse/error.hpp"

namespace eclipse {

std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kIo: return "Io";
    case Errc::kParse: return "Parse";
    case Errc::kNoNumericValue: return "NoNumericValue";
    case Errc::kNoDirectionalClaim: return "NoDirectionalClaim";
    case Errc::kNoEntityFound: return "NoEntityFound";
    case Errc::kEmptyPool: return "EmptyPool";
    case Errc::kEmptyTemplateList: return "EmptyTemplateList";
    case Errc::kRemoteUnavailable: return "RemoteUnavailable";
    case Errc::kBudgetExceeded: return "BudgetExceeded";
    case Errc::kTokenizationMismatch: return "TokenizationMismatch";
    case Errc::kCacheCorrupt: return "CacheCorrupt";
    case Errc::kEmptyTokenList: return "EmptyTokenList";
    case Errc::kAnswerMismatch: return "AnswerMismatch";
    case Errc::kTooFewRows: return "TooFewRows";
    case Errc::kSingleClass: return "SingleClass";
    case Errc::kNonFinite: return "NonFinite";
    case Errc::kTooFewPerClass: return "TooFewPerClass";
    case Errc::kNoPositives: return "NoPositives";
    case Errc::kDegenerateResamples: return "DegenerateResamples";
  }
  return "Unknown";
}

int ExitCodeFor(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument:
      return 2;
    case Errc::kIo:
    case Errc::kParse:
    case Errc::kCacheCorrupt:
      return 3;
    case Errc::kNoNumericValue:
    case Errc::kNoDirectionalClaim:
    case Errc::kNoEntityFound:
    case Errc::kEmptyPool:
    case Errc::kEmptyTemplateList:
      return 4;
    case Errc::kRemoteUnavailable:
    case Errc::kTokenizationMismatch:
      return 5;
    case Errc::kBudgetExceeded:
      return 6;
    case Errc::kEmptyTokenList:
    case Errc::kAnswerMismatch:
    case Errc::kTooFewRows:
    case Errc::kSingleClass:
    case Errc::kNonFinite:
    case Errc::kTooFewPerClass:
    case Errc::kNoPositives:
    case Errc::kDegenerateResamples:
      return 7;
  }
  return 1;
}

}  // namespace eclipse
