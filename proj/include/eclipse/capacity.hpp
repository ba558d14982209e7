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

#ifndef ECLIPSE_CAPACITY_HPP_
#define ECLIPSE_CAPACITY_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/backend.hpp"
#include "eclipse/dataset.hpp"
#include "eclipse/facts.hpp"

namespace eclipse {

enum class Feature { kH, kCEff, kLQ, kLQE, kDeltaL, kRatio, kPMax };

inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::kH,     Feature::kCEff,  Feature::kLQ,  Feature::kLQE,
    Feature::kDeltaL, Feature::kRatio, Feature::kPMax};

std::string_view FeatureName(Feature f);
Feature ParseFeature(std::string_view name);

// Below this |L_Q| the ratio is reported as 1.
inline constexpr double kRatioGuard = 1e-9;

struct FeatureVector {
  double H = 0.0;
  double C_eff = 0.0;
  double L_Q = 0.0;
  double L_QE = 0.0;
  double delta_L = 0.0;
  double ratio = 1.0;
  double p_max = 1.0;
  double w_cons = 1.0;  // audit only, not a detector input

  double Get(Feature f) const;
  std::array<double, kFeatureCount> AsArray() const;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// 1.0 with no contradiction, 0.5 when some facts contradict, 0.0 when all
// compared facts do.
double ConsistencyWeight(const FactSet& answer_facts, const FactSet& evidence_facts);

// Throws kEmptyTokenList when either pass has no tokens and kAnswerMismatch
// when the two passes scored different strings.
FeatureVector ComputeFeatures(const ScoredAnswer& qe_score, const ScoredAnswer& q_score,
                              double entropy, double w_cons);

struct FeatureRow {
  std::string id;
  Label label = Label::kClean;
  FeatureVector x;
  friend bool operator==(const FeatureRow&, const FeatureRow&) = default;
};

std::string FeatureRowToJsonLine(const FeatureRow& row);
FeatureRow FeatureRowFromJsonLine(std::string_view line);
std::string FeaturesToJsonl(std::span<const FeatureRow> rows);
std::vector<FeatureRow> ParseFeaturesJsonl(std::string_view contents);

}  // namespace eclipse

#endif  // ECLIPSE_CAPACITY_HPP_
