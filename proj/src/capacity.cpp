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

#include "eclipse/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "eclipse/error.hpp"
#include "json.hpp"

namespace eclipse {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "H", "C_eff", "L_Q", "L_QE", "delta_L", "ratio", "p_max"};

}  // namespace

std::string_view FeatureName(Feature f) { return kNames[static_cast<std::size_t>(f)]; }

Feature ParseFeature(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAllFeatures[i];
  }
  throw Error(Errc::kInvalidArgument, "unknown feature: " + std::string(name));
}

double FeatureVector::Get(Feature f) const {
  switch (f) {
    case Feature::kH: return H;
    case Feature::kCEff: return C_eff;
    case Feature::kLQ: return L_Q;
    case Feature::kLQE: return L_QE;
    case Feature::kDeltaL: return delta_L;
    case Feature::kRatio: return ratio;
    case Feature::kPMax: return p_max;
  }
  return 0.0;
}

std::array<double, kFeatureCount> FeatureVector::AsArray() const {
  return {H, C_eff, L_Q, L_QE, delta_L, ratio, p_max};
}

double ConsistencyWeight(const FactSet& answer_facts, const FactSet& evidence_facts) {
  switch (FactsContradict(answer_facts, evidence_facts)) {
    case Contradiction::kNone: return 1.0;
    case Contradiction::kPartial: return 0.5;
    case Contradiction::kTotal: return 0.0;
  }
  return 1.0;
}

FeatureVector ComputeFeatures(const ScoredAnswer& qe_score, const ScoredAnswer& q_score,
                              double entropy, double w_cons) {
  if (qe_score.token_logprobs.empty() || q_score.token_logprobs.empty()) {
    throw Error(Errc::kEmptyTokenList, "scoring returned no answer tokens");
  }
  if (qe_score.text != q_score.text) {
    throw Error(Errc::kAnswerMismatch, "the two scoring passes refer to different answers");
  }
  FeatureVector f;
  f.H = entropy;
  f.w_cons = w_cons;
  f.L_QE = qe_score.TotalLogprob();
  f.L_Q = q_score.TotalLogprob();
  f.delta_L = f.L_QE - f.L_Q;
  f.C_eff = f.delta_L * w_cons;
  f.ratio = std::fabs(f.L_Q) < kRatioGuard ? 1.0 : f.L_QE / f.L_Q;
  const double max_lp =
      *std::max_element(qe_score.token_logprobs.begin(), qe_score.token_logprobs.end());
  f.p_max = std::exp(max_lp);
  return f;
}

std::string FeatureRowToJsonLine(const FeatureRow& row) {
  nlohmann::ordered_json j;
  j["id"] = row.id;
  j["label"] = LabelName(row.label);
  const auto values = row.x.AsArray();
  for (std::size_t i = 0; i < kFeatureCount; ++i) j[std::string(kNames[i])] = values[i];
  j["w_cons"] = row.x.w_cons;
  return j.dump();
}

FeatureRow FeatureRowFromJsonLine(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    FeatureRow row;
    row.id = j.at("id").get<std::string>();
    row.label = ParseLabel(j.at("label").get<std::string>());
    row.x.H = j.at("H").get<double>();
    row.x.C_eff = j.at("C_eff").get<double>();
    row.x.L_Q = j.at("L_Q").get<double>();
    row.x.L_QE = j.at("L_QE").get<double>();
    row.x.delta_L = j.at("delta_L").get<double>();
    row.x.ratio = j.at("ratio").get<double>();
    row.x.p_max = j.at("p_max").get<double>();
    row.x.w_cons = j.at("w_cons").get<double>();
    return row;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParse, std::string("bad feature row: ") + e.what());
  }
}

std::string FeaturesToJsonl(std::span<const FeatureRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    out += FeatureRowToJsonLine(r);
    out += '\n';
  }
  return out;
}

std::vector<FeatureRow> ParseFeaturesJsonl(std::string_view contents) {
  std::vector<FeatureRow> rows;
  for (const auto& line : LoadLines(contents)) rows.push_back(FeatureRowFromJsonLine(line));
  return rows;
}

}  // namespace eclipse
