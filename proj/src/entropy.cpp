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

#include "eclipse/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <tuple>

#include "eclipse/error.hpp"
#include "eclipse/text.hpp"

namespace eclipse {

namespace {

using NumericKey = std::tuple<std::string, std::string, std::string>;
using DirectionKey = std::pair<std::string, std::string>;

std::map<NumericKey, std::vector<double>> NumericsByKey(const FactSet& f) {
  std::map<NumericKey, std::vector<double>> out;
  for (const auto& n : f.numerics) out[{n.entity, n.attribute, n.unit}].push_back(n.value);
  return out;
}

std::map<DirectionKey, std::set<Polarity>> DirectionsByKey(const FactSet& f) {
  std::map<DirectionKey, std::set<Polarity>> out;
  for (const auto& d : f.directions) out[{d.entity, d.attribute}].insert(d.polarity);
  return out;
}

bool EveryValueClose(const std::vector<double>& xs, const std::vector<double>& ys) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) {
    return std::any_of(ys.begin(), ys.end(), [&](double y) { return NumericClose(x, y); });
  });
}

}  // namespace

double EntityJaccard(const FactSet& a, const FactSet& b) {
  std::set<EntityRef> sa(a.entities.begin(), a.entities.end());
  std::set<EntityRef> sb(b.entities.begin(), b.entities.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::vector<EntityRef> inter;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
  const double uni = static_cast<double>(sa.size() + sb.size() - inter.size());
  return static_cast<double>(inter.size()) / uni;
}

bool SameCluster(const FactSet& a, const FactSet& b, std::string_view raw_a,
                 std::string_view raw_b) {
  if (a.empty() && b.empty()) {
    return text::NormalizeForMatch(raw_a) == text::NormalizeForMatch(raw_b);
  }
  if (a.empty() != b.empty()) return false;
  if (EntityJaccard(a, b) < 0.5) return false;

  const auto na = NumericsByKey(a);
  const auto nb = NumericsByKey(b);
  for (const auto& [key, xs] : na) {
    const auto it = nb.find(key);
    if (it == nb.end()) continue;
    if (!EveryValueClose(xs, it->second) || !EveryValueClose(it->second, xs)) return false;
  }

  const auto da = DirectionsByKey(a);
  const auto db = DirectionsByKey(b);
  for (const auto& [key, pa] : da) {
    const auto it = db.find(key);
    if (it == db.end()) continue;
    if (pa != it->second) return false;
  }
  return true;
}

ClusterSet ClusterAnswers(std::span<const ScoredAnswer> answers,
                          std::span<const FactSet> facts) {
  if (answers.empty()) throw Error(Errc::kInvalidArgument, "need at least one answer");
  if (answers.size() != facts.size()) {
    throw Error(Errc::kInvalidArgument, "answers and fact sets differ in length");
  }
  ClusterSet out;
  out.sample_count = answers.size();
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (HasInternalConflict(facts[i])) out.conflicted.push_back(i);
    bool placed = false;
    for (auto& c : out.clusters) {
      const std::size_t r = c.representative;
      if (SameCluster(facts[r], facts[i], answers[r].text, answers[i].text)) {
        c.members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) out.clusters.push_back({{i}, i, facts[i]});
  }
  const double k = static_cast<double>(answers.size());
  for (const auto& c : out.clusters) {
    out.probabilities.push_back(static_cast<double>(c.members.size()) / k);
  }
  return out;
}

double EntropyOf(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double SemanticEntropy(const ClusterSet& clusters) {
  return EntropyOf(clusters.probabilities);
}

std::size_t SelectTopAnswerIndex(std::span<const ScoredAnswer> answers,
                                 const ClusterSet& clusters) {
  if (clusters.clusters.empty()) throw Error(Errc::kInvalidArgument, "no clusters");
  const Cluster* best = nullptr;
  double best_logprob = 0.0;
  for (const auto& c : clusters.clusters) {
    if (c.representative >= answers.size()) {
      throw Error(Errc::kInvalidArgument, "cluster refers to a missing answer");
    }
    const double lp = answers[c.representative].TotalLogprob();
    const bool better =
        best == nullptr || c.members.size() > best->members.size() ||
        (c.members.size() == best->members.size() &&
         (lp > best_logprob ||
          (lp == best_logprob && c.representative < best->representative)));
    if (better) {
      best = &c;
      best_logprob = lp;
    }
  }
  return best->representative;
}

const ScoredAnswer& SelectTopAnswer(std::span<const ScoredAnswer> answers,
                                    const ClusterSet& clusters) {
  return answers[SelectTopAnswerIndex(answers, clusters)];
}

nlohmann::ordered_json ClusterSetToJson(const ClusterSet& clusters,
                                        std::span<const ScoredAnswer> answers) {
  nlohmann::ordered_json out;
  out["sample_count"] = clusters.sample_count;
  out["entropy"] = SemanticEntropy(clusters);
  auto& list = out["clusters"] = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < clusters.clusters.size(); ++j) {
    const auto& c = clusters.clusters[j];
    nlohmann::ordered_json triples = nlohmann::ordered_json::array();
    for (const auto& t : c.facts.triples) triples.push_back({t.entity, t.attribute, t.value});
    list.push_back({{"members", c.members},
                    {"representative", c.representative},
                    {"representative_text", c.representative < answers.size()
                                                ? answers[c.representative].text
                                                : std::string()},
                    {"probability", clusters.probabilities[j]},
                    {"triples", triples}});
  }
  out["conflicted"] = clusters.conflicted;
  return out;
}

}  // namespace eclipse
