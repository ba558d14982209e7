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

#ifndef ECLIPSE_ENTROPY_HPP_
#define ECLIPSE_ENTROPY_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "eclipse/backend.hpp"
#include "eclipse/facts.hpp"
#include "json.hpp"

namespace eclipse {

struct Cluster {
  std::vector<std::size_t> members;  // ascending sample indices
  std::size_t representative = 0;    // first member
  FactSet facts;                     // the representative's facts
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  std::vector<double> probabilities;  // |C_j| / K
  // Samples whose own facts disagree with each other; they are still
  // assigned by representative match on the full fact set.
  std::vector<std::size_t> conflicted;
  std::size_t sample_count = 0;
};

// Entity Jaccard >= 0.5, every numeric sharing an (entity, attribute, unit)
// key within 1%, and no opposite directions on a shared key. When both fact
// sets are empty the raw answers are compared after case normalization.
// An empty fact set never matches a nonempty one; two empty entity sets
// count as full overlap.
bool SameCluster(const FactSet& a, const FactSet& b, std::string_view raw_a,
                 std::string_view raw_b);

double EntityJaccard(const FactSet& a, const FactSet& b);

// Greedy, in sample order: each answer joins the first cluster whose
// representative matches, or founds a new one.
ClusterSet ClusterAnswers(std::span<const ScoredAnswer> answers,
                          std::span<const FactSet> facts);

// Shannon entropy in nats over the cluster probabilities.
double SemanticEntropy(const ClusterSet& clusters);
double EntropyOf(std::span<const double> probabilities);

// Index of the representative of the largest cluster; ties go to the higher
// total logprob, then the lower index.
std::size_t SelectTopAnswerIndex(std::span<const ScoredAnswer> answers,
                                 const ClusterSet& clusters);
const ScoredAnswer& SelectTopAnswer(std::span<const ScoredAnswer> answers,
                                    const ClusterSet& clusters);

nlohmann::ordered_json ClusterSetToJson(const ClusterSet& clusters,
                                        std::span<const ScoredAnswer> answers);

}  // namespace eclipse

#endif  // ECLIPSE_ENTROPY_HPP_
