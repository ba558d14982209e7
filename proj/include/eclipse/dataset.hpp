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

#ifndef ECLIPSE_DATASET_HPP_
#define ECLIPSE_DATASET_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/facts.hpp"

namespace eclipse {

enum class Label { kClean, kHallucinated };

enum class Perturbation {
  kNone,
  kWrongNumber,
  kEntitySwap,
  kContradiction,
  kFabrication,
};

std::string_view LabelName(Label l);
Label ParseLabel(std::string_view s);
std::string_view PerturbationName(Perturbation p);
Perturbation ParsePerturbation(std::string_view s);

struct QAExample {
  std::string id;
  std::string query;
  std::string evidence;
  std::string answer;
  Label label = Label::kClean;
  Perturbation perturbation = Perturbation::kNone;
  std::string source_id;  // clean twin of a hallucinated example

  friend bool operator==(const QAExample&, const QAExample&) = default;
};

// Fractions over the four perturbation types.
struct TaxonomyMix {
  double wrong_number = 0.35;
  double entity_swap = 0.25;
  double contradiction = 0.25;
  double fabrication = 0.15;

  double Get(Perturbation p) const;
  // Throws kInvalidArgument unless all fractions are >= 0 and sum to 1.
  void Validate() const;
  // "wrong_number=0.35,entity_swap=0.25,..." ; omitted types are zero.
  static TaxonomyMix Parse(std::string_view spec);
};

// Perturbation types in declaration order.
inline constexpr std::array<Perturbation, 4> kPerturbationTypes = {
    Perturbation::kWrongNumber, Perturbation::kEntitySwap,
    Perturbation::kContradiction, Perturbation::kFabrication};

// Order tried when the assigned perturbation does not apply to an example.
inline constexpr std::array<Perturbation, 4> kFallbackOrder = {
    Perturbation::kWrongNumber, Perturbation::kContradiction,
    Perturbation::kEntitySwap, Perturbation::kFabrication};

struct DatasetManifest {
  std::vector<QAExample> examples;
  std::uint64_t seed = 0;
  TaxonomyMix taxonomy_mix;
};

// Inputs the entity-swap and fabrication perturbations draw from.
struct PerturbationResources {
  const Lexicon* lexicon = nullptr;
  std::vector<std::string> entity_pool;     // defaults to every lexicon name
  std::vector<std::string> fact_templates;  // see PerturbFabrication
};

// Replaces one numeric value v with v * (1 + delta), |delta| ~ U[0.10, 0.50],
// keeping the number's formatting.
QAExample PerturbWrongNumber(const QAExample& example, std::uint64_t rng_seed);

// Deterministic core of PerturbWrongNumber: scales the `mention`-th
// non-year numeric of the answer by (1 + delta).
QAExample ScaleAnswerNumber(const QAExample& example, std::size_t mention,
                            double delta);

// Inverts the first up/down directional keyword of the answer.
QAExample PerturbContradiction(const QAExample& example);

// Swaps one lexicon entity of the answer for a same-category entity from
// `entity_pool` that the evidence does not mention.
QAExample PerturbEntitySwap(const QAExample& example,
                            std::span<const std::string> entity_pool,
                            const Lexicon& lexicon, std::uint64_t rng_seed);

// Appends one sentence built from a template. Placeholders: {company},
// {person}, {metric}, {number}. Fillers are chosen so that no entity, metric
// or number in the sentence appears in the evidence.
QAExample PerturbFabrication(const QAExample& example,
                             std::span<const std::string> fact_templates,
                             const Lexicon& lexicon, std::uint64_t rng_seed);

QAExample ApplyPerturbation(const QAExample& example, Perturbation type,
                            const PerturbationResources& resources,
                            std::uint64_t rng_seed);

// Per-type counts for n twins: largest-remainder rounding of mix * n.
std::array<std::size_t, 4> MixCounts(const TaxonomyMix& mix, std::size_t n);

// One hallucinated twin per clean example.
DatasetManifest BuildDataset(std::span<const QAExample> clean_examples,
                             const TaxonomyMix& mix, std::uint64_t seed,
                             const PerturbationResources& resources);

// Checks the class-balance, twin and label/perturbation invariants.
void ValidateManifest(const DatasetManifest& manifest);

// JSONL: a manifest header line {"manifest": {...}} followed by one example
// per line.
std::string DatasetToJsonl(const DatasetManifest& manifest);
std::string ExampleToJsonLine(const QAExample& example);

struct ParsedDataset {
  std::optional<DatasetManifest> header;  // examples left empty
  std::vector<QAExample> examples;
};
ParsedDataset ParseDatasetJsonl(std::string_view jsonl);

std::vector<std::string> LoadLines(std::string_view contents);

// A deterministic corpus of clean financial QA examples built from the
// lexicon's companies and executives. Every answer carries an entity, a
// numeric value and a directional claim.
std::vector<QAExample> GenerateCleanCorpus(std::size_t n, std::uint64_t seed);

// Lexicon and fabrication templates matching GenerateCleanCorpus.
Lexicon DefaultLexicon();
std::string DefaultLexiconTsv();
std::vector<std::string> DefaultFabricationTemplates();

}  // namespace eclipse

#endif  // ECLIPSE_DATASET_HPP_
