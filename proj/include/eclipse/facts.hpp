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

#ifndef ECLIPSE_FACTS_HPP_
#define ECLIPSE_FACTS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/text.hpp"

namespace eclipse {

enum class EntityCategory { kCompany, kPerson };

std::string_view CategoryName(EntityCategory c);
std::optional<EntityCategory> ParseCategory(std::string_view s);

// Known entity names with their category. Matching is case-insensitive and
// token-aligned; the longest entry wins at each position.
class Lexicon {
 public:
  struct Entry {
    std::string name;       // display form, e.g. "Satya Nadella"
    std::string canonical;  // case-folded, e.g. "satya nadella"
    EntityCategory category;
    std::vector<std::string> words;  // canonical split on whitespace
  };

  struct Match {
    const Entry* entry = nullptr;
    std::size_t token_count = 0;
  };

  Lexicon() = default;

  // "name<TAB>category" per line; blank lines and '#' comments are skipped.
  static Lexicon Parse(std::string_view tsv);
  static Lexicon Load(const std::filesystem::path& path);

  void Add(std::string name, EntityCategory category);

  const Entry* Find(std::string_view name) const;
  std::vector<const Entry*> ByCategory(EntityCategory category) const;
  const std::vector<Entry>& entries() const { return entries_; }

  std::optional<Match> MatchAt(const std::vector<text::Token>& tokens,
                               std::size_t index) const;

 private:
  std::vector<Entry> entries_;
};

enum class Polarity { kUp, kDown, kStable };

std::string_view PolarityName(Polarity p);

struct EntityRef {
  std::string name;  // canonical
  EntityCategory category;
  friend bool operator==(const EntityRef&, const EntityRef&) = default;
  friend auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

struct NumericFact {
  double value = 0.0;  // scaled, three significant figures
  std::string unit;    // "USD", "%" or ""
  std::string attribute;
  std::string entity;  // canonical entity name, "" when none is in scope
  friend bool operator==(const NumericFact&, const NumericFact&) = default;
};

struct DirectionalClaim {
  std::string entity;
  std::string attribute;
  Polarity polarity = Polarity::kStable;
  friend bool operator==(const DirectionalClaim&, const DirectionalClaim&) = default;
};

struct FactTriple {
  std::string entity;
  std::string attribute;
  std::string value;  // compact rendering, e.g. "211B"
  friend bool operator==(const FactTriple&, const FactTriple&) = default;
};

struct FactSet {
  std::vector<EntityRef> entities;  // sorted, unique
  std::vector<NumericFact> numerics;
  std::vector<DirectionalClaim> directions;
  std::vector<FactTriple> triples;

  bool empty() const {
    return entities.empty() && numerics.empty() && directions.empty();
  }
  friend bool operator==(const FactSet&, const FactSet&) = default;
};

// Numeric attributes are linked to the nearest financial keyword at most this
// many tokens away.
inline constexpr std::size_t kAttributeWindow = 8;
// Relative tolerance for numeric agreement.
inline constexpr double kNumericTolerance = 0.01;

FactSet ExtractFacts(std::string_view text, const Lexicon& lexicon);

// Sorted copy; two fact sets describe the same facts iff their canonical
// forms are equal.
FactSet Canonicalize(FactSet facts);

// Templated sentences whose extraction reproduces `facts`.
std::string RenderFacts(const FactSet& facts);

// Relative error against max(|a|, |b|); zero against zero is equal.
bool NumericClose(double a, double b, double tolerance = kNumericTolerance);

std::optional<Polarity> DirectionOf(std::string_view lower_word);
// Canonical attribute for a keyword phrase, e.g. "revenues" -> "revenue".
std::optional<std::string> CanonicalAttribute(std::string_view lower_phrase);
// All canonical attributes the extractor knows.
const std::vector<std::string>& KnownAttributes();

enum class Contradiction { kNone, kPartial, kTotal };

std::string_view ContradictionName(Contradiction c);

// Compares the facts of `claim` (an answer) against `reference` (evidence)
// on matching (entity, attribute) keys.
Contradiction FactsContradict(const FactSet& claim, const FactSet& reference);

// True when one fact set asserts two incompatible facts on the same key.
bool HasInternalConflict(const FactSet& facts);

}  // namespace eclipse

#endif  // ECLIPSE_FACTS_HPP_
