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

#include "eclipse/facts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "eclipse/error.hpp"
#include "eclipse/hashing.hpp"

namespace eclipse {
namespace {

using text::Token;
using text::TokenKind;

struct AttributePhrase {
  std::vector<std::string> words;
  std::string canonical;
};

const std::vector<AttributePhrase>& AttributePhrases() {
  // Longest phrases first so that "net income" wins over "income".
  static const std::vector<AttributePhrase> kPhrases = [] {
    const std::vector<std::pair<std::string, std::string>> raw = {
        {"earnings per share", "eps"},
        {"free cash flow", "free cash flow"},
        {"operating cash flow", "operating cash flow"},
        {"operating income", "operating income"},
        {"operating margin", "operating margin"},
        {"operating expenses", "operating expenses"},
        {"gross margin", "gross margin"},
        {"net margin", "net margin"},
        {"net income", "net income"},
        {"cash flow", "cash flow"},
        {"revenue", "revenue"},
        {"revenues", "revenue"},
        {"sales", "sales"},
        {"income", "income"},
        {"profit", "profit"},
        {"profits", "profit"},
        {"margin", "margin"},
        {"margins", "margin"},
        {"eps", "eps"},
        {"earnings", "earnings"},
        {"ebitda", "ebitda"},
        {"debt", "debt"},
        {"dividend", "dividend"},
        {"dividends", "dividend"},
        {"guidance", "guidance"},
        {"expenses", "expenses"},
        {"capex", "capex"},
        {"assets", "assets"},
        {"backlog", "backlog"},
        {"bookings", "bookings"},
        {"subscribers", "subscribers"},
        {"headcount", "headcount"},
    };
    std::vector<AttributePhrase> out;
    for (const auto& [phrase, canonical] : raw) {
      out.push_back({text::SplitWhitespace(phrase), canonical});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return a.words.size() > b.words.size();
    });
    return out;
  }();
  return kPhrases;
}

struct Span {
  std::size_t first = 0;  // token index
  std::size_t last = 0;   // inclusive
};

struct EntityMention {
  Span span;
  std::size_t sentence = 0;
  const Lexicon::Entry* entry = nullptr;
};

struct AttributeMention {
  Span span;
  std::string canonical;
};

std::size_t Distance(std::size_t pos, const Span& s) {
  if (pos < s.first) return s.first - pos;
  if (pos > s.last) return pos - s.last;
  return 0;
}

std::string NearestAttribute(std::size_t pos,
                             const std::vector<AttributeMention>& attrs) {
  const AttributeMention* best = nullptr;
  std::size_t best_d = kAttributeWindow + 1;
  bool best_before = false;
  for (const auto& a : attrs) {
    const std::size_t d = Distance(pos, a.span);
    const bool before = a.span.last < pos;
    if (d < best_d || (d == best_d && before && !best_before)) {
      best = &a;
      best_d = d;
      best_before = before;
    }
  }
  return best ? best->canonical : "unknown";
}

std::string EntityInScope(std::size_t pos, std::size_t sentence,
                          const std::vector<EntityMention>& mentions) {
  const EntityMention* preceding = nullptr;
  const EntityMention* following = nullptr;
  const EntityMention* carried = nullptr;
  for (const auto& m : mentions) {
    if (m.sentence == sentence) {
      if (m.span.last < pos) {
        preceding = &m;
      } else if (m.span.first > pos && following == nullptr) {
        following = &m;
      }
    } else if (m.sentence < sentence) {
      carried = &m;
    }
  }
  if (preceding) return preceding->entry->canonical;
  if (following) return following->entry->canonical;
  if (carried) return carried->entry->canonical;
  return "";
}

std::string KeyOf(const std::string& entity, const std::string& attribute) {
  return entity + '\x1f' + attribute;
}

}  // namespace

std::string_view CategoryName(EntityCategory c) {
  return c == EntityCategory::kCompany ? "company" : "person";
}

std::optional<EntityCategory> ParseCategory(std::string_view s) {
  const std::string lower = text::ToLower(text::Trim(s));
  if (lower == "company") return EntityCategory::kCompany;
  if (lower == "person") return EntityCategory::kPerson;
  return std::nullopt;
}

Lexicon Lexicon::Parse(std::string_view tsv) {
  Lexicon lex;
  std::istringstream in{std::string(tsv)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = text::Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(Errc::kParse,
                  "lexicon line " + std::to_string(line_no) + ": missing tab");
    }
    const auto category = ParseCategory(line.substr(tab + 1));
    if (!category) {
      throw Error(Errc::kParse, "lexicon line " + std::to_string(line_no) +
                                    ": unknown category");
    }
    lex.Add(text::Trim(line.substr(0, tab)), *category);
  }
  return lex;
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

void Lexicon::Add(std::string name, EntityCategory category) {
  Entry e;
  e.canonical = text::NormalizeForMatch(name);
  if (e.canonical.empty() || Find(e.canonical) != nullptr) return;
  e.name = std::move(name);
  e.category = category;
  e.words = text::SplitWhitespace(e.canonical);
  entries_.push_back(std::move(e));
}

const Lexicon::Entry* Lexicon::Find(std::string_view name) const {
  const std::string canonical = text::NormalizeForMatch(name);
  for (const auto& e : entries_) {
    if (e.canonical == canonical) return &e;
  }
  return nullptr;
}

std::vector<const Lexicon::Entry*> Lexicon::ByCategory(
    EntityCategory category) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries_) {
    if (e.category == category) out.push_back(&e);
  }
  return out;
}

std::optional<Lexicon::Match> Lexicon::MatchAt(
    const std::vector<text::Token>& tokens, std::size_t index) const {
  std::optional<Match> best;
  for (const auto& e : entries_) {
    if (index + e.words.size() > tokens.size()) continue;
    bool ok = true;
    for (std::size_t k = 0; k < e.words.size() && ok; ++k) {
      const auto& t = tokens[index + k];
      ok = t.kind == TokenKind::kWord && t.lower == e.words[k];
    }
    if (ok && (!best || e.words.size() > best->token_count)) {
      best = Match{&e, e.words.size()};
    }
  }
  return best;
}

std::string_view PolarityName(Polarity p) {
  switch (p) {
    case Polarity::kUp: return "up";
    case Polarity::kDown: return "down";
    case Polarity::kStable: return "stable";
  }
  return "stable";
}

std::optional<Polarity> DirectionOf(std::string_view w) {
  if (w == "increased" || w == "rose" || w == "grew" || w == "up") {
    return Polarity::kUp;
  }
  if (w == "decreased" || w == "fell" || w == "declined" || w == "down") {
    return Polarity::kDown;
  }
  if (w == "stable" || w == "flat" || w == "unchanged") return Polarity::kStable;
  return std::nullopt;
}

std::optional<std::string> CanonicalAttribute(std::string_view lower_phrase) {
  const auto words = text::SplitWhitespace(lower_phrase);
  for (const auto& p : AttributePhrases()) {
    if (p.words == words) return p.canonical;
  }
  return std::nullopt;
}

const std::vector<std::string>& KnownAttributes() {
  static const std::vector<std::string> kAll = [] {
    std::vector<std::string> out;
    for (const auto& p : AttributePhrases()) {
      if (std::find(out.begin(), out.end(), p.canonical) == out.end()) {
        out.push_back(p.canonical);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }();
  return kAll;
}

bool NumericClose(double a, double b, double tolerance) {
  const double denom = std::max(std::fabs(a), std::fabs(b));
  if (denom == 0.0) return true;
  return std::fabs(a - b) / denom <= tolerance;
}

FactSet ExtractFacts(std::string_view input, const Lexicon& lexicon) {
  const text::TokenizedText tt = text::Tokenize(input);
  const auto& tokens = tt.tokens;

  std::vector<std::size_t> sentence_of(tokens.size(), 0);
  {
    std::size_t s = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      sentence_of[i] = s;
      if (tokens[i].sentence_end) ++s;
    }
  }

  std::vector<EntityMention> entities;
  std::vector<AttributeMention> attributes;
  std::vector<bool> covered(tokens.size(), false);
  for (std::size_t i = 0; i < tokens.size();) {
    if (auto m = lexicon.MatchAt(tokens, i)) {
      entities.push_back({{i, i + m->token_count - 1}, sentence_of[i], m->entry});
      for (std::size_t k = 0; k < m->token_count; ++k) covered[i + k] = true;
      i += m->token_count;
    } else {
      ++i;
    }
  }
  for (std::size_t i = 0; i < tokens.size();) {
    bool matched = false;
    if (!covered[i] && tokens[i].kind == TokenKind::kWord) {
      for (const auto& p : AttributePhrases()) {
        if (i + p.words.size() > tokens.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < p.words.size() && ok; ++k) {
          ok = tokens[i + k].kind == TokenKind::kWord &&
               tokens[i + k].lower == p.words[k];
        }
        if (ok) {
          attributes.push_back({{i, i + p.words.size() - 1}, p.canonical});
          i += p.words.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;
  }

  FactSet facts;
  for (const auto& m : entities) {
    facts.entities.push_back({m.entry->canonical, m.entry->category});
  }
  std::sort(facts.entities.begin(), facts.entities.end());
  facts.entities.erase(std::unique(facts.entities.begin(), facts.entities.end()),
                       facts.entities.end());

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind == TokenKind::kNumber) {
      const auto& mention = tt.numerics[static_cast<std::size_t>(t.numeric)];
      if (mention.is_year) continue;
      NumericFact n;
      n.value = text::RoundSignificant(mention.value(), 3);
      n.unit = mention.unit();
      n.attribute = NearestAttribute(i, attributes);
      n.entity = EntityInScope(i, sentence_of[i], entities);
      facts.triples.push_back(
          {n.entity, n.attribute, text::CompactValue(n.value, mention.percent)});
      facts.numerics.push_back(std::move(n));
    } else if (t.kind == TokenKind::kWord && !covered[i]) {
      if (auto p = DirectionOf(t.lower)) {
        facts.directions.push_back({EntityInScope(i, sentence_of[i], entities),
                                    NearestAttribute(i, attributes), *p});
      }
    }
  }
  return facts;
}

FactSet Canonicalize(FactSet f) {
  std::sort(f.entities.begin(), f.entities.end());
  std::sort(f.numerics.begin(), f.numerics.end(), [](const auto& a, const auto& b) {
    return std::tie(a.entity, a.attribute, a.unit, a.value) <
           std::tie(b.entity, b.attribute, b.unit, b.value);
  });
  std::sort(f.directions.begin(), f.directions.end(),
            [](const auto& a, const auto& b) {
              return std::tie(a.entity, a.attribute, a.polarity) <
                     std::tie(b.entity, b.attribute, b.polarity);
            });
  std::sort(f.triples.begin(), f.triples.end(), [](const auto& a, const auto& b) {
    return std::tie(a.entity, a.attribute, a.value) <
           std::tie(b.entity, b.attribute, b.value);
  });
  return f;
}

std::string RenderFacts(const FactSet& facts) {
  std::ostringstream out;
  auto subject = [](const std::string& entity, const std::string& attribute) {
    return entity.empty() ? "The " + attribute : entity + "'s " + attribute;
  };
  auto value_text = [](const NumericFact& n) {
    const bool percent = n.unit == "%";
    std::string v = text::CompactValue(n.value, percent);
    return n.unit == "USD" ? "$" + v : v;
  };
  // Entity-less facts go first; later sentences would otherwise carry an
  // entity into their scope.
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& n : facts.numerics) {
      if (n.entity.empty() != (pass == 0)) continue;
      if (n.attribute == "unknown") {
        // Padding keeps every keyword outside the attribute window.
        out << "Separately, and only as a plain aside in this note, "
            << (n.entity.empty() ? std::string("the note") : n.entity)
            << " listed one further number, " << value_text(n)
            << ", without naming what it measured in this short plain note. ";
        continue;
      }
      out << subject(n.entity, n.attribute) << " was " << value_text(n) << ". ";
    }
    for (const auto& d : facts.directions) {
      if (d.entity.empty() != (pass == 0)) continue;
      const char* word = d.polarity == Polarity::kUp     ? "increased"
                         : d.polarity == Polarity::kDown ? "decreased"
                                                         : "stable";
      out << subject(d.entity, d.attribute)
          << (d.polarity == Polarity::kStable ? " was " : " ") << word << ". ";
    }
  }
  for (const auto& e : facts.entities) {
    const bool referenced =
        std::any_of(facts.numerics.begin(), facts.numerics.end(),
                    [&](const auto& n) { return n.entity == e.name; }) ||
        std::any_of(facts.directions.begin(), facts.directions.end(),
                    [&](const auto& d) { return d.entity == e.name; });
    if (!referenced) out << e.name << " was mentioned. ";
  }
  return text::Trim(out.str());
}

std::string_view ContradictionName(Contradiction c) {
  switch (c) {
    case Contradiction::kNone: return "none";
    case Contradiction::kPartial: return "partial";
    case Contradiction::kTotal: return "total";
  }
  return "none";
}

Contradiction FactsContradict(const FactSet& claim, const FactSet& reference) {
  std::multimap<std::string, const NumericFact*> ref_numerics;
  std::multimap<std::string, Polarity> ref_directions;
  for (const auto& n : reference.numerics) {
    if (n.attribute != "unknown") ref_numerics.emplace(KeyOf(n.entity, n.attribute), &n);
  }
  for (const auto& d : reference.directions) {
    if (d.attribute != "unknown") {
      ref_directions.emplace(KeyOf(d.entity, d.attribute), d.polarity);
    }
  }

  int agree = 0;
  int conflict = 0;
  for (const auto& n : claim.numerics) {
    if (n.attribute == "unknown") continue;
    const auto [lo, hi] = ref_numerics.equal_range(KeyOf(n.entity, n.attribute));
    bool matched = false;
    bool close = false;
    for (auto it = lo; it != hi; ++it) {
      if (it->second->unit != n.unit) continue;
      matched = true;
      close = close || NumericClose(it->second->value, n.value);
    }
    if (!matched) continue;
    close ? ++agree : ++conflict;
  }
  for (const auto& d : claim.directions) {
    if (d.attribute == "unknown") continue;
    const auto [lo, hi] = ref_directions.equal_range(KeyOf(d.entity, d.attribute));
    if (lo == hi) continue;
    bool same = false;
    for (auto it = lo; it != hi; ++it) same = same || it->second == d.polarity;
    same ? ++agree : ++conflict;
  }

  if (conflict == 0) return Contradiction::kNone;
  return agree == 0 ? Contradiction::kTotal : Contradiction::kPartial;
}

bool HasInternalConflict(const FactSet& facts) {
  for (std::size_t i = 0; i < facts.directions.size(); ++i) {
    for (std::size_t j = i + 1; j < facts.directions.size(); ++j) {
      const auto& a = facts.directions[i];
      const auto& b = facts.directions[j];
      if (a.entity == b.entity && a.attribute == b.attribute &&
          a.attribute != "unknown" && a.polarity != b.polarity) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace eclipse
