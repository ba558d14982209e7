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

#include "eclipse/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "eclipse/error.hpp"
#include "eclipse/rng.hpp"
#include "eclipse/text.hpp"
#include "json.hpp"

namespace eclipse {
namespace {

using json = nlohmann::ordered_json;

std::vector<const text::NumericMention*> PerturbableNumerics(
    const std::vector<text::NumericMention>& all) {
  std::vector<const text::NumericMention*> out;
  for (const auto& m : all) {
    if (!m.is_year) out.push_back(&m);
  }
  return out;
}

QAExample MakeTwin(const QAExample& clean, std::string answer,
                   Perturbation type) {
  QAExample out = clean;
  out.id = clean.id + "-h";
  out.answer = std::move(answer);
  out.label = Label::kHallucinated;
  out.perturbation = type;
  out.source_id = clean.id;
  return out;
}

void RequireClean(const QAExample& example) {
  if (example.label != Label::kClean) {
    throw Error(Errc::kInvalidArgument,
                "perturbation source must be clean: " + example.id);
  }
}

struct AntonymPair {
  std::string_view a;
  std::string_view b;
};
// Pairs line up with the up/down rows of the directional keyword table.
constexpr std::array<AntonymPair, 4> kAntonyms = {{
    {"increased", "decreased"},
    {"rose", "fell"},
    {"grew", "declined"},
    {"up", "down"},
}};

std::optional<std::string_view> AntonymOf(std::string_view lower) {
  for (const auto& p : kAntonyms) {
    if (lower == p.a) return p.b;
    if (lower == p.b) return p.a;
  }
  return std::nullopt;
}

std::string MatchCase(std::string_view original, std::string_view replacement) {
  std::string out(replacement);
  const bool all_upper =
      original.size() > 1 &&
      std::all_of(original.begin(), original.end(),
                  [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
  if (all_upper) {
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  } else if (!original.empty() &&
             std::isupper(static_cast<unsigned char>(original[0]))) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

struct Mention {
  std::size_t begin;
  std::size_t end;
  const Lexicon::Entry* entry;
};

std::vector<Mention> EntityMentions(std::string_view s, const Lexicon& lexicon) {
  const auto tt = text::Tokenize(s);
  std::vector<Mention> out;
  for (std::size_t i = 0; i < tt.tokens.size();) {
    if (auto m = lexicon.MatchAt(tt.tokens, i)) {
      out.push_back({tt.tokens[i].begin,
                     tt.tokens[i + m->token_count - 1].end, m->entry});
      i += m->token_count;
    } else {
      ++i;
    }
  }
  return out;
}

bool MentionsName(std::string_view haystack, const Lexicon::Entry& entry,
                  const Lexicon& lexicon) {
  for (const auto& m : EntityMentions(haystack, lexicon)) {
    if (m.entry->canonical == entry.canonical) return true;
  }
  return text::NormalizeForMatch(haystack).find(entry.canonical) !=
         std::string::npos;
}

}  // namespace

std::string_view LabelName(Label l) {
  return l == Label::kClean ? "clean" : "hallucinated";
}

Label ParseLabel(std::string_view s) {
  if (s == "clean") return Label::kClean;
  if (s == "hallucinated") return Label::kHallucinated;
  throw Error(Errc::kParse, "unknown label '" + std::string(s) + "'");
}

std::string_view PerturbationName(Perturbation p) {
  switch (p) {
    case Perturbation::kNone: return "none";
    case Perturbation::kWrongNumber: return "wrong_number";
    case Perturbation::kEntitySwap: return "entity_swap";
    case Perturbation::kContradiction: return "contradiction";
    case Perturbation::kFabrication: return "fabrication";
  }
  return "none";
}

Perturbation ParsePerturbation(std::string_view s) {
  for (auto p : {Perturbation::kNone, Perturbation::kWrongNumber,
                 Perturbation::kEntitySwap, Perturbation::kContradiction,
                 Perturbation::kFabrication}) {
    if (PerturbationName(p) == s) return p;
  }
  throw Error(Errc::kParse, "unknown perturbation '" + std::string(s) + "'");
}

double TaxonomyMix::Get(Perturbation p) const {
  switch (p) {
    case Perturbation::kWrongNumber: return wrong_number;
    case Perturbation::kEntitySwap: return entity_swap;
    case Perturbation::kContradiction: return contradiction;
    case Perturbation::kFabrication: return fabrication;
    case Perturbation::kNone: return 0.0;
  }
  return 0.0;
}

void TaxonomyMix::Validate() const {
  double sum = 0.0;
  for (auto p : kPerturbationTypes) {
    const double f = Get(p);
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw Error(Errc::kInvalidArgument, "mix fractions must be >= 0");
    }
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw Error(Errc::kInvalidArgument, "mix fractions must sum to 1");
  }
}

TaxonomyMix TaxonomyMix::Parse(std::string_view spec) {
  TaxonomyMix mix{0.0, 0.0, 0.0, 0.0};
  std::stringstream in{std::string(spec)};
  std::string item;
  while (std::getline(in, item, ',')) {
    item = text::Trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kInvalidArgument, "mix entry needs '=': " + item);
    }
    const auto type = ParsePerturbation(text::Trim(item.substr(0, eq)));
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidArgument, "bad mix fraction: " + item);
    }
    switch (type) {
      case Perturbation::kWrongNumber: mix.wrong_number = value; break;
      case Perturbation::kEntitySwap: mix.entity_swap = value; break;
      case Perturbation::kContradiction: mix.contradiction = value; break;
      case Perturbation::kFabrication: mix.fabrication = value; break;
      case Perturbation::kNone:
        throw Error(Errc::kInvalidArgument, "'none' is not a perturbation type");
    }
  }
  mix.Validate();
  return mix;
}

QAExample ScaleAnswerNumber(const QAExample& example, std::size_t mention,
                            double delta) {
  const auto all = text::FindNumerics(example.answer);
  const auto candidates = PerturbableNumerics(all);
  if (candidates.empty()) {
    throw Error(Errc::kNoNumericValue, "answer has no numeric value: " + example.id);
  }
  const auto& m = *candidates.at(mention);
  const double target = m.magnitude * (1.0 + delta);
  const double lo = 0.10 - 1e-12;
  const double hi = 0.50 + 1e-12;
  std::string rendered;
  // Keep the original precision unless rounding would push the change out of
  // the [10%, 50%] band, e.g. "5" scaled by 1.12 would round back to "6".
  for (int decimals = m.decimals; decimals <= m.decimals + 6; ++decimals) {
    rendered = text::FormatLike(m, target, decimals);
    const auto parsed = text::FindNumerics(rendered);
    if (parsed.empty() || m.magnitude == 0.0) break;
    const double change =
        std::fabs(parsed.front().magnitude - m.magnitude) / std::fabs(m.magnitude);
    if (change >= lo && change <= hi) break;
  }
  return MakeTwin(example, text::Splice(example.answer, m.begin, m.end, rendered),
                  Perturbation::kWrongNumber);
}

QAExample PerturbWrongNumber(const QAExample& example, std::uint64_t rng_seed) {
  RequireClean(example);
  const auto candidates = PerturbableNumerics(text::FindNumerics(example.answer));
  if (candidates.empty()) {
    throw Error(Errc::kNoNumericValue, "answer has no numeric value: " + example.id);
  }
  Rng rng(rng_seed);
  const auto index = static_cast<std::size_t>(rng.Below(candidates.size()));
  const double magnitude = rng.Uniform(0.10, 0.50);
  const double delta = rng.Bernoulli(0.5) ? magnitude : -magnitude;
  return ScaleAnswerNumber(example, index, delta);
}

QAExample PerturbContradiction(const QAExample& example) {
  RequireClean(example);
  const auto tt = text::Tokenize(example.answer);
  for (const auto& t : tt.tokens) {
    if (t.kind != text::TokenKind::kWord) continue;
    if (auto antonym = AntonymOf(t.lower)) {
      return MakeTwin(example,
                      text::Splice(example.answer, t.begin, t.end,
                                   MatchCase(t.text, *antonym)),
                      Perturbation::kContradiction);
    }
  }
  throw Error(Errc::kNoDirectionalClaim,
              "answer has no invertible directional claim: " + example.id);
}

QAExample PerturbEntitySwap(const QAExample& example,
                            std::span<const std::string> entity_pool,
                            const Lexicon& lexicon, std::uint64_t rng_seed) {
  RequireClean(example);
  auto mentions = EntityMentions(example.answer, lexicon);
  if (mentions.empty()) {
    throw Error(Errc::kNoEntityFound, "answer mentions no known entity: " + example.id);
  }
  if (entity_pool.empty()) {
    throw Error(Errc::kEmptyPool, "entity pool is empty");
  }
  Rng rng(rng_seed);
  std::vector<std::size_t> order(mentions.size());
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(order.begin(), order.end());
  for (const std::size_t mi : order) {
    const auto& target = mentions[mi];
    std::vector<const Lexicon::Entry*> candidates;
    for (const auto& name : entity_pool) {
      const auto* entry = lexicon.Find(name);
      if (entry == nullptr || entry->category != target.entry->category ||
          entry->canonical == target.entry->canonical ||
          MentionsName(example.evidence, *entry, lexicon) ||
          std::any_of(candidates.begin(), candidates.end(),
                      [&](const auto* c) { return c->canonical == entry->canonical; })) {
        continue;
      }
      candidates.push_back(entry);
    }
    if (candidates.empty()) continue;
    const auto* chosen = candidates[rng.Below(candidates.size())];
    return MakeTwin(example,
                    text::Splice(example.answer, target.begin, target.end,
                                 chosen->name),
                    Perturbation::kEntitySwap);
  }
  throw Error(Errc::kEmptyPool, "no same-category replacement outside the evidence: " +
                                    example.id);
}

QAExample PerturbFabrication(const QAExample& example,
                             std::span<const std::string> fact_templates,
                             const Lexicon& lexicon, std::uint64_t rng_seed) {
  RequireClean(example);
  if (fact_templates.empty()) {
    throw Error(Errc::kEmptyTemplateList, "no fabrication templates");
  }
  Rng rng(rng_seed);
  const FactSet evidence_facts = ExtractFacts(example.evidence, lexicon);
  const std::string evidence_lower = text::ToLower(example.evidence);
  const std::string answer_lower = text::ToLower(example.answer);

  auto absent_entities = [&](EntityCategory cat) {
    std::vector<const Lexicon::Entry*> out;
    for (const auto* e : lexicon.ByCategory(cat)) {
      if (!MentionsName(example.evidence, *e, lexicon) &&
          !MentionsName(example.answer, *e, lexicon)) {
        out.push_back(e);
      }
    }
    return out;
  };
  const auto companies = absent_entities(EntityCategory::kCompany);
  const auto people = absent_entities(EntityCategory::kPerson);
  std::vector<std::string> metrics;
  for (const auto& attr : KnownAttributes()) {
    const bool in_evidence =
        evidence_lower.find(attr) != std::string::npos ||
        std::any_of(evidence_facts.numerics.begin(), evidence_facts.numerics.end(),
                    [&](const auto& n) { return n.attribute == attr; });
    if (!in_evidence && answer_lower.find(attr) == std::string::npos) {
      metrics.push_back(attr);
    }
  }

  const std::string& tmpl = fact_templates[rng.Below(fact_templates.size())];
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::string sentence;
    bool ok = true;
    for (std::size_t i = 0; i < tmpl.size() && ok;) {
      if (tmpl[i] != '{') {
        sentence.push_back(tmpl[i++]);
        continue;
      }
      const auto close = tmpl.find('}', i);
      if (close == std::string::npos) {
        throw Error(Errc::kParse, "unterminated placeholder in template: " + tmpl);
      }
      const std::string key = tmpl.substr(i + 1, close - i - 1);
      if (key == "company" || key == "person") {
        const auto& pool = key == "company" ? companies : people;
        if (pool.empty()) {
          ok = false;
          break;
        }
        sentence += pool[rng.Below(pool.size())]->name;
      } else if (key == "metric") {
        if (metrics.empty()) {
          ok = false;
          break;
        }
        sentence += metrics[rng.Below(metrics.size())];
      } else if (key == "number") {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", rng.Uniform(1.0, 99.9));
        sentence += buf;
      } else {
        throw Error(Errc::kParse, "unknown placeholder {" + key + "}");
      }
      i = close + 1;
    }
    if (!ok) break;
    // Reject sentences whose numbers collide with the evidence.
    bool collides = false;
    for (const auto& n : text::FindNumerics(sentence)) {
      const std::string literal = sentence.substr(n.begin, n.end - n.begin);
      if (example.evidence.find(literal) != std::string::npos) collides = true;
      for (const auto& en : evidence_facts.numerics) {
        if (NumericClose(en.value, text::RoundSignificant(n.value(), 3)) ||
            NumericClose(en.value, n.magnitude)) {
          collides = true;
        }
      }
      for (const auto& m : text::FindNumerics(example.evidence)) {
        if (NumericClose(m.magnitude, n.magnitude)) collides = true;
      }
    }
    if (collides) continue;
    std::string answer = example.answer;
    if (!answer.empty() && !std::isspace(static_cast<unsigned char>(answer.back()))) {
      answer.push_back(' ');
    }
    return MakeTwin(example, answer + sentence, Perturbation::kFabrication);
  }
  throw Error(Errc::kEmptyPool,
              "template fillers exhausted for fabrication: " + example.id);
}

QAExample ApplyPerturbation(const QAExample& example, Perturbation type,
                            const PerturbationResources& resources,
                            std::uint64_t rng_seed) {
  switch (type) {
    case Perturbation::kWrongNumber:
      return PerturbWrongNumber(example, rng_seed);
    case Perturbation::kContradiction:
      return PerturbContradiction(example);
    case Perturbation::kEntitySwap: {
      if (resources.lexicon == nullptr) {
        throw Error(Errc::kInvalidArgument, "entity swap needs a lexicon");
      }
      if (!resources.entity_pool.empty()) {
        return PerturbEntitySwap(example, resources.entity_pool, *resources.lexicon,
                                 rng_seed);
      }
      std::vector<std::string> pool;
      for (const auto& e : resources.lexicon->entries()) pool.push_back(e.name);
      return PerturbEntitySwap(example, pool, *resources.lexicon, rng_seed);
    }
    case Perturbation::kFabrication:
      if (resources.lexicon == nullptr) {
        throw Error(Errc::kInvalidArgument, "fabrication needs a lexicon");
      }
      return PerturbFabrication(example, resources.fact_templates,
                                *resources.lexicon, rng_seed);
    case Perturbation::kNone:
      break;
  }
  throw Error(Errc::kInvalidArgument, "cannot apply perturbation 'none'");
}

std::array<std::size_t, 4> MixCounts(const TaxonomyMix& mix, std::size_t n) {
  mix.Validate();
  std::array<std::size_t, 4> counts{};
  std::array<double, 4> remainders{};
  std::size_t assigned = 0;
  for (std::size_t t = 0; t < 4; ++t) {
    const double exact = mix.Get(kPerturbationTypes[t]) * static_cast<double>(n);
    // Guard against 0.35 * 100 = 34.999999999999993.
    const double floor = std::floor(exact + 1e-9);
    counts[t] = static_cast<std::size_t>(floor);
    remainders[t] = exact - floor;
    assigned += counts[t];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 4) {
    ++counts[order[k]];
    ++assigned;
  }
  return counts;
}

DatasetManifest BuildDataset(std::span<const QAExample> clean_examples,
                             const TaxonomyMix& mix, std::uint64_t seed,
                             const PerturbationResources& resources) {
  for (const auto& e : clean_examples) RequireClean(e);
  const auto counts = MixCounts(mix, clean_examples.size());
  std::vector<Perturbation> assignment;
  for (std::size_t t = 0; t < 4; ++t) {
    assignment.insert(assignment.end(), counts[t], kPerturbationTypes[t]);
  }
  Rng rng(SeedMixer(seed).Add("assign").value());
  rng.Shuffle(assignment.begin(), assignment.end());

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.taxonomy_mix = mix;
  manifest.examples.reserve(2 * clean_examples.size());
  for (std::size_t i = 0; i < clean_examples.size(); ++i) {
    QAExample clean = clean_examples[i];
    clean.label = Label::kClean;
    clean.perturbation = Perturbation::kNone;
    if (clean.source_id.empty()) clean.source_id = clean.id;

    std::vector<Perturbation> attempts = {assignment[i]};
    for (auto p : kFallbackOrder) {
      if (p != assignment[i]) attempts.push_back(p);
    }
    std::optional<QAExample> twin;
    std::string last_error;
    for (auto p : attempts) {
      const auto example_seed =
          SeedMixer(seed).Add(clean.id).Add(PerturbationName(p)).value();
      try {
        twin = ApplyPerturbation(clean, p, resources, example_seed);
        break;
      } catch (const Error& e) {
        if (e.code() == Errc::kInvalidArgument || e.code() == Errc::kParse) throw;
        last_error = e.what();
      }
    }
    if (!twin) {
      throw Error(Errc::kInvalidArgument,
                  "no perturbation applies to " + clean.id + " (" + last_error + ")");
    }
    manifest.examples.push_back(std::move(clean));
    manifest.examples.push_back(std::move(*twin));
  }
  return manifest;
}

void ValidateManifest(const DatasetManifest& manifest) {
  manifest.taxonomy_mix.Validate();
  std::map<std::string, const QAExample*> by_id;
  std::size_t clean = 0;
  std::size_t hallucinated = 0;
  for (const auto& e : manifest.examples) {
    if (!by_id.emplace(e.id, &e).second) {
      throw Error(Errc::kInvalidArgument, "duplicate example id " + e.id);
    }
    if ((e.label == Label::kClean) != (e.perturbation == Perturbation::kNone)) {
      throw Error(Errc::kInvalidArgument,
                  "label/perturbation mismatch on " + e.id);
    }
    e.label == Label::kClean ? ++clean : ++hallucinated;
  }
  if (clean != hallucinated) {
    throw Error(Errc::kInvalidArgument, "dataset is not class-balanced");
  }
  for (const auto& e : manifest.examples) {
    if (e.label != Label::kHallucinated) continue;
    const auto it = by_id.find(e.source_id);
    if (it == by_id.end() || it->second->label != Label::kClean ||
        it->second->query != e.query || it->second->evidence != e.evidence) {
      throw Error(Errc::kInvalidArgument, "hallucinated twin " + e.id +
                                              " has no matching clean source");
    }
  }
}

std::string ExampleToJsonLine(const QAExample& e) {
  json j;
  j["id"] = e.id;
  j["query"] = e.query;
  j["evidence"] = e.evidence;
  j["answer"] = e.answer;
  j["label"] = LabelName(e.label);
  j["perturbation"] = PerturbationName(e.perturbation);
  j["source_id"] = e.source_id;
  return j.dump();
}

std::string DatasetToJsonl(const DatasetManifest& manifest) {
  json header;
  header["seed"] = manifest.seed;
  json mix;
  for (auto p : kPerturbationTypes) {
    mix[std::string(PerturbationName(p))] = manifest.taxonomy_mix.Get(p);
  }
  header["taxonomy_mix"] = mix;
  header["count"] = manifest.examples.size();
  std::string out = json{{"manifest", header}}.dump();
  out.push_back('\n');
  for (const auto& e : manifest.examples) {
    out += ExampleToJsonLine(e);
    out.push_back('\n');
  }
  return out;
}

std::vector<std::string> LoadLines(std::string_view contents) {
  std::vector<std::string> out;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!text::Trim(line).empty()) out.push_back(line);
  }
  return out;
}

ParsedDataset ParseDatasetJsonl(std::string_view jsonl) {
  ParsedDataset out;
  int line_no = 0;
  for (const auto& line : LoadLines(jsonl)) {
    ++line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (j.contains("manifest")) {
        const auto& h = j.at("manifest");
        DatasetManifest m;
        m.seed = h.at("seed").get<std::uint64_t>();
        const auto& mix = h.at("taxonomy_mix");
        m.taxonomy_mix = TaxonomyMix{mix.value("wrong_number", 0.0),
                                     mix.value("entity_swap", 0.0),
                                     mix.value("contradiction", 0.0),
                                     mix.value("fabrication", 0.0)};
        out.header = std::move(m);
        continue;
      }
      QAExample e;
      e.id = j.at("id").get<std::string>();
      e.query = j.at("query").get<std::string>();
      e.evidence = j.at("evidence").get<std::string>();
      e.answer = j.at("answer").get<std::string>();
      e.label = ParseLabel(j.value("label", std::string("clean")));
      e.perturbation = ParsePerturbation(j.value("perturbation", std::string("none")));
      e.source_id = j.value("source_id", std::string());
      out.examples.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace eclipse
