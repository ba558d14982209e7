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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "eclipse/dataset.hpp"
#include "eclipse/error.hpp"
#include "eclipse/facts.hpp"
#include "eclipse/text.hpp"

namespace eclipse {
namespace {

QAExample Clean(std::string answer, std::string evidence = "Unrelated filing text.") {
  QAExample e;
  e.id = "t-1";
  e.source_id = "t-1";
  e.query = "What happened?";
  e.evidence = std::move(evidence);
  e.answer = std::move(answer);
  return e;
}

// [begin, end) of the differing middle of `a` after stripping the common
// prefix and suffix shared with `b`.
std::pair<std::size_t, std::size_t> DiffSpan(const std::string& a, const std::string& b) {
  std::size_t p = 0;
  while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
  std::size_t s = 0;
  while (s < a.size() - p && s < b.size() - p && a[a.size() - 1 - s] == b[b.size() - 1 - s]) ++s;
  return {p, a.size() - s};
}

TEST(WrongNumber, ScalesTheFigureKeepingItsFormat) {
  const auto out = ScaleAnswerNumber(Clean("Microsoft reported revenue of $81.8B."), 0, 0.1516);
  EXPECT_EQ(out.answer, "Microsoft reported revenue of $94.2B.");
  EXPECT_EQ(out.label, Label::kHallucinated);
  EXPECT_EQ(out.perturbation, Perturbation::kWrongNumber);
}

TEST(WrongNumber, RelativeChangeStaysInRange) {
  const auto src = Clean("Apple's gross margin rose to 43.2% and revenue reached $1,234.56M.");
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto out = PerturbWrongNumber(src, seed);
    const auto before = text::FindNumerics(src.answer);
    const auto after = text::FindNumerics(out.answer);
    ASSERT_EQ(before.size(), after.size());
    int changed = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (before[i].magnitude == after[i].magnitude) continue;
      ++changed;
      const double rel = std::fabs(after[i].magnitude - before[i].magnitude) / before[i].magnitude;
      EXPECT_GE(rel, 0.10 - 1e-12);
      EXPECT_LE(rel, 0.50 + 1e-12);
      EXPECT_EQ(before[i].currency, after[i].currency);
      EXPECT_EQ(before[i].percent, after[i].percent);
      EXPECT_EQ(before[i].suffix, after[i].suffix);
      // Precision only grows when rounding would leave the band.
      EXPECT_GE(after[i].decimals, before[i].decimals);
    }
    EXPECT_EQ(changed, 1) << out.answer;
  }
}

TEST(WrongNumber, DeterministicUnderSeed) {
  const auto src = Clean("Revenue was $12.5B.");
  EXPECT_EQ(PerturbWrongNumber(src, 17), PerturbWrongNumber(src, 17));
}

TEST(WrongNumber, RequiresANumber) {
  try {
    PerturbWrongNumber(Clean("Revenue increased."), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNoNumericValue);
  }
}

TEST(WrongNumber, IgnoresYears) {
  const auto out = PerturbWrongNumber(Clean("In 2023 revenue was $10.0B."), 3);
  EXPECT_NE(out.answer.find("2023"), std::string::npos);
}

TEST(Contradiction, InvertsTheFirstDirectionalKeyword) {
  EXPECT_EQ(PerturbContradiction(Clean("Revenue increased sharply.")).answer,
            "Revenue decreased sharply.");
  EXPECT_EQ(PerturbContradiction(Clean("revenue decreased")).answer, "revenue increased");
  EXPECT_EQ(PerturbContradiction(Clean("Margin rose while costs fell.")).answer,
            "Margin fell while costs fell.");
}

TEST(Contradiction, IsAnInvolutionOnTheKeyword) {
  for (const char* s : {"Revenue increased.", "EPS fell to $2.", "Income grew.",
                        "Margin declined.", "Sales rose."}) {
    const auto once = PerturbContradiction(Clean(s));
    auto twice_src = Clean(once.answer);
    EXPECT_EQ(PerturbContradiction(twice_src).answer, s);
  }
}

TEST(Contradiction, RequiresADirection) {
  try {
    PerturbContradiction(Clean("Revenue was $5B."));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNoDirectionalClaim);
  }
}

TEST(EntitySwap, SwapsToSameCategoryEntity) {
  const Lexicon lex = DefaultLexicon();
  const auto src = Clean("Satya Nadella said Microsoft's revenue rose.",
                         "Satya Nadella discussed results.");
  const std::vector<std::string> pool = {"Sundar Pichai"};
  const auto out = PerturbEntitySwap(src, pool, lex, 5);
  EXPECT_EQ(out.answer, "Sundar Pichai said Microsoft's revenue rose.");
  EXPECT_EQ(out.perturbation, Perturbation::kEntitySwap);
}

TEST(EntitySwap, NeverPicksTheOriginalOrAnEvidenceEntity) {
  const Lexicon lex = DefaultLexicon();
  const auto src =
      Clean("Apple's revenue rose to $90B.", "Apple and Microsoft both reported results.");
  std::vector<std::string> pool;
  for (const auto& e : lex.entries()) pool.push_back(e.name);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = PerturbEntitySwap(src, pool, lex, seed);
    const auto facts = ExtractFacts(out.answer, lex);
    ASSERT_EQ(facts.entities.size(), 1u) << out.answer;
    EXPECT_NE(facts.entities[0].name, "apple");
    EXPECT_NE(facts.entities[0].name, "microsoft");
    EXPECT_EQ(facts.entities[0].category, EntityCategory::kCompany);
  }
}

TEST(EntitySwap, Errors) {
  const Lexicon lex = DefaultLexicon();
  const std::vector<std::string> pool = {"Apple"};
  try {
    PerturbEntitySwap(Clean("Revenue rose."), pool, lex, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNoEntityFound);
  }
  try {
    PerturbEntitySwap(Clean("Apple's revenue rose."), pool, lex, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyPool);
  }
}

TEST(Fabrication, AppendsAnUnsupportedSentence) {
  const Lexicon lex = DefaultLexicon();
  const auto src = Clean("Apple's revenue rose to $90.1B in Q2 2023.",
                         "Apple reported revenue of $90.1B for Q2 2023, and revenue rose.");
  const auto templates = DefaultFabricationTemplates();
  const auto evidence_facts = ExtractFacts(src.evidence, lex);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto out = PerturbFabrication(src, templates, lex, seed);
    ASSERT_EQ(out.answer.rfind(src.answer, 0), 0u) << "append-only";
    const std::string added = out.answer.substr(src.answer.size());
    const auto facts = ExtractFacts(added, lex);
    EXPECT_FALSE(facts.empty());
    for (const auto& ent : facts.entities) {
      EXPECT_EQ(std::count(evidence_facts.entities.begin(), evidence_facts.entities.end(), ent), 0)
          << added;
    }
    for (const auto& n : facts.numerics) {
      for (const auto& m : evidence_facts.numerics) EXPECT_FALSE(NumericClose(n.value, m.value));
      EXPECT_EQ(src.evidence.find(n.attribute), std::string::npos) << added;
    }
    EXPECT_EQ(out, PerturbFabrication(src, templates, lex, seed));
  }
}

TEST(Fabrication, RequiresTemplates) {
  const Lexicon lex = DefaultLexicon();
  try {
    PerturbFabrication(Clean("Apple's revenue rose."), {}, lex, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyTemplateList);
  }
}

PerturbationResources DefaultResources(const Lexicon& lex) {
  PerturbationResources r;
  r.lexicon = &lex;
  r.fact_templates = DefaultFabricationTemplates();
  return r;
}

TEST(BuildDataset, DefaultMixOnOneHundredCleanExamples) {
  const Lexicon lex = DefaultLexicon();
  const auto clean = GenerateCleanCorpus(100, 11);
  const auto m = BuildDataset(clean, TaxonomyMix{}, 5, DefaultResources(lex));
  ASSERT_EQ(m.examples.size(), 200u);
  std::map<Perturbation, int> counts;
  for (const auto& e : m.examples) counts[e.perturbation]++;
  EXPECT_EQ(counts[Perturbation::kNone], 100);
  EXPECT_EQ(counts[Perturbation::kWrongNumber], 35);
  EXPECT_EQ(counts[Perturbation::kEntitySwap], 25);
  EXPECT_EQ(counts[Perturbation::kContradiction], 25);
  EXPECT_EQ(counts[Perturbation::kFabrication], 15);
  EXPECT_NO_THROW(ValidateManifest(m));
}

TEST(BuildDataset, MixCountsUseLargestRemainder) {
  const auto c = MixCounts(TaxonomyMix{}, 100);
  EXPECT_EQ(c, (std::array<std::size_t, 4>{35, 25, 25, 15}));
  const auto odd = MixCounts(TaxonomyMix{}, 7);
  EXPECT_EQ(odd[0] + odd[1] + odd[2] + odd[3], 7u);
}

TEST(BuildDataset, SingleTypeMix) {
  const Lexicon lex = DefaultLexicon();
  const auto clean = GenerateCleanCorpus(40, 3);
  const auto m = BuildDataset(clean, TaxonomyMix::Parse("wrong_number=1.0"), 9,
                              DefaultResources(lex));
  for (const auto& e : m.examples) {
    if (e.label == Label::kHallucinated) {
      EXPECT_EQ(e.perturbation, Perturbation::kWrongNumber);
    }
  }
}

TEST(BuildDataset, FallsBackWhenATypeDoesNotApply) {
  const Lexicon lex = DefaultLexicon();
  QAExample no_number = Clean("Apple's revenue increased.", "Apple's revenue increased.");
  no_number.id = no_number.source_id = "c-0";
  const auto m = BuildDataset(std::vector<QAExample>{no_number},
                              TaxonomyMix::Parse("wrong_number=1.0"), 1, DefaultResources(lex));
  ASSERT_EQ(m.examples.size(), 2u);
  EXPECT_EQ(m.examples[1].perturbation, Perturbation::kContradiction);
}

TEST(BuildDataset, RejectsHallucinatedInputs) {
  const Lexicon lex = DefaultLexicon();
  auto bad = GenerateCleanCorpus(2, 1);
  bad[0].label = Label::kHallucinated;
  bad[0].perturbation = Perturbation::kWrongNumber;
  EXPECT_THROW(BuildDataset(bad, TaxonomyMix{}, 1, DefaultResources(lex)), Error);
}

TEST(DatasetProperties, InvariantsHoldAcrossSeeds) {
  const Lexicon lex = DefaultLexicon();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clean = GenerateCleanCorpus(60, seed);
    const auto m = BuildDataset(clean, TaxonomyMix{}, seed, DefaultResources(lex));
    std::map<std::string, const QAExample*> by_id;
    for (const auto& e : m.examples) by_id[e.id] = &e;
    std::size_t n_clean = 0;
    for (const auto& e : m.examples) {
      EXPECT_EQ(e.label == Label::kClean, e.perturbation == Perturbation::kNone);
      if (e.label == Label::kClean) {
        ++n_clean;
        continue;
      }
      ASSERT_TRUE(by_id.count(e.source_id));
      const QAExample& twin = *by_id[e.source_id];
      EXPECT_EQ(twin.label, Label::kClean);
      EXPECT_EQ(twin.query, e.query);
      EXPECT_EQ(twin.evidence, e.evidence);
      EXPECT_NE(twin.answer, e.answer);
      if (e.perturbation == Perturbation::kFabrication) {
        EXPECT_EQ(e.answer.rfind(twin.answer, 0), 0u);
        continue;
      }
      // The edit is confined to one number, keyword or entity.
      const auto [b, end] = DiffSpan(twin.answer, e.answer);
      const std::string removed = twin.answer.substr(b, end - b);
      if (e.perturbation == Perturbation::kWrongNumber) {
        bool inside = false;
        for (const auto& n : text::FindNumerics(twin.answer)) {
          inside = inside || (n.begin <= b && end <= n.end);
        }
        EXPECT_TRUE(inside) << twin.answer << " -> " << e.answer;
      } else if (e.perturbation == Perturbation::kContradiction) {
        EXPECT_EQ(removed.find(' '), std::string::npos) << removed;
      } else {
        bool inside = false;
        for (const auto& ent : lex.entries()) {
          for (auto pos = twin.answer.find(ent.name); pos != std::string::npos;
               pos = twin.answer.find(ent.name, pos + 1)) {
            inside = inside || (pos <= b && end <= pos + ent.name.size());
          }
        }
        EXPECT_TRUE(inside) << twin.answer << " -> " << e.answer;
      }
    }
    EXPECT_EQ(2 * n_clean, m.examples.size());
  }
}

TEST(DatasetIo, JsonlRoundTripAndByteIdenticalRegeneration) {
  const Lexicon lex = DefaultLexicon();
  const auto clean = GenerateCleanCorpus(30, 8);
  const auto a = BuildDataset(clean, TaxonomyMix{}, 21, DefaultResources(lex));
  const auto b = BuildDataset(clean, TaxonomyMix{}, 21, DefaultResources(lex));
  const std::string ja = DatasetToJsonl(a);
  EXPECT_EQ(ja, DatasetToJsonl(b));
  const auto parsed = ParseDatasetJsonl(ja);
  ASSERT_TRUE(parsed.header.has_value());
  EXPECT_EQ(parsed.header->seed, 21u);
  EXPECT_DOUBLE_EQ(parsed.header->taxonomy_mix.wrong_number, 0.35);
  EXPECT_EQ(parsed.examples, a.examples);
}

TEST(DatasetIo, RejectsMalformedLines) {
  EXPECT_THROW(ParseDatasetJsonl("{not json}\n"), Error);
  EXPECT_THROW(ParseDatasetJsonl("{\"id\": \"x\"}\n"), Error);
}

TEST(TaxonomyMixTest, ValidatesSum) {
  EXPECT_NO_THROW(TaxonomyMix{}.Validate());
  EXPECT_THROW(TaxonomyMix::Parse("wrong_number=0.5,entity_swap=0.4"), Error);
  EXPECT_THROW(TaxonomyMix::Parse("wrong_number=1.2,entity_swap=-0.2"), Error);
  EXPECT_THROW(TaxonomyMix::Parse("bogus=1.0"), Error);
}

TEST(ValidateManifestTest, DetectsImbalance) {
  const Lexicon lex = DefaultLexicon();
  auto m = BuildDataset(GenerateCleanCorpus(4, 1), TaxonomyMix{}, 2, DefaultResources(lex));
  m.examples.pop_back();
  EXPECT_THROW(ValidateManifest(m), Error);
}

TEST(CleanCorpus, EveryAnswerIsPerturbableByEveryType) {
  const Lexicon lex = DefaultLexicon();
  const auto res = DefaultResources(lex);
  for (const auto& e : GenerateCleanCorpus(80, 4)) {
    for (auto p : kPerturbationTypes) {
      EXPECT_NO_THROW(ApplyPerturbation(e, p, res, 1)) << PerturbationName(p) << ": " << e.answer;
    }
  }
}

}  // namespace
}  // namespace eclipse
