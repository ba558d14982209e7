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
#include <numeric>

#include "eclipse/entropy.hpp"
#include "eclipse/error.hpp"
#include "eclipse/dataset.hpp"
#include "eclipse/rng.hpp"
#include "oracles.hpp"

namespace eclipse {
namespace {

const Lexicon& Lex() {
  static const Lexicon lex = DefaultLexicon();
  return lex;
}

ScoredAnswer Answer(const std::string& text, double total = -1.0) {
  return ScoredAnswer{text, {total}, FinishReason::kStop};
}

ClusterSet ClusterTexts(const std::vector<std::string>& texts,
                        std::vector<ScoredAnswer>* answers_out = nullptr) {
  std::vector<ScoredAnswer> answers;
  std::vector<FactSet> facts;
  for (const auto& t : texts) {
    answers.push_back(Answer(t));
    facts.push_back(ExtractFacts(t, Lex()));
  }
  auto cs = ClusterAnswers(answers, facts);
  if (answers_out) *answers_out = answers;
  return cs;
}

TEST(SemanticEntropyTest, ReferenceProfiles) {
  const std::vector<double> one = {1.0};
  const std::vector<double> halves = {0.5, 0.5};
  const std::vector<double> seven_three = {0.7, 0.3};
  EXPECT_NEAR(EntropyOf(one), 0.0, 1e-12);
  EXPECT_NEAR(EntropyOf(halves), std::log(2.0), 1e-12);
  EXPECT_NEAR(EntropyOf(seven_three), 0.6109, 1e-4);
  EXPECT_NEAR(EntropyOf(seven_three), oracle::ProfileEntropy({7, 3}), 1e-12);
  const std::vector<double> with_zero = {0.0, 1.0};
  EXPECT_EQ(EntropyOf(with_zero), 0.0);
}

TEST(SemanticEntropyTest, FromClusteredSamples) {
  const std::string a = "Microsoft's revenue increased to $211B.";
  const std::string b = "Apple's revenue decreased to $90B.";
  std::vector<std::string> ten(10, a);
  EXPECT_NEAR(SemanticEntropy(ClusterTexts(ten)), 0.0, 1e-12);
  std::vector<std::string> five_five;
  for (int i = 0; i < 5; ++i) five_five.insert(five_five.end(), {a, b});
  const auto cs = ClusterTexts(five_five);
  EXPECT_EQ(cs.probabilities, (std::vector<double>{0.5, 0.5}));
  EXPECT_NEAR(SemanticEntropy(cs), std::log(2.0), 1e-12);
  std::vector<std::string> seven_three(7, a);
  seven_three.insert(seven_three.end(), 3, b);
  EXPECT_NEAR(SemanticEntropy(ClusterTexts(seven_three)), 0.6109, 1e-4);
}

TEST(ClusteringExample, ParaphrasesGroupAndAThreePointEightPercentDeviationSplits) {
  const std::vector<std::string> texts = {
      "Microsoft's revenue increased to $211B.",
      "Revenue at Microsoft rose to $211 billion.",
      "Microsoft grew its revenue to $211.0B.",
      "Microsoft's revenue increased to $219B.",
  };
  const auto cs = ClusterTexts(texts);
  ASSERT_EQ(cs.clusters.size(), 2u);
  EXPECT_EQ(cs.clusters[0].members, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(cs.clusters[1].members, (std::vector<std::size_t>{3}));
  EXPECT_NEAR(std::fabs(219.0 - 211.0) / 211.0, 0.038, 5e-4);
}

TEST(SameClusterTest, Rules) {
  auto f = [](const std::string& s) { return ExtractFacts(s, Lex()); };
  const std::string a = "Microsoft's revenue increased to $211B.";
  EXPECT_TRUE(SameCluster(f(a), f(a), a, a));
  const std::string b = "Microsoft's revenue increased to $219B.";
  EXPECT_FALSE(SameCluster(f(a), f(b), a, b));
  const std::string c = "Microsoft's revenue decreased to $211B.";
  EXPECT_FALSE(SameCluster(f(a), f(c), a, c));
  const std::string d = "Microsoft's revenue increased to $211.9B.";
  EXPECT_TRUE(SameCluster(f(a), f(d), a, d));
  // Empty fact sets fall back to normalized string equality.
  EXPECT_TRUE(SameCluster({}, {}, "No  comment.", "no comment."));
  EXPECT_FALSE(SameCluster({}, {}, "No comment.", "Nothing to add."));
  EXPECT_FALSE(SameCluster(f(a), {}, a, "No comment."));
}

TEST(SameClusterTest, EntityJaccardThreshold) {
  auto f = [](const std::string& s) { return ExtractFacts(s, Lex()); };
  const auto two = f("Apple and Microsoft were mentioned.");
  const auto three = f("Apple, Microsoft and Nvidia were mentioned.");
  const auto other = f("Nvidia, Intel and Apple were mentioned.");
  EXPECT_NEAR(EntityJaccard(two, three), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(EntityJaccard(three, other), 0.5, 1e-12);
  EXPECT_NEAR(EntityJaccard(two, other), 0.25, 1e-12);
  EXPECT_TRUE(SameCluster(two, three, "", ""));
  EXPECT_TRUE(SameCluster(three, other, "", ""));
  EXPECT_FALSE(SameCluster(two, other, "", ""));
}

TEST(ClusterAnswersTest, RepresentativeRuleOnANonTransitiveChain) {
  // a ~ b and b ~ c, but a !~ c: c is compared with the representative a.
  const auto cs = ClusterTexts({"Apple and Microsoft were mentioned.",
                                "Apple, Microsoft and Nvidia were mentioned.",
                                "Nvidia, Intel and Apple were mentioned."});
  ASSERT_EQ(cs.clusters.size(), 2u);
  EXPECT_EQ(cs.clusters[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(cs.clusters[0].representative, 0u);
  EXPECT_EQ(cs.clusters[1].members, (std::vector<std::size_t>{2}));
}

TEST(ClusterAnswersTest, RejectsBadInput) {
  std::vector<ScoredAnswer> none;
  std::vector<FactSet> no_facts;
  EXPECT_THROW(ClusterAnswers(none, no_facts), Error);
  std::vector<ScoredAnswer> one = {Answer("x")};
  EXPECT_THROW(ClusterAnswers(one, no_facts), Error);
}

TEST(ClusterAnswersTest, FlagsInternallyConflictedSamples) {
  const auto cs = ClusterTexts(
      {"Microsoft's revenue increased to $211B. Microsoft's revenue decreased.",
       "Microsoft's revenue increased to $211B."});
  EXPECT_EQ(cs.conflicted, (std::vector<std::size_t>{0}));
}

TEST(SelectTopAnswerTest, LargestClusterThenLogprobThenIndex) {
  const std::string a = "Microsoft's revenue increased to $211B.";
  const std::string b = "Apple's revenue decreased to $90B.";
  {
    std::vector<std::string> texts(3, b);
    texts.insert(texts.end(), 7, a);
    std::vector<ScoredAnswer> answers;
    const auto cs = ClusterTexts(texts, &answers);
    EXPECT_EQ(SelectTopAnswerIndex(answers, cs), 3u);
  }
  {
    std::vector<ScoredAnswer> answers;
    std::vector<FactSet> facts;
    for (int i = 0; i < 10; ++i) {
      const bool first = i % 2 == 0;
      answers.push_back(Answer(first ? a : b, first ? -10.0 : -8.0));
      facts.push_back(ExtractFacts(answers.back().text, Lex()));
    }
    const auto cs = ClusterAnswers(answers, facts);
    EXPECT_EQ(SelectTopAnswerIndex(answers, cs), 1u);
    EXPECT_EQ(SelectTopAnswer(answers, cs).text, b);
  }
  {
    std::vector<ScoredAnswer> answers = {Answer(a, -3.0), Answer(b, -3.0)};
    std::vector<FactSet> facts = {ExtractFacts(a, Lex()), ExtractFacts(b, Lex())};
    EXPECT_EQ(SelectTopAnswerIndex(answers, ClusterAnswers(answers, facts)), 0u);
  }
}

// Families of mutually exclusive answers make same_cluster an equivalence,
// so entropy must not depend on sample order.
TEST(EntropyProperties, BoundsPartitionAndPermutationInvariance) {
  const std::vector<std::string> family = {
      "Microsoft's revenue increased to $211B.", "Microsoft's revenue increased to $228B.",
      "Microsoft's revenue increased to $246B.", "Microsoft's revenue increased to $266B.",
      "Apple's EPS fell to $1.52.",
  };
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Rng rng(SeedMixer(5).Add(trial).value());
    const int k = 1 + static_cast<int>(rng.Below(12));
    std::vector<std::string> texts;
    for (int i = 0; i < k; ++i) texts.push_back(family[rng.Below(family.size())]);
    const auto cs = ClusterTexts(texts);
    const double h = SemanticEntropy(cs);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(k)) + 1e-12);
    std::vector<int> seen(k, 0);
    double total = 0.0;
    for (std::size_t j = 0; j < cs.clusters.size(); ++j) {
      for (auto m : cs.clusters[j].members) seen[m]++;
      EXPECT_DOUBLE_EQ(cs.probabilities[j],
                       static_cast<double>(cs.clusters[j].members.size()) / k);
      total += cs.probabilities[j];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (int s : seen) EXPECT_EQ(s, 1);
    auto shuffled = texts;
    rng.Shuffle(shuffled.begin(), shuffled.end());
    EXPECT_NEAR(SemanticEntropy(ClusterTexts(shuffled)), h, 1e-12);
    auto probs = cs.probabilities;
    std::reverse(probs.begin(), probs.end());
    EXPECT_NEAR(EntropyOf(probs), h, 1e-12);
  }
}

TEST(ClusterJson, ListsMembersAndRepresentatives) {
  std::vector<ScoredAnswer> answers;
  const auto cs = ClusterTexts({"Apple grew.", "Apple grew.", "Nike fell."}, &answers);
  const auto j = ClusterSetToJson(cs, answers);
  EXPECT_EQ(j["clusters"].size(), 2u);
  EXPECT_EQ(j["clusters"][0]["members"].size(), 2u);
}

}  // namespace
}  // namespace eclipse
