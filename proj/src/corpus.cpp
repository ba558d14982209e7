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

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "eclipse/dataset.hpp"
#include "eclipse/rng.hpp"

namespace eclipse {
namespace {

struct Company {
  const char* name;
  const char* chief;
};

constexpr std::array<Company, 20> kCompanies = {{
    {"Microsoft", "Satya Nadella"},   {"Apple", "Tim Cook"},
    {"Alphabet", "Sundar Pichai"},    {"Amazon", "Andy Jassy"},
    {"Meta", "Mark Zuckerberg"},      {"Nvidia", "Jensen Huang"},
    {"Tesla", "Elon Musk"},           {"Intel", "Pat Gelsinger"},
    {"Oracle", "Safra Catz"},         {"Netflix", "Ted Sarandos"},
    {"Adobe", "Shantanu Narayen"},    {"Salesforce", "Marc Benioff"},
    {"IBM", "Arvind Krishna"},        {"Cisco", "Chuck Robbins"},
    {"Qualcomm", "Cristiano Amon"},   {"AMD", "Lisa Su"},
    {"JPMorgan Chase", "Jamie Dimon"}, {"Walmart", "Doug McMillon"},
    {"Disney", "Bob Iger"},           {"Nike", "John Donahoe"},
}};

constexpr std::array<const char*, 6> kPeriods = {
    "fiscal 2022", "fiscal 2023", "Q2 2023", "Q3 2023", "Q4 2023", "Q1 2024"};

constexpr std::array<const char*, 4> kDollarMetrics = {
    "revenue", "net income", "operating income", "free cash flow"};

constexpr std::array<const char*, 3> kPercentMetrics = {
    "gross margin", "operating margin", "net margin"};

constexpr std::array<const char*, 3> kUpWords = {"increased", "rose", "grew"};
constexpr std::array<const char*, 3> kDownWords = {"decreased", "fell", "declined"};

constexpr std::array<const char*, 4> kFillers = {
    "",
    " Management highlighted continued investment in cloud infrastructure.",
    " The results were discussed with analysts during the quarterly call.",
    " Currency movements had a modest effect on the reported figures.",
};

std::string Fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

template <typename T, std::size_t N>
const T& Pick(Rng& rng, const std::array<T, N>& items) {
  return items[rng.Below(N)];
}

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 32);
  return s;
}

}  // namespace

std::vector<QAExample> GenerateCleanCorpus(std::size_t n, std::uint64_t seed) {
  std::vector<QAExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(SeedMixer(seed).Add("corpus").Add(i).value());
    const Company& co = kCompanies[rng.Below(kCompanies.size())];
    const std::string company = co.name;
    const std::string period = Pick(rng, kPeriods);
    const bool up = rng.Bernoulli(0.65);
    const std::string dir_e = up ? Pick(rng, kUpWords) : Pick(rng, kDownWords);
    const std::string dir_a = up ? Pick(rng, kUpWords) : Pick(rng, kDownWords);
    const std::string filler = Pick(rng, kFillers);
    const double change = rng.Uniform(0.04, 0.25);
    const bool follow_up = rng.Bernoulli(0.4);

    QAExample e;
    char id[32];
    std::snprintf(id, sizeof(id), "fqa-%03zu", i);
    e.id = id;
    e.source_id = e.id;

    switch (rng.Below(4)) {
      case 0: {
        const std::string metric = Pick(rng, kDollarMetrics);
        const double now = rng.Uniform(5.0, 250.0);
        const double before = up ? now / (1.0 + change) : now * (1.0 + change);
        e.query = "What was " + company + "'s " + metric + " in " + period + "?";
        e.evidence = company + " reported " + metric + " of $" + Fixed(now, 1) +
                     "B for " + period + ", and " + metric + " " + dir_e +
                     " from $" + Fixed(before, 1) + "B in the prior year." + filler;
        e.answer = company + "'s " + metric + " " + dir_a + " to $" + Fixed(now, 1) +
                   "B in " + period + ".";
        if (follow_up) e.answer += " The prior-year figure was $" + Fixed(before, 1) + "B.";
        break;
      }
      case 1: {
        const std::string metric = Pick(rng, kPercentMetrics);
        const double now = rng.Uniform(15.0, 75.0);
        const double before = up ? now - rng.Uniform(1.0, 6.0) : now + rng.Uniform(1.0, 6.0);
        e.query = "How did " + company + "'s " + metric + " change in " + period + "?";
        e.evidence = company + "'s " + metric + " " + dir_e + " to " + Fixed(now, 1) +
                     "% in " + period + ", compared with " + Fixed(before, 1) +
                     "% a year ago." + filler;
        e.answer = company + "'s " + metric + " " + dir_a + " to " + Fixed(now, 1) + "%.";
        if (follow_up) e.answer += " A year ago it stood at " + Fixed(before, 1) + "%.";
        break;
      }
      case 2: {
        const std::string metric = Pick(rng, kDollarMetrics);
        const double now = rng.Uniform(5.0, 250.0);
        e.query = "What did " + company + "'s CEO say about " + metric + " on the " +
                  period + " earnings call?";
        e.evidence = "On the " + period + " earnings call, CEO " + co.chief + " said " +
                     company + "'s " + metric + " " + dir_e + " to $" + Fixed(now, 1) +
                     "B." + filler;
        e.answer = std::string(co.chief) + " said " + company + "'s " + metric + " " +
                   dir_a + " to $" + Fixed(now, 1) + "B.";
        if (follow_up) e.answer += " The comment was made on the " + period + " earnings call.";
        break;
      }
      default: {
        const double now = rng.Uniform(0.5, 12.0);
        const double before = up ? now / (1.0 + change) : now * (1.0 + change);
        e.query = "What was " + company + "'s earnings per share in " + period + "?";
        e.evidence = company + " posted EPS of $" + Fixed(now, 2) + " for " + period +
                     ", and EPS " + dir_e + " from $" + Fixed(before, 2) +
                     " a year earlier." + filler;
        e.answer = Capitalize(company) + "'s EPS " + dir_a + " to $" + Fixed(now, 2) +
                   " in " + period + ".";
        if (follow_up) e.answer += " A year earlier EPS was $" + Fixed(before, 2) + ".";
        break;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string DefaultLexiconTsv() {
  std::string out = "# name\tcategory\n";
  for (const auto& c : kCompanies) out += std::string(c.name) + "\tcompany\n";
  for (const auto& c : kCompanies) out += std::string(c.chief) + "\tperson\n";
  return out;
}

Lexicon DefaultLexicon() { return Lexicon::Parse(DefaultLexiconTsv()); }

std::vector<std::string> DefaultFabricationTemplates() {
  return {
      "{company} also disclosed {metric} of ${number}B for the same period.",
      "The company also announced a ${number}B acquisition of {company}.",
      "{person} added that {metric} reached ${number}B.",
      "Management also guided {metric} to {number}% for next year.",
  };
}

}  // namespace eclipse
