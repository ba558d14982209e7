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

#include <cmath>
#include <random>
#include <vector>

#include "eclipse/error.hpp"
#include "eclipse/metrics.hpp"
#include "oracles.hpp"

namespace eclipse {
namespace {

struct Instance {
  std::vector<double> scores;
  std::vector<int> y;
};

// Scores come from a small level set so ties are common.
Instance RandomInstance(std::mt19937_64& gen, bool need_negative) {
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_int_distribution<int> level(0, 4);
  std::bernoulli_distribution coin(0.5);
  Instance in;
  while (true) {
    const int n = size(gen);
    in.scores.assign(n, 0.0);
    in.y.assign(n, 0);
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      in.scores[i] = level(gen) * 0.25;
      in.y[i] = coin(gen) ? 1 : 0;
      pos += in.y[i];
    }
    if (pos > 0 && (!need_negative || pos < n)) return in;
  }
}

TEST(Metrics, AucMatchesPairCountExactly) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto in = RandomInstance(gen, true);
    ASSERT_EQ(RocAuc(in.scores, in.y), oracle::PairAuc(in.scores, in.y)) << "trial " << trial;
  }
}

TEST(Metrics, ApMatchesThresholdSweepExactly) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto in = RandomInstance(gen, false);
    ASSERT_EQ(AveragePrecision(in.scores, in.y), oracle::SweepAp(in.scores, in.y))
        << "trial " << trial;
  }
}

TEST(Metrics, SinglePositiveRankedLast) {
  const std::vector<double> s = {0.9, 0.8, 0.7, 0.1};
  const std::vector<int> y = {0, 0, 0, 1};
  EXPECT_DOUBLE_EQ(AveragePrecision(s, y), 0.25);
  EXPECT_DOUBLE_EQ(RocAuc(s, y), 0.0);
}

TEST(Metrics, PerfectAndTiedScores) {
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(RocAuc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(
      AveragePrecision(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}), 0.5);
}

TEST(Metrics, InvariantUnderMonotoneTransform) {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(40), t(40);
    std::vector<int> y(40);
    for (int i = 0; i < 40; ++i) {
      s[i] = std::round(normal(gen) * 4.0);
      t[i] = std::exp(s[i] / 3.0) + 7.0;
      y[i] = i % 3 == 0;
    }
    EXPECT_EQ(RocAuc(s, y), RocAuc(t, y));
    EXPECT_EQ(AveragePrecision(s, y), AveragePrecision(t, y));
  }
}

TEST(Metrics, Errors) {
  const std::vector<double> s = {0.1, 0.2};
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  EXPECT_EQ(code([&] { RocAuc(s, std::vector<int>{1, 1}); }), Errc::kSingleClass);
  EXPECT_EQ(code([&] { AveragePrecision(s, std::vector<int>{0, 0}); }), Errc::kNoPositives);
  EXPECT_THROW(RocAuc(s, std::vector<int>{1}), Error);
  EXPECT_NO_THROW(AveragePrecision(s, std::vector<int>{1, 1}));
}

TEST(Metrics, ConfusionAndPrf) {
  const std::vector<double> s = {0.9, 0.6, 0.4, 0.2};
  const std::vector<int> y = {1, 0, 1, 0};
  const auto c = ConfusionAt(s, y, 0.5);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(c.tn, 1);
  const auto prf = PrecisionRecallF1(c);
  EXPECT_DOUBLE_EQ(prf.precision, 0.5);
  EXPECT_DOUBLE_EQ(prf.recall, 0.5);
  EXPECT_DOUBLE_EQ(prf.f1, 0.5);
  const auto none = PrecisionRecallF1(ConfusionAt(s, y, 2.0));
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(Metrics, RocCurveEndsAtOneOne) {
  const std::vector<double> s = {0.9, 0.6, 0.6, 0.2};
  const std::vector<int> y = {1, 0, 1, 0};
  const auto roc = RocCurve(s, y);
  ASSERT_EQ(roc.size(), 4u);
  EXPECT_TRUE(std::isinf(roc.front().threshold));
  EXPECT_DOUBLE_EQ(roc[1].tpr, 0.5);
  EXPECT_DOUBLE_EQ(roc[2].fpr, 0.5);
  EXPECT_DOUBLE_EQ(roc[2].tpr, 1.0);
  EXPECT_DOUBLE_EQ(roc.back().fpr, 1.0);
}

}  // namespace
}  // namespace eclipse
