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

#include "eclipse/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "eclipse/error.hpp"

namespace eclipse {

namespace {

void CheckSizes(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) {
    throw Error(Errc::kInvalidArgument, "scores and labels differ in length");
  }
}

// Indices sorted by descending score.
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double RocAuc(std::span<const double> scores, std::span<const int> y) {
  CheckSizes(scores, y);
  const long pos = std::count(y.begin(), y.end(), 1);
  const long neg = static_cast<long>(y.size()) - pos;
  if (pos == 0 || neg == 0) throw Error(Errc::kSingleClass, "AUC needs both classes");

  // Ascending sweep; a tie block contributes block_pos * block_neg halves.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  long long half_wins = 0;
  long neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    long block_pos = 0, block_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      y[order[j]] == 1 ? ++block_pos : ++block_neg;
      ++j;
    }
    half_wins += 2LL * block_pos * neg_below + static_cast<long long>(block_pos) * block_neg;
    neg_below += block_neg;
    i = j;
  }
  return static_cast<double>(half_wins) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double AveragePrecision(std::span<const double> scores, std::span<const int> y) {
  CheckSizes(scores, y);
  const long pos = std::count(y.begin(), y.end(), 1);
  if (pos == 0) throw Error(Errc::kNoPositives, "average precision needs a positive");
  const auto order = DescendingOrder(scores);
  const double p = static_cast<double>(pos);
  long tp = 0, fp = 0;
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      y[order[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    const double recall = static_cast<double>(tp) / p;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Confusion ConfusionAt(std::span<const double> scores, std::span<const int> y, double threshold) {
  CheckSizes(scores, y);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (y[i] == 1) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

PrfScores PrecisionRecallF1(const Confusion& c) {
  PrfScores s;
  if (c.tp + c.fp > 0) s.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) s.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tp > 0) s.f1 = 2.0 * c.tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  return s;
}

std::vector<RocPoint> RocCurve(std::span<const double> scores, std::span<const int> y) {
  CheckSizes(scores, y);
  const long pos = std::count(y.begin(), y.end(), 1);
  const long neg = static_cast<long>(y.size()) - pos;
  if (pos == 0 || neg == 0) throw Error(Errc::kSingleClass, "ROC needs both classes");
  const auto order = DescendingOrder(scores);
  std::vector<RocPoint> out = {{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  long tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      y[order[j]] == 1 ? ++tp : ++fp;
      ++j;
    }
    out.push_back({scores[order[i]], static_cast<double>(fp) / static_cast<double>(neg),
                   static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }
  return out;
}

}  // namespace eclipse
