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


// Brute-force references used by the unit tests and the acceptance checks.
// They share no code with the library beyond plain data types.

#ifndef ECLIPSE_TESTS_ORACLES_HPP_
#define ECLIPSE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace eclipse::oracle {

// Every (positive, negative) pair: 2 for a win, 1 for a tie.
inline double PairAuc(const std::vector<double>& s, const std::vector<int>& y) {
  long long halves = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) (y[i] == 1 ? pos : neg)++;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      halves += s[i] > s[j] ? 2 : (s[i] == s[j] ? 1 : 0);
    }
  }
  return static_cast<double>(halves) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

// Sweeps each distinct score as a ">= t" threshold, highest first, and
// recounts the predicted set from scratch at every step.
inline double SweepAp(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> t = s;
  std::sort(t.begin(), t.end(), std::greater<>());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  long pos = 0;
  for (int v : y) pos += v == 1;
  double ap = 0.0, prev_recall = 0.0;
  for (double thr : t) {
    long tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= thr) (y[i] == 1 ? tp : fp)++;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

// Class-balanced (or unit) weighted logistic loss plus ||w||^2 / (2C).
inline double PenalizedLoss(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            const std::vector<double>& w, double beta, double c, bool balanced) {
  const double n = static_cast<double>(y.size());
  double n_pos = 0.0;
  for (int v : y) n_pos += v;
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double z = beta;
    for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * x[i][j];
    const double weight = balanced ? n / (2.0 * (y[i] == 1 ? n_pos : n - n_pos)) : 1.0;
    // log(1 + e^z) - y z, written stably.
    const double sp = std::max(z, 0.0) + std::log(1.0 + std::exp(-std::fabs(z)));
    loss += weight * (sp - y[i] * z);
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  return loss + norm2 / (2.0 * c);
}

// Minimum of PenalizedLoss over `points` values per parameter in
// [-range, range], covering w and beta.
inline double GridLossMinimum(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                              double c, bool balanced, int points = 100, double range = 6.0) {
  const std::size_t d = x.empty() ? 0 : x[0].size();
  auto at = [&](int i) { return -range + 2.0 * range * i / (points - 1); };
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> w(d, 0.0);
  std::vector<int> idx(d + 1, 0);
  // Odometer over d + 1 dimensions; the last one is beta.
  while (true) {
    for (std::size_t j = 0; j < d; ++j) w[j] = at(idx[j]);
    best = std::min(best, PenalizedLoss(x, y, w, at(idx[d]), c, balanced));
    std::size_t k = 0;
    while (k <= d && ++idx[k] == points) idx[k++] = 0;
    if (k > d) break;
  }
  return best;
}

// Best F1 over every midpoint between adjacent distinct scores, with the
// lowest midpoint winning ties; 0.5 when all scores are equal.
inline double BestThreshold(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> d = s;
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  if (d.size() < 2) return 0.5;
  double best_f1 = -1.0, best_t = 0.5;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double t = 0.5 * (d[k] + d[k + 1]);
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const bool p = s[i] >= t;
      if (y[i] == 1) (p ? tp : fn)++;
      else if (p) ++fp;
    }
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

// Reference entropy of a cluster size profile, natural log.
inline double ProfileEntropy(const std::vector<int>& sizes) {
  double total = 0.0;
  for (int s : sizes) total += s;
  double h = 0.0;
  for (int s : sizes) {
    if (s > 0) h -= (s / total) * std::log(s / total);
  }
  return h;
}

}  // namespace eclipse::oracle

#endif  // ECLIPSE_TESTS_ORACLES_HPP_
