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

#ifndef ECLIPSE_METRICS_HPP_
#define ECLIPSE_METRICS_HPP_

#include <span>
#include <vector>

namespace eclipse {

// Labels are 0/1 with 1 = hallucinated (the positive class). Higher scores
// mean "more likely hallucinated".

// Mann-Whitney AUC, ties counting one half. Throws kSingleClass.
double RocAuc(std::span<const double> scores, std::span<const int> y);

// Step-wise AP over the descending sweep, each tie block treated as one
// threshold. Throws kNoPositives.
double AveragePrecision(std::span<const double> scores, std::span<const int> y);

struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

struct PrfScores {
  double precision = 0.0;  // 0 when nothing is predicted positive
  double recall = 0.0;
  double f1 = 0.0;
};

Confusion ConfusionAt(std::span<const double> scores, std::span<const int> y, double threshold);
PrfScores PrecisionRecallF1(const Confusion& c);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// One point per distinct score, descending, starting from (0, 0).
std::vector<RocPoint> RocCurve(std::span<const double> scores, std::span<const int> y);

}  // namespace eclipse

#endif  // ECLIPSE_METRICS_HPP_
