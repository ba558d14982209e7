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

#ifndef ECLIPSE_EVAL_HPP_
#define ECLIPSE_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eclipse/capacity.hpp"
#include "eclipse/detector.hpp"
#include "eclipse/kernels.hpp"
#include "eclipse/metrics.hpp"
#include "json.hpp"

namespace eclipse {

// Fold index per row. Each class is shuffled under the seed and dealt round
// robin, continuing where the previous class stopped, so fold sizes and
// class counts differ by at most one. Throws kTooFewPerClass.
std::vector<int> StratifiedFolds(std::span<const int> y, int k, std::uint64_t seed);

struct FoldMetrics {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double auc = 0.0;
  double ap = 0.0;
  double threshold = 0.5;
  PrfScores prf;
};

struct CvResult {
  std::vector<Feature> features;
  std::vector<int> assignment;
  std::vector<FoldMetrics> folds;
  std::vector<double> oof;  // held-out probability per row
  std::vector<DetectorModel> models;
  double mean_auc = 0.0;    // the cross-validated AUC
};

// Every model sees only its training folds: scaling, weights and threshold.
CvResult CrossValidate(std::span<const FeatureRow> rows, std::span<const Feature> features,
                       int k, std::uint64_t seed, const FitOptions& options = {});

using MetricFn = std::function<double(std::span<const double>, std::span<const int>)>;

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  int n_resamples = 0;
  std::uint64_t seed = 0;
  std::uint64_t attempts = 0;  // including redrawn single-class resamples
};

// Percentile 2.5/97.5 interval (linear interpolation). Resample r, attempt t
// draws from its own stream, so serial and parallel runs agree. Throws
// kDegenerateResamples after 10 * n_resamples attempts.
BootstrapCi Bootstrap(std::span<const double> scores, std::span<const int> y, int n_resamples,
                      std::uint64_t seed, const MetricFn& metric, Exec exec = Exec::kParallel);

// Linear-interpolated quantile of an unsorted sample.
double Quantile(std::vector<double> values, double q);

struct AblationRow {
  std::vector<Feature> features;
  double auc = 0.0;
  std::optional<double> delta;  // versus the previous rung
};

std::vector<std::vector<Feature>> DefaultLadder();

std::vector<AblationRow> AblationLadder(std::span<const FeatureRow> rows,
                                        std::span<const std::vector<Feature>> ladder, int k,
                                        std::uint64_t seed, const FitOptions& options = {});

struct CoveragePoint {
  double coverage = 0.0;
  std::size_t accepted = 0;
  std::size_t hallucinated = 0;
  double rate = 0.0;
};

std::vector<double> DefaultCoverageGrid();

// Accepts the ceil(c * n) rows with the lowest probability (ties by id) and
// reports the hallucinated fraction among them.
std::vector<CoveragePoint> CoverageCurve(std::span<const double> probabilities,
                                         std::span<const int> y,
                                         std::span<const std::string> ids,
                                         std::span<const double> grid);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
};

MeanStd Summarize(std::span<const double> values);

struct EvalOptions {
  int folds = 5;
  std::uint64_t seed = 42;
  int bootstrap = 1000;
  FitOptions fit;
  bool ablation = true;
  std::vector<std::vector<Feature>> ladder = DefaultLadder();
  std::vector<double> coverage_grid = DefaultCoverageGrid();
  Exec exec = Exec::kParallel;
};

struct EvalReport {
  std::size_t n = 0;
  double prevalence = 0.0;
  std::vector<Feature> features;
  CvResult cv;
  MeanStd auc, ap, precision, recall, f1;
  double pooled_auc = 0.0;
  double pooled_ap = 0.0;
  BootstrapCi ci;
  std::vector<AblationRow> ablation;  // empty when disabled
  CvResult baseline;                  // entropy-only detector
  std::vector<CoveragePoint> coverage;
  std::vector<CoveragePoint> baseline_coverage;
  std::vector<RocPoint> roc;
  DetectorModel full_model;  // trained on every row, for coefficients
};

EvalReport Evaluate(std::span<const FeatureRow> rows, std::span<const Feature> features,
                    const EvalOptions& options);

nlohmann::ordered_json ReportToJson(const EvalReport& report, const EvalOptions& options);
std::string CoverageCsv(const EvalReport& report);
std::string AblationCsv(const EvalReport& report);
std::string RocCsv(const EvalReport& report);
std::string FeatureSetName(std::span<const Feature> features);

}  // namespace eclipse

#endif  // ECLIPSE_EVAL_HPP_
