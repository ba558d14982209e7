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

#ifndef ECLIPSE_DETECTOR_HPP_
#define ECLIPSE_DETECTOR_HPP_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eclipse/capacity.hpp"
#include "json.hpp"

namespace eclipse {

struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;  // population; values below kStdFloor become 1

  Eigen::MatrixXd Transform(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd Transform(const Eigen::VectorXd& x) const;
};

inline constexpr double kStdFloor = 1e-12;

// Throws kTooFewRows below two rows and kNonFinite on NaN or infinity.
Standardizer StandardizeFit(const Eigen::MatrixXd& x);

struct FitOptions {
  double reg_strength = 1.0;  // C; the penalty is ||w||^2 / (2C)
  bool class_balanced = true;
  int max_iterations = 1000;
  double tolerance = 1e-6;  // on the gradient infinity norm
};

struct LogisticFit {
  Eigen::VectorXd w;
  double beta = 0.0;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;  // one entry per iterate, from w = 0
};

// Per-row weights N / (2 N_k) when balanced, else 1. `y` holds 0/1.
std::vector<double> ClassWeights(std::span<const int> y, bool balanced);

// sum_i s_i * [log(1 + e^{z_i}) - y_i z_i] + ||w||^2 / (2C), z = Xw + beta.
double LogisticObjective(const Eigen::MatrixXd& x, std::span<const int> y,
                         std::span<const double> sample_weights, const Eigen::VectorXd& w,
                         double beta, double reg_strength);

// Damped Newton with backtracking from w = 0, beta = 0 on already
// standardized inputs. Throws kSingleClass or kNonFinite.
LogisticFit FitLogistic(const Eigen::MatrixXd& x_std, std::span<const int> y,
                        const FitOptions& options = {});

struct DetectorModel {
  std::vector<Feature> features;
  Standardizer scaler;
  Eigen::VectorXd w;
  double beta = 0.0;
  double threshold = 0.5;
  FitOptions options;
  int iterations = 0;
  bool converged = false;
};

Eigen::MatrixXd FeatureMatrix(std::span<const FeatureRow> rows,
                              std::span<const Feature> features);
std::vector<int> LabelVector(std::span<const FeatureRow> rows);

// Standardize, fit and pick the threshold, all on `rows`.
DetectorModel TrainDetector(std::span<const FeatureRow> rows,
                            std::span<const Feature> features, const FitOptions& options = {});

double Sigmoid(double z);
double PredictProba(const DetectorModel& model, const FeatureVector& x);
std::vector<double> PredictProba(const DetectorModel& model, std::span<const FeatureRow> rows);

// Midpoint between consecutive distinct scores maximizing F1 for
// "score >= threshold means hallucinated"; lowest on ties, 0.5 when all
// scores are equal.
double SelectThreshold(std::span<const double> scores, std::span<const int> y);

struct CoefficientEntry {
  Feature feature;
  double coefficient = 0.0;
  int expected_sign = 0;
  bool matches = false;
};

int ExpectedSign(Feature f);

// Sorted by descending |coefficient|.
std::vector<CoefficientEntry> CoefficientReport(const DetectorModel& model);

nlohmann::ordered_json ModelToJson(const DetectorModel& model);
DetectorModel ModelFromJson(const nlohmann::json& j);

}  // namespace eclipse

#endif  // ECLIPSE_DETECTOR_HPP_
