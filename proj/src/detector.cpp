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

#include "eclipse/detector.hpp"

#include <algorithm>
#include <cmath>

#include "eclipse/error.hpp"

namespace eclipse {

namespace {

double Softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void RequireFinite(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw Error(Errc::kNonFinite, "feature matrix has non-finite values");
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::MatrixXd Standardizer::Transform(const Eigen::MatrixXd& x) const {
  return (x.rowwise() - means.transpose()).array().rowwise() / stds.transpose().array();
}

Eigen::VectorXd Standardizer::Transform(const Eigen::VectorXd& x) const {
  return (x - means).array() / stds.array();
}

Standardizer StandardizeFit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw Error(Errc::kTooFewRows, "standardization needs at least two rows");
  RequireFinite(x);
  Standardizer s;
  const double n = static_cast<double>(x.rows());
  s.means = x.colwise().sum().transpose() / n;
  s.stds.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.means(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.stds(j) = sd < kStdFloor ? 1.0 : sd;
  }
  return s;
}

std::vector<double> ClassWeights(std::span<const int> y, bool balanced) {
  std::vector<double> s(y.size(), 1.0);
  if (!balanced) return s;
  const double n = static_cast<double>(y.size());
  const double n_pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  const double n_neg = n - n_pos;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s[i] = n / (2.0 * (y[i] == 1 ? n_pos : n_neg));
  }
  return s;
}

double LogisticObjective(const Eigen::MatrixXd& x, std::span<const int> y,
                         std::span<const double> sample_weights, const Eigen::VectorXd& w,
                         double beta, double reg_strength) {
  const Eigen::VectorXd z = (x * w).array() + beta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    loss += sample_weights[k] * (Softplus(z(i)) - y[k] * z(i));
  }
  return loss + w.squaredNorm() / (2.0 * reg_strength);
}

LogisticFit FitLogistic(const Eigen::MatrixXd& x, std::span<const int> y,
                        const FitOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(Errc::kInvalidArgument, "row and label counts differ");
  }
  if (!(options.reg_strength > 0.0)) {
    throw Error(Errc::kInvalidArgument, "regularization strength must be positive");
  }
  RequireFinite(x);
  const auto n_pos = std::count(y.begin(), y.end(), 1);
  if (n_pos == 0 || n_pos == static_cast<std::ptrdiff_t>(y.size())) {
    throw Error(Errc::kSingleClass, "training rows contain a single class");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const auto s = ClassWeights(y, options.class_balanced);
  const double inv_c = 1.0 / options.reg_strength;

  // Parameters theta = (w, beta); the design matrix gets a ones column.
  Eigen::MatrixXd xa(n, d + 1);
  xa.leftCols(d) = x;
  xa.col(d).setOnes();
  Eigen::VectorXd sw(n), yv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sw(i) = s[static_cast<std::size_t>(i)];
    yv(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, inv_c);
  penalty(d) = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    return LogisticObjective(x, y, s, theta.head(d), theta(d), options.reg_strength);
  };

  LogisticFit fit;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double f = objective(theta);
  fit.objective_trace.push_back(f);
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd z = xa * theta;
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = Sigmoid(z(i));
    const Eigen::VectorXd grad =
        xa.transpose() * (sw.array() * (p - yv).array()).matrix() +
        (penalty.array() * theta.array()).matrix();
    fit.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    fit.iterations = iter;
    if (fit.gradient_norm < options.tolerance) {
      fit.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;

    const Eigen::VectorXd curvature = sw.array() * p.array() * (1.0 - p.array());
    Eigen::MatrixXd hessian = xa.transpose() * curvature.asDiagonal() * xa;
    hessian.diagonal() += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || grad.dot(step) >= 0.0) {
      step = -grad;  // fall back to steepest descent
    }
    // Armijo backtracking.
    const double slope = grad.dot(step);
    double t = 1.0;
    Eigen::VectorXd next = theta + step;
    double f_next = objective(next);
    for (int k = 0; k < 60 && !(f_next <= f + 1e-4 * t * slope); ++k) {
      t *= 0.5;
      next = theta + t * step;
      f_next = objective(next);
    }
    if (!std::isfinite(f_next)) throw Error(Errc::kNonFinite, "objective diverged");
    if (f_next > f) {
      // No descent available in floating point; the iterate is optimal to
      // machine precision.
      break;
    }
    theta = next;
    f = f_next;
    fit.objective_trace.push_back(f);
  }
  fit.w = theta.head(d);
  fit.beta = theta(d);
  return fit;
}

Eigen::MatrixXd FeatureMatrix(std::span<const FeatureRow> rows,
                              std::span<const Feature> features) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < features.size(); ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i].x.Get(features[j]);
    }
  }
  return x;
}

std::vector<int> LabelVector(std::span<const FeatureRow> rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label == Label::kHallucinated ? 1 : 0);
  return y;
}

DetectorModel TrainDetector(std::span<const FeatureRow> rows,
                            std::span<const Feature> features, const FitOptions& options) {
  if (features.empty()) throw Error(Errc::kInvalidArgument, "no features selected");
  const Eigen::MatrixXd x = FeatureMatrix(rows, features);
  const auto y = LabelVector(rows);
  DetectorModel model;
  model.features.assign(features.begin(), features.end());
  model.options = options;
  model.scaler = StandardizeFit(x);
  const LogisticFit fit = FitLogistic(model.scaler.Transform(x), y, options);
  model.w = fit.w;
  model.beta = fit.beta;
  model.iterations = fit.iterations;
  model.converged = fit.converged;
  model.threshold = SelectThreshold(PredictProba(model, rows), y);
  return model;
}

double PredictProba(const DetectorModel& model, const FeatureVector& x) {
  double z = model.beta;
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    z += model.w(k) * (x.Get(model.features[j]) - model.scaler.means(k)) / model.scaler.stds(k);
  }
  return Sigmoid(z);
}

std::vector<double> PredictProba(const DetectorModel& model, std::span<const FeatureRow> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(PredictProba(model, r.x));
  return out;
}

double SelectThreshold(std::span<const double> scores, std::span<const int> y) {
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) return 0.5;

  // Sweep thresholds upward; at midpoint m_k everything above distinct[k]
  // is predicted positive.
  std::vector<std::pair<double, int>> sorted;
  sorted.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) sorted.emplace_back(scores[i], y[i]);
  std::sort(sorted.begin(), sorted.end());
  const long total_pos = std::count(y.begin(), y.end(), 1);
  long tp = total_pos;
  long fp = static_cast<long>(y.size()) - total_pos;
  std::size_t cursor = 0;
  double best_f1 = -1.0;
  double best_t = 0.5;
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    while (cursor < sorted.size() && sorted[cursor].first <= distinct[k]) {
      sorted[cursor].second == 1 ? --tp : --fp;
      ++cursor;
    }
    const long fn = total_pos - tp;
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
    if (f1 > best_f1) {
      best_f1 = f1;
      best_t = 0.5 * (distinct[k] + distinct[k + 1]);
    }
  }
  return best_t;
}

int ExpectedSign(Feature f) {
  switch (f) {
    case Feature::kH:
    case Feature::kLQ:
    case Feature::kLQE:
      return +1;
    case Feature::kCEff:
    case Feature::kDeltaL:
    case Feature::kRatio:
    case Feature::kPMax:
      return -1;
  }
  return 0;
}

std::vector<CoefficientEntry> CoefficientReport(const DetectorModel& model) {
  std::vector<CoefficientEntry> out;
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    CoefficientEntry e;
    e.feature = model.features[j];
    e.coefficient = model.w(static_cast<Eigen::Index>(j));
    e.expected_sign = ExpectedSign(e.feature);
    const int sign = (e.coefficient > 0.0) - (e.coefficient < 0.0);
    e.matches = sign != 0 && sign == e.expected_sign;
    out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::fabs(a.coefficient) > std::fabs(b.coefficient);
  });
  return out;
}

nlohmann::ordered_json ModelToJson(const DetectorModel& model) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json names = nlohmann::ordered_json::array();
  nlohmann::ordered_json means, stds, w;
  for (std::size_t k = 0; k < model.features.size(); ++k) {
    const std::string name(FeatureName(model.features[k]));
    const auto i = static_cast<Eigen::Index>(k);
    names.push_back(name);
    means[name] = model.scaler.means(i);
    stds[name] = model.scaler.stds(i);
    w[name] = model.w(i);
  }
  j["features"] = names;
  j["means"] = means;
  j["stds"] = stds;
  j["w"] = w;
  j["beta"] = model.beta;
  j["threshold"] = model.threshold;
  j["training_meta"] = {{"reg_strength", model.options.reg_strength},
                        {"class_balanced", model.options.class_balanced},
                        {"max_iterations", model.options.max_iterations},
                        {"tolerance", model.options.tolerance},
                        {"iterations", model.iterations},
                        {"converged", model.converged}};
  return j;
}

DetectorModel ModelFromJson(const nlohmann::json& j) {
  try {
    DetectorModel m;
    for (const auto& name : j.at("features")) m.features.push_back(ParseFeature(name.get<std::string>()));
    const auto d = static_cast<Eigen::Index>(m.features.size());
    m.scaler.means.resize(d);
    m.scaler.stds.resize(d);
    m.w.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const std::string name(FeatureName(m.features[static_cast<std::size_t>(i)]));
      m.scaler.means(i) = j.at("means").at(name).get<double>();
      m.scaler.stds(i) = j.at("stds").at(name).get<double>();
      m.w(i) = j.at("w").at(name).get<double>();
    }
    m.beta = j.at("beta").get<double>();
    m.threshold = j.at("threshold").get<double>();
    const auto& meta = j.at("training_meta");
    m.options.reg_strength = meta.at("reg_strength").get<double>();
    m.options.class_balanced = meta.at("class_balanced").get<bool>();
    m.options.max_iterations = meta.at("max_iterations").get<int>();
    m.options.tolerance = meta.at("tolerance").get<double>();
    m.iterations = meta.at("iterations").get<int>();
    m.converged = meta.at("converged").get<bool>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParse, std::string("bad model file: ") + e.what());
  }
}

}  // namespace eclipse
