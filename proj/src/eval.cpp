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

#include "eclipse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "eclipse/error.hpp"
#include "eclipse/rng.hpp"

namespace eclipse {

namespace {

using ojson = nlohmann::ordered_json;

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T>
std::vector<T> Subset(std::span<const T> values, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(values[i]);
  return out;
}

ojson CoverageJson(const std::vector<CoveragePoint>& points) {
  ojson out = ojson::array();
  for (const auto& p : points) {
    out.push_back({{"coverage", p.coverage},
                   {"accepted", p.accepted},
                   {"hallucinated", p.hallucinated},
                   {"rate", p.rate}});
  }
  return out;
}

ojson MeanStdJson(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

ojson FeatureList(std::span<const Feature> features) {
  ojson out = ojson::array();
  for (auto f : features) out.push_back(FeatureName(f));
  return out;
}

}  // namespace

std::vector<int> StratifiedFolds(std::span<const int> y, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::kInvalidArgument, "need at least two folds");
  std::vector<int> assignment(y.size(), -1);
  int next = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(k)) {
      throw Error(Errc::kTooFewPerClass, "class " + std::to_string(cls) + " has " +
                                             std::to_string(members.size()) + " rows for " +
                                             std::to_string(k) + " folds");
    }
    Rng rng(SeedMixer(seed).Add("folds").Add(static_cast<std::uint64_t>(cls)).value());
    rng.Shuffle(members.begin(), members.end());
    for (auto i : members) {
      assignment[i] = next;
      next = (next + 1) % k;
    }
  }
  return assignment;
}

CvResult CrossValidate(std::span<const FeatureRow> rows, std::span<const Feature> features,
                       int k, std::uint64_t seed, const FitOptions& options) {
  const auto y = LabelVector(rows);
  CvResult cv;
  cv.features.assign(features.begin(), features.end());
  cv.assignment = StratifiedFolds(y, k, seed);
  cv.oof.assign(rows.size(), 0.0);
  double auc_sum = 0.0;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (cv.assignment[i] == fold ? test : train).push_back(i);
    }
    const auto train_rows = Subset(rows, train);
    const auto test_rows = Subset(rows, test);
    DetectorModel model = TrainDetector(train_rows, features, options);
    const auto probs = PredictProba(model, test_rows);
    const auto y_test = LabelVector(test_rows);
    for (std::size_t t = 0; t < test.size(); ++t) cv.oof[test[t]] = probs[t];

    FoldMetrics m;
    m.fold = fold;
    m.n_train = train.size();
    m.n_test = test.size();
    m.auc = RocAuc(probs, y_test);
    m.ap = AveragePrecision(probs, y_test);
    m.threshold = model.threshold;
    m.prf = PrecisionRecallF1(ConfusionAt(probs, y_test, model.threshold));
    auc_sum += m.auc;
    cv.folds.push_back(m);
    cv.models.push_back(std::move(model));
  }
  cv.mean_auc = auc_sum / k;
  return cv;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::kInvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapCi Bootstrap(std::span<const double> scores, std::span<const int> y, int n_resamples,
                      std::uint64_t seed, const MetricFn& metric, Exec exec) {
  if (n_resamples < 100) throw Error(Errc::kInvalidArgument, "need at least 100 resamples");
  if (scores.size() != y.size() || scores.empty()) {
    throw Error(Errc::kInvalidArgument, "bootstrap needs matching nonempty inputs");
  }
  const std::size_t n = scores.size();
  const std::uint64_t budget = 10ULL * static_cast<std::uint64_t>(n_resamples);
  std::vector<double> values(static_cast<std::size_t>(n_resamples), 0.0);
  std::vector<std::uint64_t> attempts(values.size(), 0);
  ParallelFor(values.size(), exec, [&](std::size_t r) {
    std::vector<double> s(n);
    std::vector<int> t(n);
    for (std::uint64_t a = 0; a < budget; ++a) {
      attempts[r] = a + 1;
      Rng rng(SeedMixer(seed).Add("bootstrap").Add(r).Add(a).value());
      int pos = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rng.Below(n));
        s[i] = scores[j];
        t[i] = y[j];
        pos += t[i];
      }
      if (pos == 0 || pos == static_cast<int>(n)) continue;
      values[r] = metric(s, t);
      return;
    }
  });
  BootstrapCi ci;
  ci.n_resamples = n_resamples;
  ci.seed = seed;
  ci.attempts = std::accumulate(attempts.begin(), attempts.end(), std::uint64_t{0});
  if (ci.attempts > budget) {
    throw Error(Errc::kDegenerateResamples,
                "single-class resamples exhausted the budget of " + std::to_string(budget));
  }
  ci.lo = Quantile(values, 0.025);
  ci.hi = Quantile(values, 0.975);
  return ci;
}

std::vector<std::vector<Feature>> DefaultLadder() {
  using F = Feature;
  return {{F::kH},
          {F::kH, F::kCEff},
          {F::kH, F::kCEff, F::kLQ, F::kLQE},
          {kAllFeatures.begin(), kAllFeatures.end()}};
}

std::vector<AblationRow> AblationLadder(std::span<const FeatureRow> rows,
                                        std::span<const std::vector<Feature>> ladder, int k,
                                        std::uint64_t seed, const FitOptions& options) {
  std::vector<AblationRow> out;
  for (const auto& rung : ladder) {
    AblationRow row;
    row.features = rung;
    row.auc = CrossValidate(rows, rung, k, seed, options).mean_auc;
    if (!out.empty()) row.delta = row.auc - out.back().auc;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> DefaultCoverageGrid() {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<CoveragePoint> CoverageCurve(std::span<const double> probabilities,
                                         std::span<const int> y,
                                         std::span<const std::string> ids,
                                         std::span<const double> grid) {
  const std::size_t n = probabilities.size();
  if (y.size() != n || ids.size() != n || n == 0) {
    throw Error(Errc::kInvalidArgument, "coverage needs matching nonempty inputs");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (probabilities[a] != probabilities[b]) return probabilities[a] < probabilities[b];
    return ids[a] < ids[b];
  });
  std::vector<CoveragePoint> out;
  for (double c : grid) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(Errc::kInvalidArgument, "coverage must be in (0, 1]");
    CoveragePoint p;
    p.coverage = c;
    // The slack keeps 0.3 * 200 from rounding up to 61.
    p.accepted = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(c * static_cast<double>(n) - 1e-9)), 1, n);
    for (std::size_t i = 0; i < p.accepted; ++i) p.hallucinated += y[order[i]] == 1;
    p.rate = static_cast<double>(p.hallucinated) / static_cast<double>(p.accepted);
    out.push_back(p);
  }
  return out;
}

MeanStd Summarize(std::span<const double> values) {
  MeanStd m;
  if (values.empty()) return m;
  m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

EvalReport Evaluate(std::span<const FeatureRow> rows, std::span<const Feature> features,
                    const EvalOptions& options) {
  EvalReport r;
  r.n = rows.size();
  r.features.assign(features.begin(), features.end());
  const auto y = LabelVector(rows);
  r.prevalence = static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(r.n);
  std::vector<std::string> ids;
  for (const auto& row : rows) ids.push_back(row.id);

  r.cv = CrossValidate(rows, features, options.folds, options.seed, options.fit);
  std::vector<double> aucs, aps, ps, rs, fs;
  for (const auto& f : r.cv.folds) {
    aucs.push_back(f.auc);
    aps.push_back(f.ap);
    ps.push_back(f.prf.precision);
    rs.push_back(f.prf.recall);
    fs.push_back(f.prf.f1);
  }
  r.auc = Summarize(aucs);
  r.ap = Summarize(aps);
  r.precision = Summarize(ps);
  r.recall = Summarize(rs);
  r.f1 = Summarize(fs);
  r.pooled_auc = RocAuc(r.cv.oof, y);
  r.pooled_ap = AveragePrecision(r.cv.oof, y);
  r.ci = Bootstrap(r.cv.oof, y, options.bootstrap, options.seed,
                   [](auto s, auto t) { return RocAuc(s, t); }, options.exec);
  if (options.ablation) {
    r.ablation = AblationLadder(rows, options.ladder, options.folds, options.seed, options.fit);
  }
  const std::vector<Feature> entropy_only = {Feature::kH};
  r.baseline = CrossValidate(rows, entropy_only, options.folds, options.seed, options.fit);
  r.coverage = CoverageCurve(r.cv.oof, y, ids, options.coverage_grid);
  r.baseline_coverage = CoverageCurve(r.baseline.oof, y, ids, options.coverage_grid);
  r.roc = RocCurve(r.cv.oof, y);
  r.full_model = TrainDetector(rows, features, options.fit);
  return r;
}

std::string FeatureSetName(std::span<const Feature> features) {
  std::string out;
  for (auto f : features) {
    if (!out.empty()) out += '+';
    out += FeatureName(f);
  }
  return out;
}

ojson ReportToJson(const EvalReport& r, const EvalOptions& options) {
  ojson j;
  j["n"] = r.n;
  j["prevalence"] = r.prevalence;
  j["features"] = FeatureList(r.features);
  j["folds"] = options.folds;
  j["seed"] = options.seed;
  ojson folds = ojson::array();
  for (const auto& f : r.cv.folds) {
    folds.push_back({{"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"auc", f.auc},
                     {"ap", f.ap},
                     {"threshold", f.threshold},
                     {"precision", f.prf.precision},
                     {"recall", f.prf.recall},
                     {"f1", f.prf.f1}});
  }
  j["per_fold"] = folds;
  j["fold_summary"] = {{"auc", MeanStdJson(r.auc)},
                       {"ap", MeanStdJson(r.ap)},
                       {"precision", MeanStdJson(r.precision)},
                       {"recall", MeanStdJson(r.recall)},
                       {"f1", MeanStdJson(r.f1)}};
  j["cross_validated_auc"] = r.cv.mean_auc;
  j["pooled_out_of_fold"] = {{"auc", r.pooled_auc}, {"ap", r.pooled_ap}};
  j["bootstrap_ci"] = {{"metric", "roc_auc"},
                       {"scores", "pooled_out_of_fold"},
                       {"lo", r.ci.lo},
                       {"hi", r.ci.hi},
                       {"n_resamples", r.ci.n_resamples},
                       {"seed", r.ci.seed},
                       {"attempts", r.ci.attempts}};
  j["entropy_only_auc"] = r.baseline.mean_auc;
  if (!r.ablation.empty()) {
    ojson rows = ojson::array();
    for (const auto& a : r.ablation) {
      ojson row = {{"features", FeatureList(a.features)}, {"auc", a.auc}};
      row["delta"] = a.delta ? ojson(*a.delta) : ojson(nullptr);
      rows.push_back(row);
    }
    j["ablation"] = rows;
  }
  j["coverage"] = CoverageJson(r.coverage);
  j["entropy_only_coverage"] = CoverageJson(r.baseline_coverage);
  ojson coef = ojson::array();
  for (const auto& e : CoefficientReport(r.full_model)) {
    coef.push_back({{"feature", FeatureName(e.feature)},
                    {"coefficient", e.coefficient},
                    {"expected_sign", e.expected_sign > 0 ? "+" : "-"},
                    {"matches", e.matches}});
  }
  j["coefficients"] = coef;
  return j;
}

std::string CoverageCsv(const EvalReport& r) {
  std::string out = "coverage,accepted,hallucinated,rate,entropy_only_rate\n";
  for (std::size_t i = 0; i < r.coverage.size(); ++i) {
    const auto& p = r.coverage[i];
    out += Num(p.coverage) + "," + std::to_string(p.accepted) + "," +
           std::to_string(p.hallucinated) + "," + Num(p.rate) + "," +
           Num(r.baseline_coverage[i].rate) + "\n";
  }
  return out;
}

std::string AblationCsv(const EvalReport& r) {
  std::string out = "features,auc,delta\n";
  for (const auto& a : r.ablation) {
    out += FeatureSetName(a.features) + "," + Num(a.auc) + "," +
           (a.delta ? Num(*a.delta) : std::string()) + "\n";
  }
  return out;
}

std::string RocCsv(const EvalReport& r) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : r.roc) {
    out += (std::isinf(p.threshold) ? std::string("inf") : Num(p.threshold)) + "," +
           Num(p.fpr) + "," + Num(p.tpr) + "\n";
  }
  return out;
}

}  // namespace eclipse
