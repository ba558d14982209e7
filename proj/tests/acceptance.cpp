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


// Release checklist. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "eclipse/entropy.hpp"
#include "eclipse/hashing.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/pipeline.hpp"
#include "eclipse/remote_backend.hpp"
#include "eclipse/theory.hpp"
#include "oracles.hpp"

namespace eclipse {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome Theory() {
  const auto t0 = Clock::now();
  ObjectiveParams p;  // alpha 1, lambda 1, a 2
  const auto cert =
      CertifyConvexity(p, p.H_pref - 10.0 / p.a, p.H_pref + 10.0 / p.a, 1000000);
  const auto cubic = MaxCubicTerm(1000000);
  const double exact = 1.0 / (6.0 * std::sqrt(3.0));
  const double elapsed = Seconds(t0);
  const double floor = 2.0 * p.alpha - p.lambda * p.a * p.a / 4.0;
  const bool pass = cert.bound_satisfied && cert.all_positive &&
                    cert.min_second_derivative >= floor - 1e-9 &&
                    std::fabs(cubic.grid_max - exact) <= 1e-9 && elapsed < 5.0;
  return {pass, Fmt("min J'' %.9f (need >= %.9f), grid max |f| %.12f vs %.12f, %.2fs",
                    cert.min_second_derivative, floor - 1e-9, cubic.grid_max, exact, elapsed)};
}

Outcome MetricOracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2026);
  std::uniform_int_distribution<int> size(2, 8), level(0, 5);
  std::bernoulli_distribution coin(0.5);
  int auc_checked = 0, ap_checked = 0, mismatches = 0;
  // Draw until each metric has seen 1000 valid instances.
  while (auc_checked < 1000 || ap_checked < 1000) {
    const int n = size(gen);
    std::vector<double> s(n);
    std::vector<int> y(n);
    int pos = 0;
    for (int i = 0; i < n; ++i) {
      s[i] = level(gen) / 5.0;
      y[i] = coin(gen);
      pos += y[i];
    }
    if (pos > 0 && pos < n && auc_checked < 1000) {
      ++auc_checked;
      mismatches += RocAuc(s, y) != oracle::PairAuc(s, y);
    }
    if (pos > 0 && ap_checked < 1000) {
      ++ap_checked;
      mismatches += AveragePrecision(s, y) != oracle::SweepAp(s, y);
    }
  }
  const double elapsed = Seconds(t0);
  return {mismatches == 0 && elapsed < 10.0,
          Fmt("%d AUC and %d AP instances, %d mismatches, %.2fs", auc_checked, ap_checked,
              mismatches, elapsed)};
}

Outcome DetectorOracle() {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> size(3, 8);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  int instances = 0, failures = 0;
  double worst = -1e300;
  for (int d : {1, 1, 1, 1, 1, 2}) {
    for (int trial = 0; trial < (d == 1 ? 40 : 8); ++trial) {
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      int pos = 0;
      do {
        const int n = size(gen);
        x.assign(n, std::vector<double>(d));
        y.assign(n, 0);
        pos = 0;
        for (int i = 0; i < n; ++i) {
          y[i] = coin(gen);
          pos += y[i];
          for (int j = 0; j < d; ++j) x[i][j] = normal(gen) + (j == 0 && y[i] ? 1.0 : 0.0);
        }
      } while (pos == 0 || pos == static_cast<int>(y.size()));
      Eigen::MatrixXd m(static_cast<Eigen::Index>(x.size()), d);
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (int j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), j) = x[i][j];
      }
      const auto fit = FitLogistic(m, y);
      const std::vector<double> w(fit.w.data(), fit.w.data() + d);
      const double ours = oracle::PenalizedLoss(x, y, w, fit.beta, 1.0, true);
      const double grid = oracle::GridLossMinimum(x, y, 1.0, true, 100);
      worst = std::max(worst, ours - grid);
      failures += !(ours <= grid + 1e-4);
      ++instances;
    }
  }
  return {failures == 0, Fmt("%d instances, worst optimizer minus grid %.3g (tolerance 1e-4)",
                             instances, worst)};
}

Outcome Entropy() {
  const Lexicon lex = DefaultLexicon();
  auto cluster = [&](const std::vector<std::string>& texts) {
    std::vector<ScoredAnswer> answers;
    std::vector<FactSet> facts;
    for (const auto& t : texts) {
      answers.push_back({t, {-1.0}, FinishReason::kStop});
      facts.push_back(ExtractFacts(t, lex));
    }
    return ClusterAnswers(answers, facts);
  };
  const std::string a = "Microsoft's revenue increased to $211B.";
  const std::string b = "Apple's revenue decreased to $90B.";
  std::vector<std::string> p10(10, a), p55, p73(7, a);
  for (int i = 0; i < 5; ++i) p55.insert(p55.end(), {a, b});
  p73.insert(p73.end(), 3, b);
  const double h10 = SemanticEntropy(cluster(p10));
  const double h55 = SemanticEntropy(cluster(p55));
  const double h73 = SemanticEntropy(cluster(p73));
  bool pass = std::fabs(h10 - 0.0) <= 1e-6 && std::fabs(h55 - std::log(2.0)) <= 1e-6 &&
              std::fabs(h73 - oracle::ProfileEntropy({7, 3})) <= 1e-6 &&
              std::fabs(h73 - 0.6109) <= 5e-5;
  const auto ms = cluster({a, "Revenue at Microsoft rose to $211 billion.",
                           "Microsoft grew its revenue to $211.0B.",
                           "Microsoft's revenue increased to $219B."});
  const bool grouped = ms.clusters.size() == 2 &&
                       ms.clusters[0].members == std::vector<std::size_t>{0, 1, 2} &&
                       ms.clusters[1].members == std::vector<std::size_t>{3};
  pass = pass && grouped;
  return {pass, Fmt("H = %.7f, %.7f, %.7f; Microsoft example %s", h10, h55, h73,
                    grouped ? "3 paraphrases grouped, $219B separate" : "clustered wrongly")};
}

struct EndToEnd {
  DegradationOutputs out;
  double seconds = 0.0;
  std::uint64_t network_requests = 0;
};

EndToEnd RunEndToEnd(const fs::path& dir) {
  RunConfig config;  // synthetic oracle, 200 balanced examples
  config.out_dir = dir.string();
  const auto before = RemoteRequestCount();
  const auto t0 = Clock::now();
  EndToEnd e{DegradationExperiment(config), 0.0, 0};
  e.seconds = Seconds(t0);
  e.network_requests = RemoteRequestCount() - before;
  return e;
}

Outcome Synthetic(const EndToEnd& e) {
  const auto& r = e.out.real.report;
  bool monotone = !r.ablation.empty();
  std::string ladder;
  for (std::size_t i = 0; i < r.ablation.size(); ++i) {
    if (i > 0 && r.ablation[i].auc < r.ablation[i - 1].auc) monotone = false;
    ladder += Fmt(i ? " %.4f" : "%.4f", r.ablation[i].auc);
  }
  const bool pass = r.cv.mean_auc >= 0.85 && r.baseline.mean_auc <= 0.60 && monotone &&
                    e.seconds < 120.0 && e.network_requests == 0 && r.n == 200 &&
                    r.prevalence == 0.5;
  return {pass, Fmt("full AUC %.4f (>= 0.85), entropy-only %.4f (<= 0.60), ladder [%s] %s, "
                    "%zu examples, %llu network requests, %.2fs for both runs",
                    r.cv.mean_auc, r.baseline.mean_auc, ladder.c_str(),
                    monotone ? "monotone" : "NOT monotone", r.n,
                    static_cast<unsigned long long>(e.network_requests), e.seconds)};
}

Outcome Degradation(const EndToEnd& e) {
  const double real = e.out.real.report.cv.mean_auc;
  const double degraded = e.out.degraded.report.cv.mean_auc;
  const double retained = e.out.mean_retained_logprob;
  const bool pass = real - degraded >= 0.20 && retained <= 0.50;
  return {pass, Fmt("AUC %.4f -> %.4f (drop %.4f, need >= 0.20), retained logprob "
                    "coefficient magnitude %.1f%% (need <= 50%%; per-feature mean %.1f%%)",
                    real, degraded, real - degraded, 100.0 * retained,
                    100.0 * e.out.mean_feature_retained_logprob)};
}

Outcome Coverage(const EndToEnd& e) {
  const auto& r = e.out.real.report;
  const auto at = [](const std::vector<CoveragePoint>& c, double cov) {
    for (const auto& p : c) {
      if (std::fabs(p.coverage - cov) < 1e-12) return p;
    }
    return CoveragePoint{};
  };
  const auto full = at(r.coverage, 1.0);
  const auto full30 = at(r.coverage, 0.3);
  const auto base30 = at(r.baseline_coverage, 0.3);
  const bool pass = full.accepted == r.n && full.rate == r.prevalence &&
                    full30.accepted > 0 && full30.rate <= 0.5 * base30.rate;
  return {pass, Fmt("rate at 100%% %.4f vs prevalence %.4f; at 30%% full %.4f vs entropy-only "
                    "%.4f (need <= half)",
                    full.rate, r.prevalence, full30.rate, base30.rate)};
}

Outcome CallAccounting() {
  RunConfig config;
  const Lexicon lexicon = LoadLexicon(config);
  const auto examples = LoadOrBuildDataset(config, lexicon);
  auto backend = MakeBackend(config, examples);
  CountingBackend counter(*backend);
  ExtractionOptions options = ExtractionOptionsFor(config);
  options.k = 10;
  ExtractExampleFeatures(examples.front(), counter, lexicon, options);
  return {counter.calls() == 12,
          Fmt("K = 10: %llu calls (%llu sampling, %llu scoring)",
              static_cast<unsigned long long>(counter.calls()),
              static_cast<unsigned long long>(counter.sample_calls()),
              static_cast<unsigned long long>(counter.score_calls()))};
}

Outcome Determinism(const fs::path& first) {
  const fs::path second = first.parent_path() / "second";
  RunEndToEnd(second);
  std::map<std::string, std::string> a, b;
  for (const auto& [dir, out] : {std::pair{first, &a}, std::pair{second, &b}}) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) {
        (*out)[fs::relative(e.path(), dir).generic_string()] = Sha256File(e.path());
      }
    }
  }
  std::size_t differing = 0;
  for (const auto& [path, hash] : a) differing += !b.count(path) || b.at(path) != hash;
  differing += b.size() > a.size() ? b.size() - a.size() : 0;
  const bool reports = a.count("real/report.json") && a.count("degraded/report.json") &&
                       a.count("degradation.json");
  return {differing == 0 && reports && !a.empty(),
          Fmt("%zu files compared by SHA-256, %zu differ", a.size(), differing)};
}

int Main() {
  const fs::path root = fs::temp_directory_path() /
                        ("eclipse-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d %s %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "theory certification", Theory);
  report(2, "metric oracles", MetricOracles);
  report(3, "detector grid oracle", DetectorOracle);
  report(4, "entropy and clustering", Entropy);
  std::optional<EndToEnd> e2e;
  std::string e2e_error;
  try {
    e2e = RunEndToEnd(root / "first");
  } catch (const std::exception& e) {
    e2e_error = e.what();
  }
  auto with_run = [&](Outcome (*check)(const EndToEnd&)) {
    return [&, check]() -> Outcome {
      if (!e2e) return {false, "end-to-end run failed: " + e2e_error};
      return check(*e2e);
    };
  };
  report(5, "synthetic end-to-end", with_run(Synthetic));
  report(6, "logprob degradation", with_run(Degradation));
  report(7, "coverage", with_run(Coverage));
  report(8, "call accounting", CallAccounting);
  report(9, "determinism", [&] { return Determinism(root / "first"); });
  std::error_code ec;
  fs::remove_all(root, ec);
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace eclipse

int main() { return eclipse::Main(); }
