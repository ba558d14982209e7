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

#ifndef ECLIPSE_PIPELINE_HPP_
#define ECLIPSE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/backend.hpp"
#include "eclipse/capacity.hpp"
#include "eclipse/dataset.hpp"
#include "eclipse/entropy.hpp"
#include "eclipse/error.hpp"
#include "eclipse/eval.hpp"
#include "eclipse/synthetic_backend.hpp"
#include "json.hpp"

namespace eclipse {

// Which answer the two scoring passes condition on.
enum class ScoreTarget {
  kTopAnswer,      // representative of the largest sample cluster
  kDatasetAnswer,  // the answer stored in the dataset record
};

std::string_view ScoreTargetName(ScoreTarget t);
ScoreTarget ParseScoreTarget(std::string_view s);

struct RunConfig {
  // Empty: build the built-in corpus of dataset_size examples.
  std::string dataset_path;
  std::size_t dataset_size = 200;
  std::uint64_t dataset_seed = 1234;
  TaxonomyMix mix;
  std::string lexicon_path;
  std::string templates_path;

  BackendConfig backend;
  SyntheticParams synthetic;  // synthetic.seed is the backend seed
  int k = 10;
  double temperature = 0.7;
  ScoreTarget score_target = ScoreTarget::kTopAnswer;
  std::optional<std::uint64_t> budget;
  std::string cache_dir;

  int folds = 5;
  int bootstrap = 1000;
  double reg_strength = 1.0;
  bool class_balanced = true;
  bool ablation = true;
  std::uint64_t seed = 42;  // evaluation seed
  std::uint64_t degrade_seed = 99;
  bool parallel = true;

  std::string out_dir = "eclipse-out";

  void Validate() const;
};

// Sets one key; throws kInvalidArgument on unknown keys or bad values.
void ApplyConfigValue(RunConfig& config, std::string_view key, std::string_view value);

// Flat "key = value" lines; '#' starts a comment; values may be quoted.
void ApplyConfigText(RunConfig& config, std::string_view text);
RunConfig LoadRunConfig(const std::filesystem::path& path);

nlohmann::ordered_json RunConfigToJson(const RunConfig& config);

EvalOptions EvalOptionsFor(const RunConfig& config);
FitOptions FitOptionsFor(const RunConfig& config);

Lexicon LoadLexicon(const RunConfig& config);

// Loads dataset_path, or builds the built-in balanced dataset.
std::vector<QAExample> LoadOrBuildDataset(const RunConfig& config, const Lexicon& lexicon);

std::unique_ptr<Backend> MakeBackend(const RunConfig& config,
                                     std::span<const QAExample> examples);

struct ExtractionOptions {
  int k = 10;
  double temperature = 0.7;
  ScoreTarget score_target = ScoreTarget::kTopAnswer;
  int max_in_flight = 4;
  Exec exec = Exec::kParallel;
  std::filesystem::path cache_dir;  // empty: no cache
  std::optional<std::uint64_t> budget;
};

ExtractionOptions ExtractionOptionsFor(const RunConfig& config);

struct ExampleFeatures {
  FeatureRow row;
  std::string scored_answer;
  nlohmann::ordered_json clusters;
};

// K samples, clustering, then the evidence and query-only scoring passes of
// the selected answer: K + 2 backend calls.
ExampleFeatures ExtractExampleFeatures(const QAExample& example, Backend& backend,
                                       const Lexicon& lexicon, const ExtractionOptions& options);

struct ExtractionFailure {
  std::string id;
  Errc code = Errc::kInvalidArgument;
  std::string message;
};

struct CallAudit {
  std::size_t examples = 0;
  std::size_t uncached = 0;  // examples with no cache hit
  std::uint64_t calls = 0;
  std::uint64_t sample_calls = 0;
  std::uint64_t score_calls = 0;
  std::uint64_t expected = 0;  // (K + 2) * uncached
  std::uint64_t cache_hits = 0;
  std::vector<std::pair<std::string, std::uint64_t>> per_example;
  bool matches() const { return calls == expected; }
};

struct ExtractionResult {
  std::vector<FeatureRow> rows;  // sorted by id
  std::vector<ExampleFeatures> details;
  std::vector<ExtractionFailure> failures;  // sorted by id
  CallAudit audit;
  bool partial() const { return !failures.empty(); }
};

ExtractionResult ExtractAllFeatures(std::span<const QAExample> examples, Backend& backend,
                                    const Lexicon& lexicon, const ExtractionOptions& options);

nlohmann::ordered_json AuditToJson(const CallAudit& audit);
std::string FailuresToJsonl(std::span<const ExtractionFailure> failures);
std::string ClusterDumpJsonl(std::span<const ExampleFeatures> details);

// Writes manifest.json listing every other file under `dir` with its
// SHA-256, plus `extra` fields.
void WriteManifest(const std::filesystem::path& dir, const nlohmann::ordered_json& extra);

// Evaluation artifacts for one feature set under `dir`: report.json and the
// three CSVs, the full and per-fold models, coefficients.csv.
void WriteEvalArtifacts(const std::filesystem::path& dir, const EvalReport& report,
                        const EvalOptions& options);

struct ExperimentOutputs {
  ExtractionResult extraction;
  EvalReport report;
};

// Dataset, extraction, evaluation and artifacts under config.out_dir.
// Throws the first per-example error after writing partial outputs.
ExperimentOutputs RunExperiment(const RunConfig& config);

struct RetainedRow {
  Feature feature;
  double real = 0.0;
  double degraded = 0.0;
  double retained = 0.0;  // |degraded| / |real|
};

struct DegradationOutputs {
  ExperimentOutputs real;
  ExperimentOutputs degraded;
  std::vector<RetainedRow> table;
  double mean_retained_logprob = 0.0;
  double mean_feature_retained_logprob = 0.0;
};

std::vector<RetainedRow> RetainedTable(const DetectorModel& real, const DetectorModel& degraded);

// Mean |degraded| over mean |real| across L_Q, L_QE, delta_L, ratio, p_max.
double MeanRetainedLogprob(const std::vector<RetainedRow>& table);
// Unweighted mean of the per-feature ratios; infinite if a real one is zero.
double MeanFeatureRetainedLogprob(const std::vector<RetainedRow>& table);

// The experiment twice, with real and heuristic logprobs, under
// out_dir/real and out_dir/degraded, plus degradation.json/.csv.
DegradationOutputs DegradationExperiment(const RunConfig& config);

}  // namespace eclipse

#endif  // ECLIPSE_PIPELINE_HPP_
