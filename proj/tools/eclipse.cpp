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

// eclipse: command-line driver for dataset construction, feature extraction,
// detector training, evaluation and the convexity certifier.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eclipse/dataset.hpp"
#include "eclipse/detector.hpp"
#include "eclipse/error.hpp"
#include "eclipse/eval.hpp"
#include "eclipse/hashing.hpp"
#include "eclipse/pipeline.hpp"
#include "eclipse/text.hpp"
#include "eclipse/theory.hpp"

namespace fs = std::filesystem;
using namespace eclipse;

namespace {

// Options shared by every subcommand that builds a RunConfig. Explicit
// flags override the config file, which overrides the defaults; --set is
// applied last.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  void Attach(CLI::App* app, const std::vector<std::pair<std::string, std::string>>& keys) {
    app->add_option("--config", config_path, "Flat key = value config file");
    app->add_option("--set", sets, "Override any config key: key=value");
    for (const auto& [key, help] : keys) {
      std::string flag = "--" + key;
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      app->add_option_function<std::string>(
          flag, [this, key = key](const std::string& v) { flags[key] = v; }, help);
    }
  }

  RunConfig Build() const {
    RunConfig config;
    if (!config_path.empty()) config = LoadRunConfig(config_path);
    for (const auto& [k, v] : flags) ApplyConfigValue(config, k, v);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw Error(Errc::kInvalidArgument, "--set expects key=value, got " + s);
      }
      ApplyConfigValue(config, text::Trim(s.substr(0, eq)), text::Trim(s.substr(eq + 1)));
    }
    return config;
  }
};

const std::vector<std::pair<std::string, std::string>> kExtractKeys = {
    {"dataset", "Dataset JSONL (default: built-in corpus)"},
    {"dataset_size", "Examples in the built-in dataset"},
    {"dataset_seed", "Seed for the built-in dataset"},
    {"lexicon", "Entity lexicon TSV"},
    {"templates", "Fabrication templates, one per line"},
    {"backend", "synthetic or remote"},
    {"endpoint_url", "OpenAI-compatible base URL"},
    {"model", "Model name"},
    {"max_in_flight", "Concurrent examples / requests"},
    {"backend_seed", "Synthetic oracle seed"},
    {"k", "Samples per example"},
    {"temperature", "Sampling temperature"},
    {"score_target", "top_answer or dataset_answer"},
    {"budget", "Maximum backend calls"},
    {"cache_dir", "Response cache directory"},
};

const std::vector<std::pair<std::string, std::string>> kEvalKeys = {
    {"folds", "Cross-validation folds"},
    {"seed", "Evaluation seed"},
    {"bootstrap", "Bootstrap resamples"},
    {"C", "Inverse L2 regularization strength"},
    {"class_balanced", "Balanced class weights"},
    {"ablation", "Include the ablation ladder"},
    {"parallel", "Use the OpenMP kernels"},
};

std::vector<std::pair<std::string, std::string>> Concat(
    std::vector<std::pair<std::string, std::string>> a,
    const std::vector<std::pair<std::string, std::string>>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<Feature> ParseFeatureList(const std::string& csv) {
  if (csv.empty()) return {kAllFeatures.begin(), kAllFeatures.end()};
  std::vector<Feature> out;
  std::string item;
  for (char ch : csv + ",") {
    if (ch == ',') {
      if (!text::Trim(item).empty()) out.push_back(ParseFeature(text::Trim(item)));
      item.clear();
    } else {
      item += ch;
    }
  }
  return out;
}

std::vector<FeatureRow> LoadFeatures(const std::string& path) {
  auto rows = ParseFeaturesJsonl(ReadFile(path));
  if (rows.empty()) throw Error(Errc::kParse, "no feature rows in " + path);
  return rows;
}

void Print(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int Run(int argc, char** argv) {
  CLI::App app{"Hallucination detection from semantic entropy and evidence capacity"};
  app.require_subcommand(1);

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Build or synthesize QA datasets");
  dataset->require_subcommand(1);
  auto* build = dataset->add_subcommand("build", "Pair clean examples with hallucinated twins");
  std::string clean_path, out_path, lexicon_path, templates_path;
  std::string mix_spec = "wrong_number=0.35,entity_swap=0.25,contradiction=0.25,fabrication=0.15";
  std::uint64_t seed = 1234;
  std::size_t n = 100;
  build->add_option("--in,--clean", clean_path, "Clean examples JSONL")->required();
  build->add_option("--out", out_path, "Output dataset JSONL")->required();
  build->add_option("--mix", mix_spec, "Perturbation mix");
  build->add_option("--seed", seed, "Seed");
  build->add_option("--lexicon", lexicon_path, "Entity lexicon TSV");
  build->add_option("--templates", templates_path, "Fabrication templates");
  auto* synth = dataset->add_subcommand("synth", "Write the built-in clean corpus");
  synth->add_option("--n", n, "Number of clean examples");
  synth->add_option("--seed", seed, "Seed");
  synth->add_option("--out", out_path, "Output JSONL")->required();

  // features extract
  auto* features = app.add_subcommand("features", "Feature extraction");
  features->require_subcommand(1);
  auto* extract = features->add_subcommand("extract", "Sample, cluster and score every example");
  ConfigFlags extract_flags;
  extract_flags.Attach(extract, kExtractKeys);
  bool degrade = false;
  std::string features_out;
  extract->add_option("--out", features_out, "Output feature JSONL")->required();
  extract->add_flag("--degrade", degrade, "Replace logprobs with surface heuristics");

  // train
  auto* train = app.add_subcommand("train", "Fit the detector on a feature file");
  std::string features_path, feature_list, model_out;
  double reg_strength = 1.0;
  train->add_option("--features", features_path, "Feature JSONL")->required();
  train->add_option("--use", feature_list, "Comma-separated feature subset");
  train->add_option("--C", reg_strength, "Inverse L2 regularization strength");
  train->add_option("--out", model_out, "Model JSON")->required();

  // eval / ablate / coverage
  auto* eval = app.add_subcommand("eval", "Cross-validated evaluation report");
  ConfigFlags eval_flags;
  eval_flags.Attach(eval, kEvalKeys);
  std::string eval_out;
  eval->add_option("--features", features_path, "Feature JSONL")->required();
  eval->add_option("--use", feature_list, "Comma-separated feature subset");
  eval->add_option("--out", eval_out, "Output directory")->required();

  auto* ablate = app.add_subcommand("ablate", "Ablation ladder only");
  ConfigFlags ablate_flags;
  ablate_flags.Attach(ablate, kEvalKeys);
  ablate->add_option("--features", features_path, "Feature JSONL")->required();

  auto* coverage = app.add_subcommand("coverage", "Coverage versus hallucination rate");
  ConfigFlags coverage_flags;
  coverage_flags.Attach(coverage, kEvalKeys);
  coverage->add_option("--features", features_path, "Feature JSONL")->required();
  coverage->add_option("--use", feature_list, "Comma-separated feature subset");

  // degrade / run
  auto* degrade_cmd = app.add_subcommand("degrade", "Real versus heuristic logprob experiment");
  ConfigFlags degrade_flags;
  degrade_flags.Attach(degrade_cmd, Concat(Concat(kExtractKeys, kEvalKeys),
                                           {{"out_dir", "Output directory"},
                                            {"degrade_seed", "Heuristic noise seed"}}));
  auto* run = app.add_subcommand("run", "Dataset, extraction, evaluation and artifacts");
  ConfigFlags run_flags;
  run_flags.Attach(run, Concat(Concat(kExtractKeys, kEvalKeys), {{"out_dir", "Output directory"}}));

  // theory certify
  auto* theory = app.add_subcommand("theory", "Entropy-capacity objective");
  theory->require_subcommand(1);
  auto* certify = theory->add_subcommand("certify", "Numerically certify strict convexity");
  ObjectiveParams params;
  double h_lo = 0.0, h_hi = 0.0;
  std::size_t grid = 100000;
  std::string cert_out;
  certify->add_option("--alpha", params.alpha, "Quadratic weight");
  certify->add_option("--lambda", params.lambda, "Hallucination penalty weight");
  certify->add_option("--a", params.a, "Entropy slope of the logit");
  certify->add_option("--b", params.b, "Capacity slope of the logit");
  certify->add_option("--c", params.c, "Logit offset");
  certify->add_option("--hpref", params.H_pref, "Preferred entropy");
  certify->add_option("--cap", params.C, "Capacity");
  certify->add_option("--h-lo", h_lo, "Grid start (default H_pref - 10/a - 1)");
  certify->add_option("--h-hi", h_hi, "Grid end (default H_pref + 10/a + 1)");
  certify->add_option("--grid", grid, "Grid points");
  certify->add_option("--out", cert_out, "Write the certificate JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error exits 2.
    return app.exit(e) == 0 ? 0 : ExitCodeFor(Errc::kInvalidArgument);
  }

  try {
    if (build->parsed()) {
      const Lexicon lexicon = lexicon_path.empty() ? DefaultLexicon() : Lexicon::Load(lexicon_path);
      PerturbationResources resources;
      resources.lexicon = &lexicon;
      if (templates_path.empty()) {
        resources.fact_templates = DefaultFabricationTemplates();
      } else {
        for (const auto& line : LoadLines(ReadFile(templates_path))) {
          if (text::Trim(line)[0] != '#') resources.fact_templates.push_back(text::Trim(line));
        }
      }
      const auto clean = ParseDatasetJsonl(ReadFile(clean_path)).examples;
      const auto manifest = BuildDataset(clean, TaxonomyMix::Parse(mix_spec), seed, resources);
      ValidateManifest(manifest);
      WriteFile(out_path, DatasetToJsonl(manifest));
      std::cerr << "wrote " << manifest.examples.size() << " examples to " << out_path << "\n";
    } else if (synth->parsed()) {
      std::string out;
      for (const auto& e : GenerateCleanCorpus(n, seed)) out += ExampleToJsonLine(e) + "\n";
      WriteFile(out_path, out);
    } else if (extract->parsed()) {
      const RunConfig config = extract_flags.Build();
      config.Validate();
      const Lexicon lexicon = LoadLexicon(config);
      const auto examples = LoadOrBuildDataset(config, lexicon);
      auto backend = MakeBackend(config, examples);
      std::unique_ptr<Backend> heuristic;
      Backend* active = backend.get();
      if (degrade) {
        heuristic = std::make_unique<DegradingBackend>(*backend, config.degrade_seed);
        active = heuristic.get();
      }
      const auto result =
          ExtractAllFeatures(examples, *active, lexicon, ExtractionOptionsFor(config));
      WriteFile(features_out, FeaturesToJsonl(result.rows));
      auto audit = AuditToJson(result.audit);
      WriteFile(fs::path(features_out).string() + ".audit.json", audit.dump(2) + "\n");
      audit.erase("per_example");
      Print(audit);
      if (result.partial()) {
        const fs::path failures = fs::path(features_out).string() + ".failures.jsonl";
        WriteFile(failures, FailuresToJsonl(result.failures));
        const auto& first = result.failures.front();
        throw Error(first.code, "partial output; failures in " + failures.string());
      }
    } else if (train->parsed()) {
      const auto rows = LoadFeatures(features_path);
      FitOptions fit;
      fit.reg_strength = reg_strength;
      const auto model = TrainDetector(rows, ParseFeatureList(feature_list), fit);
      WriteFile(model_out, ModelToJson(model).dump(2) + "\n");
      nlohmann::ordered_json report = nlohmann::ordered_json::array();
      for (const auto& e : CoefficientReport(model)) {
        report.push_back({{"feature", FeatureName(e.feature)},
                          {"coefficient", e.coefficient},
                          {"expected_sign", e.expected_sign > 0 ? "+" : "-"},
                          {"matches", e.matches}});
      }
      Print(report);
    } else if (eval->parsed()) {
      const EvalOptions options = EvalOptionsFor(eval_flags.Build());
      const auto rows = LoadFeatures(features_path);
      const auto report = Evaluate(rows, ParseFeatureList(feature_list), options);
      WriteEvalArtifacts(eval_out, report, options);
      WriteManifest(eval_out, {{"features", features_path}});
      std::cout << "cross-validated AUC " << report.cv.mean_auc << " (fold std "
                << report.auc.std << "), bootstrap 95% CI [" << report.ci.lo << ", "
                << report.ci.hi << "]\n";
    } else if (ablate->parsed()) {
      const EvalOptions options = EvalOptionsFor(ablate_flags.Build());
      const auto rows = LoadFeatures(features_path);
      EvalReport report;
      report.ablation = AblationLadder(rows, options.ladder, options.folds, options.seed, options.fit);
      std::cout << AblationCsv(report);
    } else if (coverage->parsed()) {
      const EvalOptions options = EvalOptionsFor(coverage_flags.Build());
      const auto rows = LoadFeatures(features_path);
      const auto feats = ParseFeatureList(feature_list);
      EvalReport report;
      const auto y = LabelVector(rows);
      std::vector<std::string> ids;
      for (const auto& r : rows) ids.push_back(r.id);
      const std::vector<Feature> entropy_only = {Feature::kH};
      const auto cv = CrossValidate(rows, feats, options.folds, options.seed, options.fit);
      const auto base = CrossValidate(rows, entropy_only, options.folds, options.seed, options.fit);
      report.coverage = CoverageCurve(cv.oof, y, ids, options.coverage_grid);
      report.baseline_coverage = CoverageCurve(base.oof, y, ids, options.coverage_grid);
      std::cout << CoverageCsv(report);
    } else if (degrade_cmd->parsed()) {
      const auto out = DegradationExperiment(degrade_flags.Build());
      std::cout << ReadFile(fs::path(degrade_flags.Build().out_dir) / "degradation.csv");
      std::cout << "AUC real " << out.real.report.cv.mean_auc << ", degraded "
                << out.degraded.report.cv.mean_auc << "; mean retained logprob magnitude "
                << 100.0 * out.mean_retained_logprob << "%\n";
    } else if (run->parsed()) {
      const RunConfig config = run_flags.Build();
      const auto out = RunExperiment(config);
      std::cout << "cross-validated AUC " << out.report.cv.mean_auc << ", entropy-only "
                << out.report.baseline.mean_auc << "; artifacts in " << config.out_dir << "\n";
    } else if (certify->parsed()) {
      if (certify->count("--h-lo") == 0) h_lo = params.H_pref - 10.0 / params.a - 1.0;
      if (certify->count("--h-hi") == 0) h_hi = params.H_pref + 10.0 / params.a + 1.0;
      const auto cert = CertifyConvexity(params, h_lo, h_hi, grid);
      const auto j = CertificateToJson(cert);
      if (!cert_out.empty()) WriteFile(cert_out, j.dump(2) + "\n");
      Print(j);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return Run(argc, argv); }
