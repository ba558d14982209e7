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

#include "eclipse/pipeline.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "eclipse/hashing.hpp"
#include "eclipse/remote_backend.hpp"
#include "eclipse/text.hpp"

namespace eclipse {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::uint64_t ParseU64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(Errc::kInvalidArgument, std::string(key) + ": expected a nonnegative integer");
  }
  return out;
}

int ParseInt(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(Errc::kInvalidArgument, std::string(key) + ": expected an integer");
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    throw Error(Errc::kInvalidArgument, std::string(key) + ": expected a number");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view v) {
  const std::string s = text::ToLower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(Errc::kInvalidArgument, std::string(key) + ": expected a boolean");
}

std::vector<std::string> ReadTemplates(const fs::path& path) {
  std::vector<std::string> out;
  for (const auto& line : LoadLines(ReadFile(path))) {
    const std::string t = text::Trim(line);
    if (!t.empty() && t[0] != '#') out.push_back(t);
  }
  return out;
}

std::string WithNewline(std::string s) {
  s += '\n';
  return s;
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct SyntheticKnob {
  const char* key;
  double SyntheticParams::*field;
};

constexpr SyntheticKnob kSyntheticKnobs[] = {
    {"synthetic.noise_scale", &SyntheticParams::noise_scale},
    {"synthetic.quality_clean_lo", &SyntheticParams::quality_clean_lo},
    {"synthetic.quality_clean_hi", &SyntheticParams::quality_clean_hi},
    {"synthetic.quality_confident_lo", &SyntheticParams::quality_confident_lo},
    {"synthetic.quality_confident_hi", &SyntheticParams::quality_confident_hi},
    {"synthetic.quality_unsure_lo", &SyntheticParams::quality_unsure_lo},
    {"synthetic.quality_unsure_hi", &SyntheticParams::quality_unsure_hi},
    {"synthetic.p_uses_clean", &SyntheticParams::p_uses_clean},
    {"synthetic.p_uses_hallucinated", &SyntheticParams::p_uses_hallucinated},
    {"synthetic.lift_lo", &SyntheticParams::lift_lo},
    {"synthetic.lift_hi", &SyntheticParams::lift_hi},
    {"synthetic.prior_clean_lo", &SyntheticParams::prior_clean_lo},
    {"synthetic.prior_clean_hi", &SyntheticParams::prior_clean_hi},
    {"synthetic.prior_hallucinated_lo", &SyntheticParams::prior_hallucinated_lo},
    {"synthetic.prior_hallucinated_hi", &SyntheticParams::prior_hallucinated_hi},
    {"synthetic.p_overconfident_clean", &SyntheticParams::p_overconfident_clean},
    {"synthetic.p_overconfident_hallucinated", &SyntheticParams::p_overconfident_hallucinated},
    {"synthetic.reference_temperature", &SyntheticParams::reference_temperature},
};

bool ApplySyntheticKnob(SyntheticParams& p, std::string_view key, std::string_view v) {
  for (const auto& knob : kSyntheticKnobs) {
    if (key == knob.key) {
      p.*knob.field = ParseDouble(key, v);
      return true;
    }
  }
  if (key == "synthetic.alternatives") {
    p.alternatives = ParseInt(key, v);
    return true;
  }
  return false;
}

}  // namespace

std::string_view ScoreTargetName(ScoreTarget t) {
  return t == ScoreTarget::kTopAnswer ? "top_answer" : "dataset_answer";
}

ScoreTarget ParseScoreTarget(std::string_view s) {
  if (s == "top_answer") return ScoreTarget::kTopAnswer;
  if (s == "dataset_answer") return ScoreTarget::kDatasetAnswer;
  throw Error(Errc::kInvalidArgument, "score_target must be top_answer or dataset_answer");
}

void RunConfig::Validate() const {
  backend.Validate();
  if (dataset_path.empty() && (dataset_size < 2 || dataset_size % 2 != 0)) {
    throw Error(Errc::kInvalidArgument, "dataset_size must be even and at least 2");
  }
  mix.Validate();
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (!(temperature >= 0.0)) throw Error(Errc::kInvalidArgument, "temperature must be >= 0");
  if (folds < 2) throw Error(Errc::kInvalidArgument, "folds must be >= 2");
  if (bootstrap < 100) throw Error(Errc::kInvalidArgument, "bootstrap must be >= 100");
  if (!(reg_strength > 0.0)) throw Error(Errc::kInvalidArgument, "C must be positive");
  if (out_dir.empty()) throw Error(Errc::kInvalidArgument, "out_dir must be set");
}

void ApplyConfigValue(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string v(value);
  if (key == "dataset") c.dataset_path = v;
  else if (key == "dataset_size") c.dataset_size = ParseU64(key, v);
  else if (key == "dataset_seed") c.dataset_seed = ParseU64(key, v);
  else if (key == "mix") c.mix = TaxonomyMix::Parse(v);
  else if (key == "lexicon") c.lexicon_path = v;
  else if (key == "templates") c.templates_path = v;
  else if (key == "backend") c.backend.kind = ParseBackendKind(v);
  else if (key == "endpoint_url") c.backend.endpoint_url = v;
  else if (key == "model") c.backend.model_name = v;
  else if (key == "scoring_model") c.backend.scoring_model_name = v;
  else if (key == "max_in_flight") c.backend.max_in_flight = ParseInt(key, v);
  else if (key == "timeout_ms") c.backend.timeout_ms = ParseInt(key, v);
  else if (key == "credential_env") c.backend.credential_env_var = v;
  else if (key == "top_logprobs") c.backend.top_logprobs = ParseInt(key, v);
  else if (key == "max_tokens") c.backend.max_tokens = ParseInt(key, v);
  else if (key == "raw_response_dir") c.backend.raw_response_dir = v;
  else if (key == "backend_seed") c.synthetic.seed = ParseU64(key, v);
  else if (key == "k") c.k = ParseInt(key, v);
  else if (key == "temperature") c.temperature = ParseDouble(key, v);
  else if (key == "score_target") c.score_target = ParseScoreTarget(v);
  else if (key == "budget") c.budget = ParseU64(key, v);
  else if (key == "cache_dir") c.cache_dir = v;
  else if (key == "folds") c.folds = ParseInt(key, v);
  else if (key == "bootstrap") c.bootstrap = ParseInt(key, v);
  else if (key == "C" || key == "reg_strength") c.reg_strength = ParseDouble(key, v);
  else if (key == "class_balanced") c.class_balanced = ParseBool(key, v);
  else if (key == "ablation") c.ablation = ParseBool(key, v);
  else if (key == "seed") c.seed = ParseU64(key, v);
  else if (key == "degrade_seed") c.degrade_seed = ParseU64(key, v);
  else if (key == "parallel") c.parallel = ParseBool(key, v);
  else if (key == "out_dir") c.out_dir = v;
  else if (ApplySyntheticKnob(c.synthetic, key, v)) {}
  else throw Error(Errc::kInvalidArgument, "unknown config key: " + std::string(key));
}

void ApplyConfigText(RunConfig& config, std::string_view contents) {
  int line_no = 0;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = text::Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kParse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = text::Trim(t.substr(0, eq));
    std::string value = text::Trim(t.substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      const auto close = value.find('"', 1);
      if (close == std::string::npos) {
        throw Error(Errc::kParse, "config line " + std::to_string(line_no) + ": unterminated string");
      }
      value = value.substr(1, close - 1);
    } else if (const auto hash = value.find('#'); hash != std::string::npos) {
      value = text::Trim(value.substr(0, hash));
    }
    ApplyConfigValue(config, key, value);
  }
}

RunConfig LoadRunConfig(const fs::path& path) {
  RunConfig config;
  ApplyConfigText(config, ReadFile(path));
  return config;
}

ojson RunConfigToJson(const RunConfig& c) {
  ojson mix;
  for (auto p : kPerturbationTypes) mix[std::string(PerturbationName(p))] = c.mix.Get(p);
  ojson j;
  j["dataset"] = c.dataset_path;
  j["dataset_size"] = c.dataset_size;
  j["dataset_seed"] = c.dataset_seed;
  j["mix"] = mix;
  j["lexicon"] = c.lexicon_path;
  j["templates"] = c.templates_path;
  j["backend"] = BackendKindName(c.backend.kind);
  j["endpoint_url"] = c.backend.endpoint_url;
  j["model"] = c.backend.model_name;
  j["scoring_model"] = c.backend.scoring_model_name;
  j["max_in_flight"] = c.backend.max_in_flight;
  j["timeout_ms"] = c.backend.timeout_ms;
  j["credential_env"] = c.backend.credential_env_var;
  j["backend_seed"] = c.synthetic.seed;
  for (const auto& knob : kSyntheticKnobs) j[knob.key] = c.synthetic.*knob.field;
  j["synthetic.alternatives"] = c.synthetic.alternatives;
  j["k"] = c.k;
  j["temperature"] = c.temperature;
  j["score_target"] = ScoreTargetName(c.score_target);
  j["budget"] = c.budget ? ojson(*c.budget) : ojson(nullptr);
  j["folds"] = c.folds;
  j["bootstrap"] = c.bootstrap;
  j["C"] = c.reg_strength;
  j["class_balanced"] = c.class_balanced;
  j["ablation"] = c.ablation;
  j["seed"] = c.seed;
  j["degrade_seed"] = c.degrade_seed;
  return j;
}

FitOptions FitOptionsFor(const RunConfig& c) {
  FitOptions f;
  f.reg_strength = c.reg_strength;
  f.class_balanced = c.class_balanced;
  return f;
}

EvalOptions EvalOptionsFor(const RunConfig& c) {
  EvalOptions o;
  o.folds = c.folds;
  o.seed = c.seed;
  o.bootstrap = c.bootstrap;
  o.fit = FitOptionsFor(c);
  o.ablation = c.ablation;
  o.exec = c.parallel ? Exec::kParallel : Exec::kSerial;
  return o;
}

ExtractionOptions ExtractionOptionsFor(const RunConfig& c) {
  ExtractionOptions o;
  o.k = c.k;
  o.temperature = c.temperature;
  o.score_target = c.score_target;
  o.max_in_flight = c.backend.max_in_flight;
  o.exec = c.parallel ? Exec::kParallel : Exec::kSerial;
  o.cache_dir = c.cache_dir;
  o.budget = c.budget;
  return o;
}

Lexicon LoadLexicon(const RunConfig& c) {
  return c.lexicon_path.empty() ? DefaultLexicon() : Lexicon::Load(c.lexicon_path);
}

std::vector<QAExample> LoadOrBuildDataset(const RunConfig& c, const Lexicon& lexicon) {
  if (!c.dataset_path.empty()) {
    auto parsed = ParseDatasetJsonl(ReadFile(c.dataset_path));
    if (parsed.examples.empty()) throw Error(Errc::kParse, "dataset has no examples");
    return std::move(parsed.examples);
  }
  PerturbationResources resources;
  resources.lexicon = &lexicon;
  resources.fact_templates = c.templates_path.empty() ? DefaultFabricationTemplates()
                                                      : ReadTemplates(c.templates_path);
  const auto clean = GenerateCleanCorpus(c.dataset_size / 2, c.dataset_seed);
  auto manifest = BuildDataset(clean, c.mix, c.dataset_seed, resources);
  ValidateManifest(manifest);
  return std::move(manifest.examples);
}

std::unique_ptr<Backend> MakeBackend(const RunConfig& c, std::span<const QAExample> examples) {
  if (c.backend.kind == BackendKind::kSynthetic) {
    return std::make_unique<SyntheticBackend>(SyntheticWorld::FromExamples(examples, c.synthetic));
  }
  return std::make_unique<RemoteBackend>(c.backend);
}

ExampleFeatures ExtractExampleFeatures(const QAExample& ex, Backend& backend,
                                       const Lexicon& lexicon, const ExtractionOptions& o) {
  const FactSet evidence_facts = ExtractFacts(ex.evidence, lexicon);
  const auto samples = backend.SampleAnswers({ex.id, ex.query, ex.evidence, o.k, o.temperature});
  if (samples.size() != static_cast<std::size_t>(o.k)) {
    throw Error(Errc::kRemoteUnavailable, "backend returned " + std::to_string(samples.size()) +
                                              " samples, expected " + std::to_string(o.k));
  }
  std::vector<FactSet> facts;
  facts.reserve(samples.size());
  for (const auto& s : samples) {
    ValidateScoredAnswer(s);
    facts.push_back(ExtractFacts(s.text, lexicon));
  }
  const ClusterSet clusters = ClusterAnswers(samples, facts);
  const double entropy = SemanticEntropy(clusters);

  ExampleFeatures out;
  out.scored_answer = o.score_target == ScoreTarget::kTopAnswer
                          ? SelectTopAnswer(samples, clusters).text
                          : ex.answer;
  const ScoredAnswer qe = backend.ScoreAnswer({ex.id, ex.query, ex.evidence, out.scored_answer});
  const ScoredAnswer q = backend.ScoreAnswer({ex.id, ex.query, std::nullopt, out.scored_answer});
  const double w_cons =
      ConsistencyWeight(ExtractFacts(out.scored_answer, lexicon), evidence_facts);
  out.row.id = ex.id;
  out.row.label = ex.label;
  out.row.x = ComputeFeatures(qe, q, entropy, w_cons);
  out.clusters = ClusterSetToJson(clusters, samples);
  out.clusters["id"] = ex.id;
  out.clusters["scored_answer"] = out.scored_answer;
  return out;
}

ExtractionResult ExtractAllFeatures(std::span<const QAExample> examples, Backend& backend,
                                    const Lexicon& lexicon, const ExtractionOptions& o) {
  const std::size_t n = examples.size();
  CountingBackend shared(backend, o.budget);
  std::vector<std::optional<ExampleFeatures>> results(n);
  std::vector<std::optional<ExtractionFailure>> failures(n);
  std::vector<std::uint64_t> calls(n, 0), hits(n, 0);
  ParallelFor(
      n, o.exec,
      [&](std::size_t i) {
        CountingBackend local(static_cast<Backend&>(shared));
        std::optional<CachingBackend> cache;
        Backend* b = &local;
        if (!o.cache_dir.empty()) b = &cache.emplace(local, o.cache_dir);
        try {
          results[i] = ExtractExampleFeatures(examples[i], *b, lexicon, o);
        } catch (const Error& e) {
          failures[i] = ExtractionFailure{examples[i].id, e.code(), e.what()};
        }
        calls[i] = local.calls();
        hits[i] = cache ? cache->hits() : 0;
      },
      o.max_in_flight);

  ExtractionResult out;
  out.audit.examples = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i]) out.details.push_back(std::move(*results[i]));
    if (failures[i]) out.failures.push_back(std::move(*failures[i]));
    out.audit.cache_hits += hits[i];
    if (hits[i] == 0) ++out.audit.uncached;
    out.audit.per_example.emplace_back(examples[i].id, calls[i]);
  }
  std::sort(out.details.begin(), out.details.end(),
            [](const auto& a, const auto& b) { return a.row.id < b.row.id; });
  std::sort(out.failures.begin(), out.failures.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(out.audit.per_example.begin(), out.audit.per_example.end());
  for (const auto& d : out.details) out.rows.push_back(d.row);
  out.audit.calls = shared.calls();
  out.audit.sample_calls = shared.sample_calls();
  out.audit.score_calls = shared.score_calls();
  out.audit.expected = static_cast<std::uint64_t>(o.k + 2) * out.audit.uncached;
  return out;
}

ojson AuditToJson(const CallAudit& a) {
  ojson per = ojson::object();
  for (const auto& [id, calls] : a.per_example) per[id] = calls;
  return {{"examples", a.examples},       {"uncached", a.uncached},
          {"calls", a.calls},             {"sample_calls", a.sample_calls},
          {"score_calls", a.score_calls}, {"expected", a.expected},
          {"matches", a.matches()},       {"cache_hits", a.cache_hits},
          {"per_example", per}};
}

std::string FailuresToJsonl(std::span<const ExtractionFailure> failures) {
  std::string out;
  for (const auto& f : failures) {
    out += ojson{{"id", f.id}, {"error", ErrcName(f.code)}, {"message", f.message}}.dump();
    out += '\n';
  }
  return out;
}

std::string ClusterDumpJsonl(std::span<const ExampleFeatures> details) {
  std::string out;
  for (const auto& d : details) {
    out += d.clusters.dump();
    out += '\n';
  }
  return out;
}

void WriteManifest(const fs::path& dir, const ojson& extra) {
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (rel != "manifest.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  ojson list = ojson::array();
  for (const auto& f : files) {
    list.push_back({{"path", f},
                    {"sha256", Sha256File(dir / f)},
                    {"bytes", fs::file_size(dir / f)}});
  }
  ojson j = extra;
  j["files"] = list;
  WriteFile(dir / "manifest.json", WithNewline(j.dump(2)));
}

void WriteEvalArtifacts(const fs::path& dir, const EvalReport& report,
                        const EvalOptions& options) {
  WriteFile(dir / "report.json", WithNewline(ReportToJson(report, options).dump(2)));
  WriteFile(dir / "coverage.csv", CoverageCsv(report));
  if (!report.ablation.empty()) WriteFile(dir / "ablation.csv", AblationCsv(report));
  WriteFile(dir / "roc.csv", RocCsv(report));
  WriteFile(dir / "model.json", WithNewline(ModelToJson(report.full_model).dump(2)));
  for (std::size_t f = 0; f < report.cv.models.size(); ++f) {
    WriteFile(dir / "models" / ("fold_" + std::to_string(f) + ".json"),
              WithNewline(ModelToJson(report.cv.models[f]).dump(2)));
  }
  std::string coef = "feature,coefficient,expected_sign,matches\n";
  for (const auto& e : CoefficientReport(report.full_model)) {
    coef += std::string(FeatureName(e.feature)) + "," + Num(e.coefficient) + "," +
            (e.expected_sign > 0 ? "+" : "-") + "," + (e.matches ? "true" : "false") + "\n";
  }
  WriteFile(dir / "coefficients.csv", coef);
}

namespace {

ExperimentOutputs RunWithBackend(const RunConfig& config, std::span<const QAExample> examples,
                                 Backend& backend, const Lexicon& lexicon, const fs::path& dir) {
  fs::create_directories(dir);
  std::string dataset;
  for (const auto& e : examples) dataset += ExampleToJsonLine(e) + "\n";
  WriteFile(dir / "dataset.jsonl", dataset);

  ExperimentOutputs out;
  out.extraction = ExtractAllFeatures(examples, backend, lexicon, ExtractionOptionsFor(config));
  const auto& ex = out.extraction;
  WriteFile(dir / "features.jsonl", FeaturesToJsonl(ex.rows));
  WriteFile(dir / "clusters.jsonl", ClusterDumpJsonl(ex.details));
  WriteFile(dir / "call_audit.json", WithNewline(AuditToJson(ex.audit).dump(2)));
  ojson extra = {{"config", RunConfigToJson(config)}, {"partial", ex.partial()}};
  if (ex.partial()) {
    WriteFile(dir / "failures.jsonl", FailuresToJsonl(ex.failures));
    WriteManifest(dir, extra);
    const auto& first = ex.failures.front();
    throw Error(first.code, std::to_string(ex.failures.size()) +
                                " examples failed; first " + first.id + ": " + first.message);
  }
  const EvalOptions options = EvalOptionsFor(config);
  out.report = Evaluate(ex.rows, kAllFeatures, options);
  WriteEvalArtifacts(dir, out.report, options);
  WriteManifest(dir, extra);
  return out;
}

}  // namespace

ExperimentOutputs RunExperiment(const RunConfig& config) {
  config.Validate();
  const Lexicon lexicon = LoadLexicon(config);
  const auto examples = LoadOrBuildDataset(config, lexicon);
  auto backend = MakeBackend(config, examples);
  return RunWithBackend(config, examples, *backend, lexicon, config.out_dir);
}

std::vector<RetainedRow> RetainedTable(const DetectorModel& real, const DetectorModel& degraded) {
  std::vector<RetainedRow> out;
  for (std::size_t j = 0; j < real.features.size(); ++j) {
    const auto it = std::find(degraded.features.begin(), degraded.features.end(), real.features[j]);
    if (it == degraded.features.end()) continue;
    RetainedRow r;
    r.feature = real.features[j];
    r.real = real.w(static_cast<Eigen::Index>(j));
    r.degraded = degraded.w(it - degraded.features.begin());
    r.retained = std::fabs(r.real) > 0.0 ? std::fabs(r.degraded) / std::fabs(r.real)
                                         : std::numeric_limits<double>::infinity();
    out.push_back(r);
  }
  return out;
}

namespace {

constexpr std::array kLogprobFeatures = {Feature::kLQ, Feature::kLQE, Feature::kDeltaL,
                                         Feature::kRatio, Feature::kPMax};

bool IsLogprobFeature(Feature f) {
  return std::find(kLogprobFeatures.begin(), kLogprobFeatures.end(), f) !=
         kLogprobFeatures.end();
}

}  // namespace

double MeanRetainedLogprob(const std::vector<RetainedRow>& table) {
  double real = 0.0;
  double degraded = 0.0;
  for (const auto& r : table) {
    if (!IsLogprobFeature(r.feature)) continue;
    real += std::fabs(r.real);
    degraded += std::fabs(r.degraded);
  }
  if (real == 0.0) return degraded == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return degraded / real;
}

double MeanFeatureRetainedLogprob(const std::vector<RetainedRow>& table) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : table) {
    if (!IsLogprobFeature(r.feature)) continue;
    sum += r.retained;
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

DegradationOutputs DegradationExperiment(const RunConfig& config) {
  config.Validate();
  const Lexicon lexicon = LoadLexicon(config);
  const auto examples = LoadOrBuildDataset(config, lexicon);
  auto backend = MakeBackend(config, examples);
  const fs::path dir = config.out_dir;

  DegradationOutputs out;
  out.real = RunWithBackend(config, examples, *backend, lexicon, dir / "real");
  DegradingBackend heuristic(*backend, config.degrade_seed);
  out.degraded = RunWithBackend(config, examples, heuristic, lexicon, dir / "degraded");
  out.table = RetainedTable(out.real.report.full_model, out.degraded.report.full_model);

  out.mean_retained_logprob = MeanRetainedLogprob(out.table);
  out.mean_feature_retained_logprob = MeanFeatureRetainedLogprob(out.table);

  ojson table = ojson::array();
  std::string csv = "feature,real,degraded,retained_percent\n";
  for (const auto& r : out.table) {
    const bool finite = std::isfinite(r.retained);
    table.push_back({{"feature", FeatureName(r.feature)},
                     {"real", r.real},
                     {"degraded", r.degraded},
                     {"retained_percent", finite ? ojson(100.0 * r.retained) : ojson(nullptr)}});
    csv += std::string(FeatureName(r.feature)) + "," + Num(r.real) + "," + Num(r.degraded) + "," +
           (finite ? Num(100.0 * r.retained) : std::string()) + "\n";
  }
  const double real_auc = out.real.report.cv.mean_auc;
  const double degraded_auc = out.degraded.report.cv.mean_auc;
  ojson j = {{"real_auc", real_auc},
             {"degraded_auc", degraded_auc},
             {"auc_drop", real_auc - degraded_auc},
             {"mean_retained_logprob_percent", 100.0 * out.mean_retained_logprob},
             {"mean_per_feature_retained_percent",
              std::isfinite(out.mean_feature_retained_logprob)
                  ? ojson(100.0 * out.mean_feature_retained_logprob)
                  : ojson(nullptr)},
             {"coefficients", table}};
  WriteFile(dir / "degradation.json", WithNewline(j.dump(2)));
  WriteFile(dir / "degradation.csv", csv);
  WriteManifest(dir, {{"config", RunConfigToJson(config)}});
  return out;
}

}  // namespace eclipse
