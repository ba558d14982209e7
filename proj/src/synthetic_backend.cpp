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

#include "eclipse/synthetic_backend.hpp"

#include <algorithm>
#include <cmath>

#include "eclipse/error.hpp"
#include "eclipse/rng.hpp"
#include "eclipse/text.hpp"

namespace eclipse {

SyntheticWorld SyntheticWorld::FromExamples(std::span<const QAExample> examples,
                                            const SyntheticParams& p) {
  SyntheticWorld world(p);
  for (const auto& e : examples) {
    Rng rng(SeedMixer(p.seed).Add("latent").Add(e.id).value());
    const bool clean = e.label == Label::kClean;
    SyntheticLatent l;
    l.base_answer = e.answer;
    l.overconfident = rng.Bernoulli(clean ? p.p_overconfident_clean
                                          : p.p_overconfident_hallucinated);
    if (clean) {
      l.grounded_quality = rng.Uniform(p.quality_clean_lo, p.quality_clean_hi);
    } else if (l.overconfident) {
      l.grounded_quality = rng.Uniform(p.quality_confident_lo, p.quality_confident_hi);
    } else {
      l.grounded_quality = rng.Uniform(p.quality_unsure_lo, p.quality_unsure_hi);
    }
    l.evidence_uses = rng.Bernoulli(clean ? p.p_uses_clean : p.p_uses_hallucinated);
    l.lift = rng.Uniform(p.lift_lo, p.lift_hi);
    l.prior_scale = clean ? rng.Uniform(p.prior_clean_lo, p.prior_clean_hi)
                          : rng.Uniform(p.prior_hallucinated_lo, p.prior_hallucinated_hi);
    world.Set(e.id, std::move(l));
  }
  return world;
}

void SyntheticWorld::Set(const std::string& example_id, SyntheticLatent latent) {
  latents_[example_id] = std::move(latent);
}

SyntheticLatent SyntheticWorld::Get(const std::string& example_id) const {
  if (auto it = latents_.find(example_id); it != latents_.end()) return it->second;
  Rng rng(SeedMixer(params_.seed).Add("latent-unknown").Add(example_id).value());
  SyntheticLatent l;
  l.base_answer = "No answer is available.";
  l.grounded_quality = rng.Uniform(params_.quality_clean_lo, params_.quality_clean_hi);
  l.evidence_uses = rng.Bernoulli(0.5);
  l.lift = rng.Uniform(params_.lift_lo, params_.lift_hi);
  return l;
}

std::vector<std::string> SyntheticBackend::AnswerFamily(
    const std::string& example_id) const {
  const SyntheticLatent l = world_.Get(example_id);
  std::vector<std::string> family = {l.base_answer};
  const auto numerics = text::FindNumerics(l.base_answer);
  const auto target = std::find_if(numerics.begin(), numerics.end(),
                                   [](const auto& m) { return !m.is_year; });
  for (int j = 1; j <= world_.params().alternatives; ++j) {
    if (target != numerics.end()) {
      // 8% steps keep every alternative outside the 1% clustering tolerance.
      const double scaled = target->magnitude * (1.0 + 0.08 * j);
      family.push_back(text::Splice(l.base_answer, target->begin, target->end,
                                    text::FormatLike(*target, scaled, target->decimals)));
    } else {
      family.push_back(l.base_answer + " (variant " + std::to_string(j) + ")");
    }
  }
  return family;
}

std::vector<ScoredAnswer> SyntheticBackend::SampleAnswers(const SampleRequest& request) {
  if (request.k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (!(request.temperature >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "temperature must be >= 0");
  }
  const SyntheticLatent l = world_.Get(request.example_id);
  const auto family = AnswerFamily(request.example_id);
  const auto& p = world_.params();
  const double spread = std::min(1.0, request.temperature / p.reference_temperature);
  const double p_modal = 1.0 - (1.0 - l.grounded_quality) * spread;
  std::vector<ScoredAnswer> out;
  out.reserve(static_cast<std::size_t>(request.k));
  for (int i = 0; i < request.k; ++i) {
    Rng rng(SeedMixer(p.seed).Add("sample").Add(request.example_id).Add(
                static_cast<std::uint64_t>(i)).value());
    std::size_t variant = 0;
    if (request.temperature > 0.0 && family.size() > 1 && !rng.Bernoulli(p_modal)) {
      variant = 1 + static_cast<std::size_t>(rng.Below(family.size() - 1));
    }
    out.push_back(Score(request.example_id, family[variant], !request.evidence.empty()));
  }
  return out;
}

ScoredAnswer SyntheticBackend::ScoreAnswer(const ScoreRequest& request) {
  if (text::Trim(request.answer).empty()) {
    throw Error(Errc::kInvalidArgument, "answer must be nonempty");
  }
  return Score(request.example_id, request.answer, request.has_evidence());
}

ScoredAnswer SyntheticBackend::Score(const std::string& example_id,
                                     const std::string& answer,
                                     bool with_evidence) const {
  const SyntheticLatent l = world_.Get(example_id);
  const auto& p = world_.params();
  const auto tokens = text::SplitWhitespace(answer);
  const std::size_t n = tokens.size();
  ScoredAnswer out;
  out.text = answer;
  out.finish_reason = FinishReason::kStop;
  out.token_logprobs.resize(n);
  const double per_token_noise = n > 0 ? p.noise_scale / std::sqrt(static_cast<double>(n)) : 0.0;

  std::size_t confident_token = n;
  if (l.overconfident && n > 0) {
    confident_token = static_cast<std::size_t>(
        Rng(SeedMixer(p.seed).Add("confident").Add(example_id).Add(answer).value())
            .Below(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t token_seed =
        SeedMixer(p.seed).Add(example_id).Add(static_cast<std::uint64_t>(i)).Add(tokens[i]).value();
    Rng base_rng(SeedMixer(token_seed).Add("base").value());
    double base = -l.prior_scale * (0.5 + 1.5 * base_rng.Uniform());
    if (i == confident_token) {
      // A memorised token: near-certain with or without evidence.
      base = -Rng(SeedMixer(token_seed).Add("confident-value").value()).Uniform(0.001, 0.02);
    }
    if (!with_evidence) {
      out.token_logprobs[i] = base;
      continue;
    }
    Rng noise_rng(SeedMixer(token_seed).Add("noise").value());
    const double noise = per_token_noise * (2.0 * noise_rng.Uniform() - 1.0);
    double lift = 0.0;
    if (l.evidence_uses) lift = std::max(l.lift * -base, 2.0 * per_token_noise);
    out.token_logprobs[i] = std::min(0.0, base + lift + noise);
  }
  return out;
}

}  // namespace eclipse
