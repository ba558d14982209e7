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

#ifndef ECLIPSE_SYNTHETIC_BACKEND_HPP_
#define ECLIPSE_SYNTHETIC_BACKEND_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eclipse/backend.hpp"
#include "eclipse/dataset.hpp"

namespace eclipse {

// Hidden per-example state of the simulated model.
struct SyntheticLatent {
  std::string base_answer;        // the model's modal answer
  double grounded_quality = 1.0;  // probability mass on the modal answer
  bool evidence_uses = true;      // does conditioning on evidence help?
  double lift = 0.4;              // fraction of per-token surprisal removed
  double prior_scale = 1.0;       // multiplies query-only surprisal
  bool overconfident = false;     // one near-certain token in every pass
};

// Distribution parameters for latents drawn per label. Hallucinated latents
// are a mixture: overconfident ones concentrate their samples, the rest
// spread them. The mixture's grounded quality overlaps the clean range, so
// sample entropy alone is a weak signal.
struct SyntheticParams {
  std::uint64_t seed = 7;
  double noise_scale = 0.25;
  double quality_clean_lo = 0.35;
  double quality_clean_hi = 0.95;
  double quality_confident_lo = 0.70;
  double quality_confident_hi = 0.95;
  double quality_unsure_lo = 0.30;
  double quality_unsure_hi = 0.75;
  double p_uses_clean = 0.85;
  double p_uses_hallucinated = 0.2;
  double lift_lo = 0.2;
  double lift_hi = 0.6;
  double prior_clean_lo = 1.0;
  double prior_clean_hi = 1.3;
  double prior_hallucinated_lo = 0.55;
  double prior_hallucinated_hi = 0.85;
  double p_overconfident_clean = 0.1;
  double p_overconfident_hallucinated = 0.5;
  int alternatives = 3;
  double reference_temperature = 0.7;
};

class SyntheticWorld {
 public:
  explicit SyntheticWorld(SyntheticParams params = {}) : params_(params) {}

  // Draws one latent per example from (seed, example id, label).
  static SyntheticWorld FromExamples(std::span<const QAExample> examples,
                                     const SyntheticParams& params);

  void Set(const std::string& example_id, SyntheticLatent latent);
  // Unknown ids fall back to a label-free latent keyed by the id.
  SyntheticLatent Get(const std::string& example_id) const;

  const SyntheticParams& params() const { return params_; }

 private:
  SyntheticParams params_;
  std::map<std::string, SyntheticLatent> latents_;
};

// Deterministic stand-in for an LLM with token log-probabilities. Every draw
// is a pure function of (seed, example id, call, index), so results do not
// depend on request interleaving.
//
// Scoring law, per whitespace token i of an n-token answer:
//   query-only:     l_i  = -prior_scale * (0.5 + 1.5 * u_i)
//                   (one token in [-0.02, -0.001] when overconfident)
//   with evidence:  l'_i = min(0, l_i + lift_i + e_i)
// where |e_i| <= noise_scale / sqrt(n) and lift_i = 0 unless evidence_uses.
// Hence |L_QE - L_Q| <= noise_scale * sqrt(n) when evidence is ignored, and
// L_QE > L_Q when it is used.
class SyntheticBackend final : public Backend {
 public:
  explicit SyntheticBackend(SyntheticWorld world) : world_(std::move(world)) {}

  std::vector<ScoredAnswer> SampleAnswers(const SampleRequest& request) override;
  ScoredAnswer ScoreAnswer(const ScoreRequest& request) override;
  std::string kind() const override { return "synthetic"; }
  std::string model_name() const override { return "synthetic-oracle"; }

  // The answers the model can emit for an example; index 0 is modal.
  std::vector<std::string> AnswerFamily(const std::string& example_id) const;

  const SyntheticWorld& world() const { return world_; }

 private:
  ScoredAnswer Score(const std::string& example_id, const std::string& answer,
                     bool with_evidence) const;

  SyntheticWorld world_;
};

}  // namespace eclipse

#endif  // ECLIPSE_SYNTHETIC_BACKEND_HPP_
