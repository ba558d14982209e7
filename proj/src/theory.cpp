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

#include "eclipse/theory.hpp"

#include <cmath>

#include "eclipse/detector.hpp"
#include "eclipse/error.hpp"

namespace eclipse {

namespace {

constexpr double kAgreement = 1e-6;
constexpr double kStepTolerance = 1e-14;

}  // namespace

void ObjectiveParams::Validate() const {
  if (!(alpha > 0.0) || !(lambda >= 0.0) || !(a > 0.0) || !(b > 0.0) || !(H_pref >= 0.0)) {
    throw Error(Errc::kInvalidArgument,
                "need alpha > 0, lambda >= 0, a > 0, b > 0 and H_pref >= 0");
  }
  if (!std::isfinite(c) || !std::isfinite(C)) {
    throw Error(Errc::kInvalidArgument, "c and C must be finite");
  }
}

double Logit(double H, const ObjectiveParams& p) { return p.a * (H - p.H_pref) - p.b * p.C + p.c; }

double PHall(double H, const ObjectiveParams& p) { return Sigmoid(Logit(H, p)); }

double Objective(double H, const ObjectiveParams& p) {
  const double d = H - p.H_pref;
  return p.alpha * d * d + p.lambda * PHall(H, p);
}

double FirstDerivative(double H, const ObjectiveParams& p) {
  const double u = PHall(H, p);
  return 2.0 * p.alpha * (H - p.H_pref) + p.lambda * p.a * u * (1.0 - u);
}

double CubicTerm(double u) { return u * (1.0 - u) * (1.0 - 2.0 * u); }

double SecondDerivative(double H, const ObjectiveParams& p) {
  return 2.0 * p.alpha + p.lambda * p.a * p.a * CubicTerm(PHall(H, p));
}

CubicMaximum MaxCubicTerm(std::size_t grid_points, Exec exec) {
  if (grid_points < 3) throw Error(Errc::kInvalidArgument, "grid needs at least three points");
  CubicMaximum m;
  m.u_star = 0.5 - std::sqrt(3.0) / 6.0;
  m.f_max = 1.0 / (6.0 * std::sqrt(3.0));
  m.grid_points = grid_points;
  // Interior points of (0, 1): drop both endpoints of a grid one larger on
  // each side.
  const double h = 1.0 / static_cast<double>(grid_points + 1);
  const auto best = GridMaximum([](double u) { return std::fabs(CubicTerm(u)); }, h, 1.0 - h,
                                grid_points, exec);
  m.grid_u = best.at;
  m.grid_max = best.value;
  return m;
}

double TightCurvatureBound(const ObjectiveParams& p) {
  return 2.0 * p.alpha - p.lambda * p.a * p.a / (6.0 * std::sqrt(3.0));
}

double LooseCurvatureBound(const ObjectiveParams& p) {
  return 2.0 * p.alpha - p.lambda * p.a * p.a / 4.0;
}

DescentResult GradientDescent(const ObjectiveParams& p, double start, int max_iterations) {
  const double step = 1.0 / (2.0 * p.alpha + p.lambda * p.a * p.a / 4.0);
  DescentResult r;
  r.start = start;
  r.H = start;
  for (int i = 0; i < max_iterations; ++i) {
    const double next = r.H - step * FirstDerivative(r.H, p);
    r.iterations = i + 1;
    const double moved = std::fabs(next - r.H);
    r.H = next;
    if (moved <= kStepTolerance * (1.0 + std::fabs(r.H))) {
      r.converged = true;
      break;
    }
  }
  return r;
}

ConvexityCertificate CertifyConvexity(const ObjectiveParams& p, double H_lo, double H_hi,
                                      std::size_t grid_points, Exec exec) {
  p.Validate();
  if (grid_points < 1000) throw Error(Errc::kInvalidArgument, "grid_points must be >= 1000");
  const double need_lo = p.H_pref - 10.0 / p.a;
  const double need_hi = p.H_pref + 10.0 / p.a;
  if (!(H_lo <= need_lo && H_hi >= need_hi)) {
    throw Error(Errc::kInvalidArgument, "H range must cover [H_pref - 10/a, H_pref + 10/a]");
  }
  ConvexityCertificate cert;
  cert.params = p;
  cert.H_lo = H_lo;
  cert.H_hi = H_hi;
  cert.grid_points = grid_points;
  cert.bound_satisfied = p.alpha > p.lambda * p.a * p.a / 8.0;
  cert.tight_bound = TightCurvatureBound(p);
  cert.loose_bound = LooseCurvatureBound(p);

  const auto lowest = GridMinimum([&](double H) { return SecondDerivative(H, p); }, H_lo, H_hi,
                                  grid_points, exec);
  cert.min_second_derivative = lowest.value;
  cert.argmin_H = lowest.at;
  cert.all_positive = lowest.value > 0.0;
  if (!cert.all_positive) cert.negative_curvature_at = lowest.at;

  cert.from_lo = GradientDescent(p, H_lo);
  cert.from_hi = GradientDescent(p, H_hi);
  cert.gd_converged = cert.from_lo.converged && cert.from_hi.converged &&
                      std::fabs(cert.from_lo.H - cert.from_hi.H) <= kAgreement;
  cert.H_star = cert.from_lo.H;
  return cert;
}

nlohmann::ordered_json CertificateToJson(const ConvexityCertificate& c) {
  nlohmann::ordered_json j;
  j["params"] = {{"alpha", c.params.alpha}, {"lambda", c.params.lambda}, {"a", c.params.a},
                 {"b", c.params.b},         {"c", c.params.c},           {"H_pref", c.params.H_pref},
                 {"C", c.params.C}};
  j["grid"] = {{"H_lo", c.H_lo}, {"H_hi", c.H_hi}, {"points", c.grid_points}};
  j["bound_satisfied"] = c.bound_satisfied;
  j["convex_on_grid"] = c.all_positive;
  j["min_second_derivative"] = c.min_second_derivative;
  j["argmin_H"] = c.argmin_H;
  j["negative_curvature_at"] =
      c.negative_curvature_at ? nlohmann::ordered_json(*c.negative_curvature_at)
                              : nlohmann::ordered_json(nullptr);
  j["tight_bound"] = c.tight_bound;
  j["loose_bound"] = c.loose_bound;
  auto run = [](const DescentResult& r) {
    return nlohmann::ordered_json{{"start", r.start},
                                  {"H", r.H},
                                  {"iterations", r.iterations},
                                  {"converged", r.converged}};
  };
  j["descent"] = {{"from_lo", run(c.from_lo)}, {"from_hi", run(c.from_hi)}};
  j["gd_converged"] = c.gd_converged;
  j["H_star"] = c.H_star;
  return j;
}

}  // namespace eclipse
