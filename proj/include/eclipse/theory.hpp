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

#ifndef ECLIPSE_THEORY_HPP_
#define ECLIPSE_THEORY_HPP_

#include <cstddef>
#include <optional>

#include "eclipse/kernels.hpp"
#include "json.hpp"

namespace eclipse {

// z(H) = a (H - H_pref) - b C + c;  p_hall = sigma(z)
// J(H) = alpha (H - H_pref)^2 + lambda p_hall(H)
struct ObjectiveParams {
  double alpha = 1.0;
  double lambda = 1.0;
  double a = 2.0;
  double b = 1.0;
  double c = 0.0;
  double H_pref = 1.0;
  double C = 0.0;

  void Validate() const;  // alpha, a, b > 0; lambda, H_pref >= 0
};

double Logit(double H, const ObjectiveParams& p);
double PHall(double H, const ObjectiveParams& p);
double Objective(double H, const ObjectiveParams& p);
double FirstDerivative(double H, const ObjectiveParams& p);
// 2 alpha + lambda a^2 u (1 - u)(1 - 2u), u = p_hall(H).
double SecondDerivative(double H, const ObjectiveParams& p);

// f(u) = u (1 - u)(1 - 2u).
double CubicTerm(double u);

struct CubicMaximum {
  double u_star = 0.0;  // 1/2 - sqrt(3)/6
  double f_max = 0.0;   // 1 / (6 sqrt 3)
  double grid_u = 0.0;
  double grid_max = 0.0;  // max |f| over the open-interval grid
  std::size_t grid_points = 0;
};

// Closed form plus a dense grid over u in (0, 1).
CubicMaximum MaxCubicTerm(std::size_t grid_points = 1000000, Exec exec = Exec::kParallel);

// Worst-case curvature bounds: the tight one uses |f| <= 1/(6 sqrt 3), the
// loose one |f| <= 1/8.
double TightCurvatureBound(const ObjectiveParams& p);
double LooseCurvatureBound(const ObjectiveParams& p);

struct DescentResult {
  double start = 0.0;
  double H = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Fixed step 1 / (2 alpha + lambda a^2 / 4), at most max_iterations steps.
DescentResult GradientDescent(const ObjectiveParams& p, double start,
                              int max_iterations = 10000);

struct ConvexityCertificate {
  ObjectiveParams params;
  double H_lo = 0.0;
  double H_hi = 0.0;
  std::size_t grid_points = 0;
  bool bound_satisfied = false;  // alpha > lambda a^2 / 8
  double min_second_derivative = 0.0;
  double argmin_H = 0.0;
  bool all_positive = false;
  std::optional<double> negative_curvature_at;
  double tight_bound = 0.0;
  double loose_bound = 0.0;
  DescentResult from_lo;
  DescentResult from_hi;
  bool gd_converged = false;  // both runs converge and agree within 1e-6
  double H_star = 0.0;
};

// Throws kInvalidArgument when grid_points < 1000 or the range does not
// cover [H_pref - 10/a, H_pref + 10/a].
ConvexityCertificate CertifyConvexity(const ObjectiveParams& p, double H_lo, double H_hi,
                                      std::size_t grid_points, Exec exec = Exec::kParallel);

nlohmann::ordered_json CertificateToJson(const ConvexityCertificate& cert);

}  // namespace eclipse

#endif  // ECLIPSE_THEORY_HPP_
