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

#ifndef ECLIPSE_KERNELS_HPP_
#define ECLIPSE_KERNELS_HPP_

#include <cstddef>
#include <functional>

namespace eclipse {

// Every kernel has a serial reference and an OpenMP variant that returns
// bit-identical results.
enum class Exec { kSerial, kParallel };

// Runs body(i) for i in [0, n). Exceptions are collected and the one from the
// lowest index is rethrown after all iterations finish. `max_threads` <= 0
// uses the OpenMP default.
void ParallelFor(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body,
                 int max_threads = 0);

struct GridExtremum {
  double value = 0.0;
  double at = 0.0;         // argument of the extremum
  std::size_t index = 0;   // lowest grid index attaining it
};

// Uniform grid x_i = lo + (hi - lo) * i / (points - 1), points >= 2.
double GridPoint(double lo, double hi, std::size_t points, std::size_t i);

GridExtremum GridMinimum(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points, Exec exec);
GridExtremum GridMaximum(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points, Exec exec);

}  // namespace eclipse

#endif  // ECLIPSE_KERNELS_HPP_
