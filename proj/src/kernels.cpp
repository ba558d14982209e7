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

#include "eclipse/kernels.hpp"

#include <exception>
#include <vector>

#include <omp.h>

#include "eclipse/error.hpp"

namespace eclipse {

void ParallelFor(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body,
                 int max_threads) {
  std::vector<std::exception_ptr> errors(n);
  if (exec == Exec::kSerial) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    const int threads = max_threads > 0 ? max_threads : omp_get_max_threads();
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double GridPoint(double lo, double hi, std::size_t points, std::size_t i) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

namespace {

// Extremum with the lowest index on ties, so the reduction order is
// irrelevant.
template <typename Better>
GridExtremum GridExtreme(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points, Exec exec, Better better) {
  if (points < 2) throw Error(Errc::kInvalidArgument, "grid needs at least two points");
  const GridExtremum first{f(lo), lo, 0};
  GridExtremum best = first;
  const auto count = static_cast<std::ptrdiff_t>(points);
  if (exec == Exec::kSerial) {
    for (std::ptrdiff_t i = 1; i < count; ++i) {
      const double x = GridPoint(lo, hi, points, static_cast<std::size_t>(i));
      const double v = f(x);
      if (better(v, best.value)) best = {v, x, static_cast<std::size_t>(i)};
    }
    return best;
  }
#pragma omp parallel
  {
    GridExtremum local = first;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 1; i < count; ++i) {
      const double x = GridPoint(lo, hi, points, static_cast<std::size_t>(i));
      const double v = f(x);
      if (better(v, local.value)) local = {v, x, static_cast<std::size_t>(i)};
    }
#pragma omp critical
    {
      if (better(local.value, best.value) ||
          (local.value == best.value && local.index < best.index)) {
        best = local;
      }
    }
  }
  return best;
}

}  // namespace

GridExtremum GridMinimum(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points, Exec exec) {
  return GridExtreme(f, lo, hi, points, exec, [](double a, double b) { return a < b; });
}

GridExtremum GridMaximum(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t points, Exec exec) {
  return GridExtreme(f, lo, hi, points, exec, [](double a, double b) { return a > b; });
}

}  // namespace eclipse
