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


#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "eclipse/error.hpp"
#include "eclipse/kernels.hpp"

namespace eclipse {
namespace {

TEST(Kernels, ParallelForVisitsEveryIndexOnce) {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    std::vector<std::atomic<int>> hits(500);
    ParallelFor(hits.size(), exec, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Kernels, ParallelForRethrowsLowestIndex) {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    std::atomic<int> ran{0};
    try {
      ParallelFor(
          100, exec,
          [&](std::size_t i) {
            ran++;
            if (i == 71 || i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
          },
          4);
      FAIL() << "no exception";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "13");
    }
    EXPECT_EQ(ran.load(), 100);
  }
}

TEST(Kernels, GridPointEndpoints) {
  EXPECT_EQ(GridPoint(-1.0, 3.0, 5, 0), -1.0);
  EXPECT_EQ(GridPoint(-1.0, 3.0, 5, 4), 3.0);
  EXPECT_EQ(GridPoint(-1.0, 3.0, 5, 2), 1.0);
}

TEST(Kernels, GridTiesResolveToLowestIndex) {
  for (Exec exec : {Exec::kSerial, Exec::kParallel}) {
    const auto flat = GridMinimum([](double) { return 2.0; }, 0.0, 1.0, 1001, exec);
    EXPECT_EQ(flat.index, 0u);
    // |cos| peaks at several grid points; the first one wins.
    const auto peaks = GridMaximum([](double x) { return std::fabs(std::cos(x)); }, 0.0,
                                   4.0 * M_PI, 9, exec);
    EXPECT_EQ(peaks.index, 0u);
    const auto v = GridMinimum([](double x) { return std::fabs(x - 0.5) < 0.25 ? -1.0 : 0.0; },
                               0.0, 1.0, 1001, exec);
    EXPECT_EQ(v.index, 251u);
  }
}

TEST(Kernels, SerialAndParallelGridsAgree) {
  auto f = [](double x) { return std::sin(7.0 * x) * std::exp(-x) + 0.01 * std::round(x * 10); };
  const auto a = GridMinimum(f, -3.0, 5.0, 100003, Exec::kSerial);
  const auto b = GridMinimum(f, -3.0, 5.0, 100003, Exec::kParallel);
  EXPECT_EQ(a.index, b.index);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.at, b.at);
  const auto c = GridMaximum(f, -3.0, 5.0, 100003, Exec::kSerial);
  const auto d = GridMaximum(f, -3.0, 5.0, 100003, Exec::kParallel);
  EXPECT_EQ(c.index, d.index);
  EXPECT_EQ(c.value, d.value);
}

TEST(Kernels, GridNeedsTwoPoints) {
  EXPECT_THROW(GridMinimum([](double x) { return x; }, 0.0, 1.0, 1, Exec::kSerial), Error);
}

}  // namespace
}  // namespace eclipse
