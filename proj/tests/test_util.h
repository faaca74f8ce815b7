//
// Copyright 2026 The dpsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPSYNTH_TESTS_TEST_UTIL_H_
#define DPSYNTH_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "absl/strings/str_cat.h"
#include "dpsynth/tabular_data.h"
#include "gtest/gtest.h"

namespace dpsynth::testing {

#define DPSYNTH_ASSERT_OK(expr)                       \
  do {                                                \
    const auto& _st = (expr);                         \
    ASSERT_TRUE(_st.ok()) << _st.message();           \
  } while (0)

#define DPSYNTH_EXPECT_OK(expr)                       \
  do {                                                \
    const auto& _st = (expr);                         \
    EXPECT_TRUE(_st.ok()) << _st.message();           \
  } while (0)

#define DPSYNTH_ASSERT_OK_AND_ASSIGN(lhs, expr)                          \
  auto DPSYNTH_CONCAT(_so_, __LINE__) = (expr);                          \
  ASSERT_TRUE(DPSYNTH_CONCAT(_so_, __LINE__).ok())                       \
      << DPSYNTH_CONCAT(_so_, __LINE__).status().message();              \
  lhs = std::move(*DPSYNTH_CONCAT(_so_, __LINE__))
#define DPSYNTH_CONCAT_INNER(a, b) a##b
#define DPSYNTH_CONCAT(a, b) DPSYNTH_CONCAT_INNER(a, b)

// Binary classification data: `categorical` categorical attributes with 2-4
// values, `numerical` numerical ones, and a label that follows a noisy linear
// rule over the attributes.
inline std::string RandomCsv(std::uint64_t seed, std::size_t rows, int categorical,
                             int numerical, double label_noise = 0.1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::string out;
  for (int j = 0; j < categorical; ++j) absl::StrAppend(&out, "c", j, ",");
  for (int j = 0; j < numerical; ++j) absl::StrAppend(&out, "x", j, ",");
  out += "label\n";
  for (std::size_t i = 0; i < rows; ++i) {
    double score = 0.0;
    for (int j = 0; j < categorical; ++j) {
      const int levels = 2 + j % 3;
      const int v = static_cast<int>(unit(rng) * levels);
      score += (v % 2 == 0 ? 1.0 : -1.0) * 0.5;
      absl::StrAppend(&out, "v", v, ",");
    }
    for (int j = 0; j < numerical; ++j) {
      const double x = std::round(unit(rng) * 1000.0) / 10.0;
      score += (j % 2 == 0 ? 1.0 : -1.0) * (x - 50.0) / 25.0;
      absl::StrAppend(&out, x, ",");
    }
    const bool positive = (score > 0) != (unit(rng) < label_noise);
    out += positive ? "yes\n" : "no\n";
  }
  return out;
}

inline TabularDataset RandomDataset(std::uint64_t seed, std::size_t rows, int categorical,
                                    int numerical, double label_noise = 0.1) {
  auto d = ParseCsv(RandomCsv(seed, rows, categorical, numerical, label_noise));
  if (!d.ok()) {
    ADD_FAILURE() << d.status().message();
    std::abort();
  }
  return *std::move(d);
}

// A fresh directory under the test temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "dpsynth_tests" /
                              absl::StrCat(info->test_suite_name(), ".", info->name(), ".",
                                           name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dpsynth::testing

#endif  // DPSYNTH_TESTS_TEST_UTIL_H_
