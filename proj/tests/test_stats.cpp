// Copyright 2026 The GPSTPS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "gpstps/kernel.hpp"
#include "gpstps/stats.hpp"
#include "oracles.hpp"

using namespace gpstps;

TEST_CASE("identical samples give p = 1") {
  const std::vector<double> a{0.3, 1.2, -4.0, 2.2};
  const TTestResult r = paired_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p == 1.0);
}

TEST_CASE("a constant nonzero difference gives p = 0") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 3, 4, 5, 6};
  const TTestResult r = paired_t_test(a, b);
  CHECK(r.p == 0.0);
  CHECK(r.t == -std::numeric_limits<double>::infinity());
}

TEST_CASE("p-values match quadrature of the t density") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<double> a(10);
    std::vector<double> b(10);
    for (int i = 0; i < 10; ++i) {
      a[i] = g(rng);
      b[i] = g(rng) + 0.5 * g(rng);
    }
    const TTestResult r = paired_t_test(a, b);
    CHECK(std::abs(r.p - oracle::t_two_sided_p(r.t, 9.0)) < 1e-6);
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
  }
}

TEST_CASE("t statistic matches a hand computation") {
  // d = (1, 2, 3): mean 2, sd 1, se 1/sqrt(3).
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{0, 0, 0};
  CHECK(paired_t_test(a, b).t == doctest::Approx(2.0 * std::sqrt(3.0)));
}

TEST_CASE("summary statistics and contract checks") {
  const std::vector<double> x{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(mean(x) == 5.0);
  CHECK(sample_std(x) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(sample_std(std::vector<double>{3.0}) == 0.0);
  CHECK_THROWS_AS(mean(std::vector<double>{}), ContractViolation);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), ContractViolation);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0, 2.0}, std::vector<double>{2.0}), ContractViolation);
}
