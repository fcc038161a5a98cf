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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "gpstps/gp_training.hpp"

using namespace gpstps;

namespace {

WeightedDataset noisy_cosine(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  WeightedDataset d;
  d.inputs = Points(n, 1);
  d.targets = Vector(n);
  d.weights = Vector(n);
  for (int i = 0; i < n; ++i) {
    d.inputs(i, 0) = 3.0 * g(rng);
    d.targets(i) = std::cos(d.inputs(i, 0)) + 0.2 * g(rng);
    d.weights(i) = std::exp(0.5 * g(rng));
  }
  return d;
}

Points column(std::initializer_list<double> v) {
  Points p(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (const double x : v) p(i++, 0) = x;
  return p;
}

}  // namespace

TEST_CASE("zero budget returns the input model unchanged") {
  const WeightedDataset d = noisy_cosine(25, 1);
  const SparseGPModel m(column({-2.0, 0.0, 2.0}), KernelParams::isotropic(1, 0.4, 3.0), 0.1, 0.7);
  HyperoptOptions opt;
  opt.budget = 0;
  const HyperoptResult r = optimize_hyperparameters_traced(d, m, opt);
  CHECK(r.model.kernel().lengthscales == m.kernel().lengthscales);
  CHECK(r.model.kernel().signal_variance == m.kernel().signal_variance);
  CHECK(r.model.noise_variance() == m.noise_variance());
  CHECK(r.model.q_mean() == m.q_mean());
  CHECK(r.final_elbo == r.initial_elbo);
}

TEST_CASE("accepted steps never lower the ELBO and the result beats the start") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WeightedDataset d = noisy_cosine(40, seed);
    const SparseGPModel m(column({-3.0, -1.0, 1.0, 3.0}), KernelParams::isotropic(1, 5.0, 0.2), 0.0, 1.0);
    HyperoptOptions opt;
    opt.seed = seed;
    const HyperoptResult r = optimize_hyperparameters_traced(d, m, opt);
    CHECK(r.accepted_elbo.size() == 3);
    for (const auto& seq : r.accepted_elbo) {
      CHECK(std::is_sorted(seq.begin(), seq.end()));
    }
    CHECK(r.final_elbo >= r.initial_elbo);
    CHECK(r.final_elbo == doctest::Approx(weighted_elbo(d, r.model)));
  }
}

TEST_CASE("fixed-noise optimization keeps the noise and stays inside the box") {
  const WeightedDataset d = noisy_cosine(40, 9);
  const SparseGPModel m(column({-2.0, 0.0, 2.0}), KernelParams::isotropic(1, 1.0, 1.0), 0.0, 0.3);
  HyperoptOptions opt;
  opt.optimize_noise = false;
  opt.lower = 0.5;
  opt.upper = 2.0;
  const SparseGPModel out = optimize_hyperparameters(d, m, opt);
  CHECK(out.noise_variance() == 0.3);
  CHECK(out.kernel().lengthscales(0) >= 0.5 - 1e-12);
  CHECK(out.kernel().lengthscales(0) <= 2.0 + 1e-12);
  CHECK(out.kernel().signal_variance >= 0.5 - 1e-12);
  CHECK(out.kernel().signal_variance <= 2.0 + 1e-12);
}

TEST_CASE("optimization is deterministic given the seed") {
  const WeightedDataset d = noisy_cosine(30, 3);
  const SparseGPModel m(column({-2.0, 0.0, 2.0}), KernelParams::isotropic(1, 2.0, 1.0), 0.0, 0.5);
  HyperoptOptions opt;
  opt.seed = 42;
  const SparseGPModel a = optimize_hyperparameters(d, m, opt);
  const SparseGPModel b = optimize_hyperparameters(d, m, opt);
  CHECK(a.kernel().lengthscales == b.kernel().lengthscales);
  CHECK(a.noise_variance() == b.noise_variance());
  CHECK(a.q_mean() == b.q_mean());
}

TEST_CASE("identical states give jittered copies near the common value") {
  const Points s = Points::Constant(12, 1, 2.5);
  const std::vector<double> w(12, 1.0);
  const Points z = select_pseudo_inputs(s, w, 5, 7);
  REQUIRE(z.rows() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::abs(z(i, 0) - 2.5) <= 1e-3);
}

TEST_CASE("one center is the weighted mean") {
  const Points s = column({0.0, 1.0, 4.0, 10.0});
  const std::vector<double> w{1.0, 2.0, 1.0, 0.0};
  const Points z = select_pseudo_inputs(s, w, 1, 3);
  REQUIRE(z.rows() == 1);
  CHECK(z(0, 0) == doctest::Approx((0.0 + 2.0 + 4.0) / 4.0));
}

TEST_CASE("as many centers as distinct states gives a permutation of the states") {
  const Points s = column({3.0, 0.0, 3.0, 6.0, 0.0, 1.5});
  const std::vector<double> w{1.0, 0.5, 2.0, 1.0, 1.0, 0.3};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Points z = select_pseudo_inputs(s, w, 4, seed);
    std::vector<double> got(z.data(), z.data() + z.rows());
    std::sort(got.begin(), got.end());
    REQUIRE(got.size() == 4);
    CHECK(got[0] == doctest::Approx(0.0));
    CHECK(got[1] == doctest::Approx(1.5));
    CHECK(got[2] == doctest::Approx(3.0));
    CHECK(got[3] == doctest::Approx(6.0));
  }
}

TEST_CASE("k-means centers sit at cluster means for well separated clusters") {
  const Points s = column({0.0, 0.2, 0.4, 10.0, 10.4, 20.0, 21.0});
  const std::vector<double> w(7, 1.0);
  Points z = select_pseudo_inputs(s, w, 3, 11);
  std::vector<double> got(z.data(), z.data() + 3);
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(0.2));
  CHECK(got[1] == doctest::Approx(10.2));
  CHECK(got[2] == doctest::Approx(20.5));
}

TEST_CASE("pseudo-input selection rejects unusable input") {
  const std::vector<double> none;
  CHECK_THROWS_AS(select_pseudo_inputs(Points(0, 1), none, 2, 0), ContractViolation);
  const std::vector<double> zero(3, 0.0);
  CHECK_THROWS_AS(select_pseudo_inputs(column({1.0, 2.0, 3.0}), zero, 2, 0), ContractViolation);
  const std::vector<double> one(3, 1.0);
  CHECK_THROWS_AS(select_pseudo_inputs(column({1.0, 2.0, 3.0}), one, 0, 0), ContractViolation);
}
