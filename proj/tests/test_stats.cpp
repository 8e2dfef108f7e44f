// Copyright 2026 The Peaqlab Authors. All Rights Reserved.
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "peaqlab/error.hpp"
#include "peaqlab/stats.hpp"

using namespace peaqlab;

TEST_CASE("pearson on perfectly linear data") {
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{6, 4, 2}) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson hand-computed value") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 3, 2, 4};
  CHECK(std::abs(pearson(x, y) - 0.8) < 1e-12);
}

TEST_CASE("pearson error conditions") {
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), Error);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
  try {
    pearson(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConstantInput);
  }
}

TEST_CASE("pearson is invariant under positive affine rescaling") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  std::vector<double> x(40), y(40), x2(40);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = dist(rng);
    y[i] = dist(rng);
    x2[i] = 3.7 * x[i] + 12.0;
  }
  CHECK(pearson(x, y) == doctest::Approx(pearson(x2, y)).epsilon(1e-12));
}

TEST_CASE("average ranks resolve ties to the mean rank") {
  const std::vector<double> ranks = average_ranks(std::vector<double>{10, 20, 20, 30});
  CHECK(ranks[0] == 1.0);
  CHECK(ranks[1] == 2.5);
  CHECK(ranks[2] == 2.5);
  CHECK(ranks[3] == 4.0);
}

TEST_CASE("spearman on monotone data") {
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) ==
        doctest::Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{30, 20, 10}) ==
        doctest::Approx(-1.0));
  // Any strictly monotone transform preserves the ranks exactly.
  const std::vector<double> x{0.3, 1.1, 2.0, 5.5, 9.0};
  const std::vector<double> y{4.0, 2.0, 7.0, 1.0, 5.0};
  std::vector<double> expx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) expx[i] = std::exp(x[i]);
  CHECK(spearman(x, y) == doctest::Approx(spearman(expx, y)).epsilon(1e-12));
}

TEST_CASE("spearman tied case against hand-ranked oracle") {
  // Ranks of y = [1,1,2,3] are [1.5,1.5,3,4]; Pearson of [1,2,3,4] with
  // those ranks is 3sqrt(10)/10.
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 1, 2, 3};
  const double expected = 3.0 * std::sqrt(10.0) / 10.0;
  CHECK(std::abs(expected - 0.948683) < 1e-6);  // sanity on the oracle itself
  CHECK(std::abs(spearman(x, y) - 0.948683) < 1e-6);
}

TEST_CASE("aes basic values") {
  CHECK(aes(std::vector<double>{10, 20}, std::vector<double>{10, 20},
            std::vector<double>{2, 2}) == 0.0);
  CHECK(std::abs(aes(std::vector<double>{12, 24}, std::vector<double>{10, 20},
                     std::vector<double>{2, 2}) -
                 1.581139) < 1e-6);
}

TEST_CASE("aes equals independent direct summation on random vectors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  std::uniform_real_distribution<double> width(0.5, 8.0);
  std::vector<double> o(50), s(50), ci(50);
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = score(rng);
    s[i] = score(rng);
    ci[i] = width(rng);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double z = std::abs(o[i] - s[i]) / ci[i];
    acc += z * z;
  }
  const double oracle = std::sqrt(acc / 50.0);
  CHECK(std::abs(aes(o, s, ci) - oracle) < 1e-12);
}

TEST_CASE("aes halves exactly when all CIs double") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  std::vector<double> o(20), s(20), ci(20), ci2(20);
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = score(rng);
    s[i] = score(rng);
    ci[i] = 1.0 + 0.1 * static_cast<double>(i);
    ci2[i] = 2.0 * ci[i];
  }
  CHECK(aes(o, s, ci2) == aes(o, s, ci) / 2.0);
}

TEST_CASE("aes rejects non-positive CI") {
  try {
    aes(std::vector<double>{1}, std::vector<double>{1}, std::vector<double>{0});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonPositiveCI);
  }
}

TEST_CASE("aggregate_ci basics") {
  const std::vector<double> equal(10, 0.8);
  const MeanCi a = aggregate_ci(equal);
  CHECK(a.mean == doctest::Approx(0.8));
  CHECK(a.ci95_half_width <= 1e-12);  // exact zero up to summation rounding

  const MeanCi b = aggregate_ci(std::vector<double>{0.0, 1.0});
  CHECK(b.mean == doctest::Approx(0.5));
  // sd = 0.7071, half-width = 1.96 * 0.7071 / sqrt(2) = 0.98
  CHECK(b.ci95_half_width == doctest::Approx(0.98).epsilon(1e-6));
}

TEST_CASE("aggregate_ci half-width shrinks like 1/sqrt(N)") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> small(2000), large(8000);
  for (double& v : small) v = noise(rng);
  for (double& v : large) v = noise(rng);
  const double hw_small = aggregate_ci(small).ci95_half_width;
  const double hw_large = aggregate_ci(large).ci95_half_width;
  CHECK(std::abs(hw_large - hw_small / 2.0) < 0.15 * hw_small / 2.0);
}

TEST_CASE("percentile aggregate covers the same center") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(3.0, 0.5);
  std::vector<double> samples(4000);
  for (double& v : samples) v = noise(rng);
  const MeanCi p = aggregate_ci_percentile(samples);
  CHECK(p.mean == doctest::Approx(3.0).epsilon(0.02));
  // Half the 2.5%..97.5% spread of a normal is about 1.96 sigma.
  CHECK(p.ci95_half_width == doctest::Approx(1.96 * 0.5).epsilon(0.08));
}
