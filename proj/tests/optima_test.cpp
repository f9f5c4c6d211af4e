// Copyright 2026 The polartax Authors.
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

#include "polartax/optima.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <tuple>

#include "polartax/instances.hpp"
#include "polartax/penalties.hpp"

namespace polartax {
namespace {

MeanMatrix random_means(CounterRng& rng, std::size_t n, std::size_t k) {
  Rows rows(n, std::vector<double>(k));
  for (auto& r : rows) for (auto& v : r) v = rng.uniform();
  return MeanMatrix::from_rows(rows);
}

double min_gamma_slack(const PolicyProfile& p, double gamma) {
  const auto avg = p.column_means();
  double worst = 1.0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    for (std::size_t j = 0; j < p.k(); ++j) {
      worst = std::min(worst, p(i, j) - gamma * avg[j]);
    }
  }
  return worst;
}

// n=2, k=2 objective with free coordinates a = p[0][0], b = p[1][0].
double grid_value(const MeanMatrix& m, double a, double b, double gamma,
                  double eta, bool hard) {
  const std::vector<double> p{a, 1 - a, b, 1 - b};
  double reward = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) reward += m(i, j) * p[i * 2 + j];
  }
  double shortfall = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    const double avg = 0.5 * (p[j] + p[2 + j]);
    for (std::size_t i = 0; i < 2; ++i) {
      const double s = gamma * avg - p[i * 2 + j];
      if (hard && s > 1e-12) return -1e300;
      shortfall += std::max(s, 0.0);
    }
  }
  return reward - eta * shortfall;
}

double grid_max(const MeanMatrix& m, double gamma, double eta, bool hard,
                double step) {
  const int steps = static_cast<int>(std::lround(1.0 / step));
  double best = -1e300;
  for (int x = 0; x <= steps; ++x) {
    for (int y = 0; y <= steps; ++y) {
      best = std::max(best, grid_value(m, x * step, y * step, gamma, eta, hard));
    }
  }
  return best;
}

TEST(OptimalNaiveTest, MinorityRowFollowsClosedForm) {
  const auto means = polarized_instance(4, 3);
  const auto res = optimal_naive(means, 0.25);
  EXPECT_NEAR(res.objective_value, 3.0 + 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(res.profile(3, 0), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(res.profile(3, 1), 1.0 / 3.0, 1e-9);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(res.profile(i, 0), 1.0, 1e-9);
}

TEST(OptimalNaiveTest, LooseDeltaAllowsFullPersonalization) {
  EXPECT_NEAR(optimal_naive(polarized_instance(4, 3), 0.8).objective_value,
              4.0, 1e-9);
}

TEST(OptimalNaiveTest, ZeroDeltaForcesSharedRow) {
  CounterRng rng(3);
  const auto means = random_means(rng, 4, 3);
  const auto res = optimal_naive(means, 0.0);
  double best = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    double col = 0;
    for (std::size_t i = 0; i < 4; ++i) col += means(i, j);
    best = std::max(best, col);
  }
  EXPECT_NEAR(res.objective_value, best, 1e-9);
  for (std::size_t i = 1; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(res.profile(i, j), res.profile(0, j), 1e-8);
    }
  }
}

TEST(OptimalNaiveTest, DeviationBoundHolds) {
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto means = random_means(rng, 2 + rng() % 4, 2 + rng() % 3);
    const double delta = rng.uniform() * 0.5;
    const auto res = optimal_naive(means, delta);
    const auto avg = res.profile.column_means();
    for (std::size_t i = 0; i < means.n(); ++i) {
      for (std::size_t j = 0; j < means.k(); ++j) {
        EXPECT_LE(std::abs(res.profile(i, j) - avg[j]), delta + 1e-8);
      }
    }
  }
  EXPECT_THROW(optimal_naive(polarized_instance(2, 1), -0.1), Error);
}

TEST(OptimalForm1Test, GammaZeroIsFullPersonalization) {
  CounterRng rng(4);
  const auto means = random_means(rng, 5, 4);
  double expect = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto r = means.row(i);
    expect += *std::max_element(r.begin(), r.end());
  }
  EXPECT_NEAR(optimal_form1(means, 0.0).objective_value, expect, 1e-9);
}

TEST(OptimalForm1Test, PolarizedHalfGamma) {
  const auto res = optimal_form1(polarized_instance(4, 3), 0.5);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(res.profile(i, 0), 0.875, 1e-9);
    EXPECT_NEAR(res.profile(i, 1), 0.125, 1e-9);
  }
  EXPECT_NEAR(res.profile(3, 0), 0.375, 1e-9);
  EXPECT_NEAR(res.profile(3, 1), 0.625, 1e-9);
  const auto cf = closed_form_form1(4, 3, 0.5);
  EXPECT_NEAR(res.objective_value,
              expected_reward(polarized_instance(4, 3), cf), 1e-6);
}

TEST(OptimalForm1Test, FullGammaSharesBestArm) {
  const auto means = polarized_instance(4, 3);
  EXPECT_NEAR(optimal_form1(means, 1.0).objective_value, 3.0, 1e-9);
}

TEST(OptimalForm1Test, ObjectiveNonIncreasingInGamma) {
  CounterRng rng(12);
  for (int trial = 0; trial < 3; ++trial) {
    const auto means = random_means(rng, 4, 3);
    double prev = 1e300;
    for (int g = 0; g < 50; ++g) {
      const double gamma = g / 49.0;
      const auto res = optimal_form1(means, gamma);
      EXPECT_LE(res.objective_value, prev + 1e-7);
      EXPECT_GE(min_gamma_slack(res.profile, gamma), -1e-8);
      prev = res.objective_value;
    }
  }
}

TEST(OptimalForm1Test, RejectsGammaOutsideUnitInterval) {
  EXPECT_THROW(optimal_form1(polarized_instance(2, 1), 1.5), Error);
  EXPECT_THROW(optimal_form1(polarized_instance(2, 1), -0.1), Error);
}

TEST(OptimalForm2Test, ZeroEtaMatchesUnconstrained) {
  CounterRng rng(5);
  const auto means = random_means(rng, 4, 3);
  EXPECT_NEAR(optimal_form2(means, {0.7, 0.0, 0.0}).objective_value,
              optimal_form1(means, 0.0).objective_value, 1e-9);
}

TEST(OptimalForm2Test, LargeEtaEnforcesConstraint) {
  const auto means = polarized_instance(4, 3);
  EXPECT_NEAR(optimal_form2(means, {0.5, 1e6, 0.0}).objective_value,
              optimal_form1(means, 0.5).objective_value, 1e-6);
}

TEST(OptimalForm2Test, TwoUserGridOracle) {
  const auto means = polarized_instance(2, 1);
  const auto res = optimal_form2(means, {1.0, 0.1, 0.0});
  const double grid = grid_max(means, 1.0, 0.1, false, 0.01);
  EXPECT_GE(res.objective_value, grid - 1e-6);
  EXPECT_LE(res.objective_value, grid + 0.02);
  // Penalty bookkeeping matches an independent evaluation.
  EXPECT_NEAR(res.penalty,
              step_penalty(res.profile, {1.0, 0.1, 0.0}).total, 1e-9);
  EXPECT_NEAR(res.objective_value, res.reward - res.penalty, 1e-9);
}

TEST(OptimalForm2Test, ObjectiveNonIncreasingInEta) {
  CounterRng rng(21);
  const auto means = random_means(rng, 3, 3);
  for (double gamma : {0.2, 0.6, 1.0}) {
    double prev = 1e300;
    for (int e = 0; e <= 30; ++e) {
      const double v = optimal_form2(means, {gamma, 0.1 * e, 0.0}).objective_value;
      EXPECT_LE(v, prev + 1e-7);
      prev = v;
    }
  }
}

TEST(GridOracleTest, RandomTwoByTwoInstances) {
  CounterRng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto means = random_means(rng, 2, 2);
    const double gamma = rng.uniform();
    const double eta = 2.0 * rng.uniform();
    const double g1 = grid_max(means, gamma, 0.0, true, 0.005);
    const double v1 = optimal_form1(means, gamma).objective_value;
    EXPECT_GE(v1, g1 - 1e-6);
    EXPECT_LE(v1, g1 + 0.02);
    const double g2 = grid_max(means, gamma, eta, false, 0.005);
    const double v2 = optimal_form2(means, {gamma, eta, 0.0}).objective_value;
    EXPECT_GE(v2, g2 - 1e-6);
    EXPECT_LE(v2, g2 + 0.02);
  }
}

TEST(ClosedFormTest, NaiveExamples) {
  const auto a = closed_form_naive(4, 3, 0.25);
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
  EXPECT_NEAR(a(3, 0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(a(3, 1), 1.0 / 3.0, 1e-12);
  const auto b = closed_form_naive(2, 1, 0.25);
  EXPECT_NEAR(b(1, 0), 0.5, 1e-12);
  EXPECT_NEAR(b(1, 1), 0.5, 1e-12);
  const auto c = closed_form_naive(4, 3, 0.0);
  EXPECT_DOUBLE_EQ(c(3, 0), 1.0);
}

TEST(ClosedFormTest, NaivePreconditions) {
  for (auto bad : {std::tuple{4u, 1u, 0.1}, std::tuple{4u, 3u, 0.75},
                   std::tuple{4u, 3u, -0.1}}) {
    try {
      closed_form_naive(std::get<0>(bad), std::get<1>(bad), std::get<2>(bad));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
    }
  }
}

TEST(ClosedFormTest, Form1Examples) {
  const auto a = closed_form_form1(4, 3, 0.5);
  EXPECT_NEAR(a(0, 0), 0.875, 1e-12);
  EXPECT_NEAR(a(3, 1), 0.625, 1e-12);
  const auto b = closed_form_form1(4, 3, 0.0);
  EXPECT_DOUBLE_EQ(b(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(b(3, 1), 1.0);
  const auto c = closed_form_form1(2, 1, 0.5);
  EXPECT_NEAR(c(0, 0), 0.75, 1e-12);
  EXPECT_NEAR(c(1, 1), 0.75, 1e-12);
  try {
    closed_form_form1(4, 3, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PreconditionViolated);
  }
}

TEST(ClosedFormTest, MatchesProgramsOnRandomConfigurations) {
  CounterRng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 2 + rng() % 9;
    const std::size_t maj = (n + 1) / 2 + rng() % (n - (n + 1) / 2 + 1);
    const auto means = polarized_instance(n, maj);
    const double frac = static_cast<double>(maj) / n;
    const double delta = rng.uniform() * frac * 0.999;
    EXPECT_NEAR(optimal_naive(means, delta).objective_value,
                expected_reward(means, closed_form_naive(n, maj, delta)), 1e-6);
    const double gamma = 0.5 * rng.uniform();
    const auto cf = closed_form_form1(n, maj, gamma);
    EXPECT_NEAR(optimal_form1(means, gamma).objective_value,
                expected_reward(means, cf), 1e-6);
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0;
      for (std::size_t j = 0; j < 2; ++j) r += means(i, j) * cf(i, j);
      EXPECT_GE(r, 1.0 - gamma - 1e-9);
    }
  }
}

}  // namespace
}  // namespace polartax
