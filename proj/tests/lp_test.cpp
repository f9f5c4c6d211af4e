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

#include "polartax/lp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <functional>
#include <optional>

namespace polartax::lp {
namespace {

// Brute-force oracle for max c.x s.t. A x <= b, x >= 0: enumerate every
// choice of nv tight constraints among the m rows and nv bounds, solve the
// square system and keep the best feasible point.
std::optional<double> vertex_enumeration(const std::vector<std::vector<double>>& A,
                                         const std::vector<double>& b,
                                         const std::vector<double>& c) {
  const std::size_t nv = c.size(), m = A.size();
  std::vector<std::vector<double>> rows = A;
  std::vector<double> rhs = b;
  for (std::size_t j = 0; j < nv; ++j) {
    std::vector<double> e(nv, 0.0);
    e[j] = -1.0;
    rows.push_back(e);
    rhs.push_back(0.0);
  }
  const std::size_t total = m + nv;
  std::optional<double> best;
  std::vector<std::size_t> pick(nv);
  // Iterate over all nv-subsets of [0, total).
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                          std::size_t start) {
    if (pos == nv) {
      std::vector<std::vector<double>> M(nv, std::vector<double>(nv + 1));
      for (std::size_t r = 0; r < nv; ++r) {
        for (std::size_t j = 0; j < nv; ++j) M[r][j] = rows[pick[r]][j];
        M[r][nv] = rhs[pick[r]];
      }
      for (std::size_t col = 0; col < nv; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col; r < nv; ++r) {
          if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        }
        if (std::abs(M[piv][col]) < 1e-12) return;
        std::swap(M[piv], M[col]);
        for (std::size_t r = 0; r < nv; ++r) {
          if (r == col) continue;
          const double f = M[r][col] / M[col][col];
          for (std::size_t j = col; j <= nv; ++j) M[r][j] -= f * M[col][j];
        }
      }
      std::vector<double> x(nv);
      for (std::size_t j = 0; j < nv; ++j) x[j] = M[j][nv] / M[j][j];
      for (std::size_t r = 0; r < total; ++r) {
        double lhs = 0;
        for (std::size_t j = 0; j < nv; ++j) lhs += rows[r][j] * x[j];
        if (lhs > rhs[r] + 1e-9) return;
      }
      double v = 0;
      for (std::size_t j = 0; j < nv; ++j) v += c[j] * x[j];
      if (!best || v > *best) best = v;
      return;
    }
    for (std::size_t s = start; s < total; ++s) {
      pick[pos] = s;
      rec(pos + 1, s + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST(SimplexTest, SingleBoundedVariable) {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add({1.0}, Relation::LessEq, 1.0);
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
}

TEST(SimplexTest, FacetOptimumHasUniqueValue) {
  LinearProgram lp(2);
  lp.objective = {1.0, 1.0};
  lp.add({1.0, 1.0}, Relation::LessEq, 1.0);
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 1.0, 1e-12);
}

TEST(SimplexTest, DetectsInfeasibility) {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add({1.0}, Relation::GreaterEq, 2.0);
  lp.add({1.0}, Relation::LessEq, 1.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
  try {
    solve_or_throw(lp, "test");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}

TEST(SimplexTest, DetectsUnboundedness) {
  LinearProgram lp(2);
  lp.objective = {1.0, 0.0};
  lp.add({1.0, -1.0}, Relation::LessEq, 1.0);
  EXPECT_EQ(solve(lp).status, LpStatus::Unbounded);
}

TEST(SimplexTest, EqualityAndBounds) {
  // max x + 2y, x + y = 1, 0.2 <= x <= 0.9, y <= 0.5
  LinearProgram lp(2);
  lp.objective = {1.0, 2.0};
  lp.add({1.0, 1.0}, Relation::Equal, 1.0);
  lp.lower = {0.2, 0.0};
  lp.upper = {0.9, 0.5};
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.x[0], 0.5, 1e-12);
  EXPECT_NEAR(sol.x[1], 0.5, 1e-12);
  EXPECT_NEAR(sol.objective_value, 1.5, 1e-12);
}

TEST(SimplexTest, RejectsMalformedPrograms) {
  LinearProgram lp(2);
  lp.add({1.0}, Relation::LessEq, 1.0);
  EXPECT_THROW(solve(lp), Error);
  LinearProgram bounds(1);
  bounds.lower = {1.0};
  bounds.upper = {0.0};
  EXPECT_THROW(solve(bounds), Error);
}

TEST(SimplexTest, DegenerateCyclingExampleTerminates) {
  // Beale's classic cycling example (as a maximization).
  LinearProgram lp(4);
  lp.objective = {0.75, -150.0, 0.02, -6.0};
  lp.add({0.25, -60.0, -0.04, 9.0}, Relation::LessEq, 0.0);
  lp.add({0.5, -90.0, -0.02, 3.0}, Relation::LessEq, 0.0);
  lp.add({0.0, 0.0, 1.0, 0.0}, Relation::LessEq, 1.0);
  const auto sol = solve(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 0.05, 1e-9);
}

TEST(SimplexTest, MatchesVertexEnumerationOnRandomPrograms) {
  CounterRng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t nv = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 5;
    std::vector<std::vector<double>> A(m, std::vector<double>(nv));
    std::vector<double> b(m), c(nv);
    for (auto& row : A) for (auto& v : row) v = rng.uniform() * 2.0 - 0.5;
    for (auto& v : b) v = rng.uniform() * 3.0;
    for (auto& v : c) v = rng.uniform() * 2.0 - 0.5;
    // A box keeps every instance bounded.
    for (std::size_t j = 0; j < nv; ++j) {
      std::vector<double> e(nv, 0.0);
      e[j] = 1.0;
      A.push_back(e);
      b.push_back(1.0 + rng.uniform());
    }
    LinearProgram lp(nv);
    lp.objective = c;
    for (std::size_t r = 0; r < A.size(); ++r) lp.add(A[r], Relation::LessEq, b[r]);
    const auto sol = solve(lp);
    const auto oracle = vertex_enumeration(A, b, c);
    ASSERT_TRUE(oracle.has_value());
    ASSERT_EQ(sol.status, LpStatus::Optimal);
    EXPECT_NEAR(sol.objective_value, *oracle, 1e-6) << "trial " << trial;

    // Objective recomputed from x, and feasibility of x.
    double v = 0;
    for (std::size_t j = 0; j < nv; ++j) v += c[j] * sol.x[j];
    EXPECT_NEAR(v, sol.objective_value, 1e-8);
    for (std::size_t r = 0; r < A.size(); ++r) {
      double lhs = 0;
      for (std::size_t j = 0; j < nv; ++j) lhs += A[r][j] * sol.x[j];
      EXPECT_LE(lhs, b[r] + 1e-8);
    }
    for (double x : sol.x) EXPECT_GE(x, -1e-9);
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

TEST(SimplexTest, DeterministicForIdenticalInput) {
  LinearProgram lp(3);
  lp.objective = {1.0, 1.0, 1.0};
  lp.add({1.0, 1.0, 1.0}, Relation::LessEq, 1.0);
  lp.add({1.0, 0.0, 1.0}, Relation::GreaterEq, 0.5);
  const auto a = solve(lp);
  const auto b = solve(lp);
  EXPECT_EQ(a.x, b.x);
}

}  // namespace
}  // namespace polartax::lp
