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

// Exact optimal policy profiles for the naive l-infinity formulation, the
// gamma-constrained formulation and the penalized formulation, all solved
// as linear programs over the n*k profile entries. The closed forms for the
// polarized two-arm society are exposed as independent oracles.

#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/lp.hpp"

namespace polartax {

enum class Formulation { Naive, Form1, Form2 };

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Naive: return "naive";
    case Formulation::Form1: return "form1";
    case Formulation::Form2: return "form2";
  }
  return "unknown";
}

struct OptimalPolicyResult {
  PolicyProfile profile;
  // Per-round expected reward, minus the per-round penalty for Form2.
  double objective_value = 0.0;
  double reward = 0.0;   // sum_i mu_i . p_i
  double penalty = 0.0;  // eta * total shortfall (Form2 only)
  Formulation formulation = Formulation::Form1;
};

// Sum over users of mu_i . p_i.
inline double expected_reward(const MeanMatrix& means,
                              const PolicyProfile& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < means.n(); ++i) {
    for (std::size_t j = 0; j < means.k(); ++j) total += means(i, j) * p(i, j);
  }
  return total;
}

namespace detail {

inline std::size_t idx(std::size_t i, std::size_t j, std::size_t k) {
  return i * k + j;
}

// Row-stochasticity constraints on the first n*k variables.
inline void add_simplex_rows(lp::LinearProgram& prog, std::size_t n,
                             std::size_t k) {
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(prog.num_vars(), 0.0);
    for (std::size_t j = 0; j < k; ++j) row[idx(i, j, k)] = 1.0;
    prog.add(std::move(row), lp::Relation::Equal, 1.0);
  }
}

// Coefficients of p[i][j] - (scale/n) * sum_i' p[i'][j].
inline std::vector<double> deviation_row(std::size_t num_vars, std::size_t n,
                                         std::size_t k, std::size_t i,
                                         std::size_t j, double scale) {
  std::vector<double> row(num_vars, 0.0);
  const double share = scale / static_cast<double>(n);
  for (std::size_t u = 0; u < n; ++u) row[idx(u, j, k)] = -share;
  row[idx(i, j, k)] += 1.0;
  return row;
}

inline void set_reward_objective(lp::LinearProgram& prog,
                                 const std::vector<double>& mu,
                                 std::size_t n, std::size_t k) {
  for (std::size_t c = 0; c < n * k; ++c) prog.objective[c] = mu[c];
}

inline PolicyProfile profile_from_solution(const std::vector<double>& x,
                                           std::size_t n, std::size_t k) {
  Rows rows(n, std::vector<double>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) rows[i][j] = x[idx(i, j, k)];
  }
  return validate_policy_profile(rows);
}

inline std::vector<double> flat_means(const MeanMatrix& means) {
  std::vector<double> mu(means.n() * means.k());
  for (std::size_t i = 0; i < means.n(); ++i) {
    for (std::size_t j = 0; j < means.k(); ++j) mu[idx(i, j, means.k())] = means(i, j);
  }
  return mu;
}

}  // namespace detail

// The following three builders take flat n*k score vectors rather than a
// MeanMatrix so the learners can reuse them with optimistic estimates that
// exceed 1.

// Maximizes sum_i score_i . p_i subject to p[i][j] >= (gamma/n) sum_i' p[i'][j].
inline OptimalPolicyResult solve_form1(const std::vector<double>& score,
                                       std::size_t n, std::size_t k,
                                       double gamma) {
  detail::require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::InvalidArgument,
                  "gamma must lie in [0,1]");
  detail::require(score.size() == n * k, ErrorKind::InvalidArgument,
                  "score vector has wrong size");
  lp::LinearProgram prog(n * k);
  detail::set_reward_objective(prog, score, n, k);
  detail::add_simplex_rows(prog, n, k);
  if (gamma > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        prog.add(detail::deviation_row(n * k, n, k, i, j, gamma),
                 lp::Relation::GreaterEq, 0.0);
      }
    }
  }
  const auto sol = lp::solve_or_throw(prog, "gamma-constrained program");
  OptimalPolicyResult out;
  out.profile = detail::profile_from_solution(sol.x, n, k);
  out.objective_value = sol.objective_value;
  out.reward = sol.objective_value;
  out.formulation = Formulation::Form1;
  return out;
}

// Maximizes sum_i score_i . p_i - eta * sum_{i,j} s_ij with
// s_ij >= (gamma/n) sum_i' p[i'][j] - p[i][j], s_ij >= 0.
inline OptimalPolicyResult solve_form2(const std::vector<double>& score,
                                       std::size_t n, std::size_t k,
                                       double gamma, double eta) {
  detail::require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::InvalidArgument,
                  "gamma must lie in [0,1]");
  detail::require(eta >= 0.0, ErrorKind::InvalidArgument, "eta must be >= 0");
  detail::require(score.size() == n * k, ErrorKind::InvalidArgument,
                  "score vector has wrong size");
  const std::size_t nk = n * k;
  const bool penalized = gamma > 0.0 && eta > 0.0;
  lp::LinearProgram prog(penalized ? 2 * nk : nk);
  detail::set_reward_objective(prog, score, n, k);
  detail::add_simplex_rows(prog, n, k);
  if (penalized) {
    for (std::size_t c = 0; c < nk; ++c) prog.objective[nk + c] = -eta;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        // p[i][j] - (gamma/n) sum p[.][j] + s_ij >= 0
        auto row = detail::deviation_row(2 * nk, n, k, i, j, gamma);
        row[nk + detail::idx(i, j, k)] = 1.0;
        prog.add(std::move(row), lp::Relation::GreaterEq, 0.0);
      }
    }
  }
  const auto sol = lp::solve_or_throw(prog, "penalized program");
  OptimalPolicyResult out;
  out.profile = detail::profile_from_solution(sol.x, n, k);
  out.formulation = Formulation::Form2;
  out.reward = 0.0;
  for (std::size_t c = 0; c < nk; ++c) out.reward += score[c] * out.profile.flat()[c];
  const auto shortfall = gamma_shortfall(out.profile.flat(), n, k, gamma);
  out.penalty = eta * std::accumulate(shortfall.begin(), shortfall.end(), 0.0);
  out.objective_value = sol.objective_value;
  return out;
}

// l-infinity naive formulation: |p[i][j] - pbar_j| <= delta for all i,j.
inline OptimalPolicyResult optimal_naive(const MeanMatrix& means,
                                         double delta) {
  detail::require(delta >= 0.0, ErrorKind::InvalidArgument,
                  "delta must be >= 0");
  const std::size_t n = means.n();
  const std::size_t k = means.k();
  lp::LinearProgram prog(n * k);
  detail::set_reward_objective(prog, detail::flat_means(means), n, k);
  detail::add_simplex_rows(prog, n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      auto row = detail::deviation_row(n * k, n, k, i, j, 1.0);
      prog.add(row, lp::Relation::LessEq, delta);
      prog.add(std::move(row), lp::Relation::GreaterEq, -delta);
    }
  }
  const auto sol = lp::solve_or_throw(prog, "naive l-infinity program");
  OptimalPolicyResult out;
  out.profile = detail::profile_from_solution(sol.x, n, k);
  out.objective_value = sol.objective_value;
  out.reward = sol.objective_value;
  out.formulation = Formulation::Naive;
  return out;
}

inline OptimalPolicyResult optimal_form1(const MeanMatrix& means,
                                         double gamma) {
  return solve_form1(detail::flat_means(means), means.n(), means.k(), gamma);
}

inline OptimalPolicyResult optimal_form2(const MeanMatrix& means,
                                         const ConstraintParams& params) {
  params.validate();
  return solve_form2(detail::flat_means(means), means.n(), means.k(),
                     params.gamma, params.eta);
}

// Closed-form naive optimum on the polarized two-arm society: the first
// `majority` users like arm 0, the rest like arm 1. Requires
// majority >= n/2 and 0 <= delta < majority/n.
inline PolicyProfile closed_form_naive(std::size_t n, std::size_t majority,
                                       double delta) {
  detail::require(n >= 1 && majority <= n, ErrorKind::PreconditionViolated,
                  "majority size must lie in [0, n]");
  detail::require(2 * majority >= n, ErrorKind::PreconditionViolated,
                  "closed form needs |N| >= n/2");
  const double frac = static_cast<double>(majority) / static_cast<double>(n);
  detail::require(delta >= 0.0 && delta < frac,
                  ErrorKind::PreconditionViolated,
                  "closed form needs 0 <= delta < |N|/n");
  const double shift = static_cast<double>(n) * delta /
                       static_cast<double>(majority);
  Rows rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i < majority ? std::vector<double>{1.0, 0.0}
                           : std::vector<double>{1.0 - shift, shift};
  }
  return validate_policy_profile(rows);
}

// Closed-form gamma-constrained optimum on the polarized two-arm society,
// valid for gamma <= 1/2.
inline PolicyProfile closed_form_form1(std::size_t n, std::size_t majority,
                                       double gamma) {
  detail::require(n >= 1 && majority <= n, ErrorKind::PreconditionViolated,
                  "group size must lie in [0, n]");
  detail::require(gamma >= 0.0 && gamma <= 0.5,
                  ErrorKind::PreconditionViolated,
                  "closed form needs 0 <= gamma <= 1/2");
  const double nn = static_cast<double>(n);
  const double in_group = static_cast<double>(majority);
  const double cross_major = gamma * (nn - in_group) / nn;
  const double cross_minor = gamma * in_group / nn;
  Rows rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i < majority
                  ? std::vector<double>{1.0 - cross_major, cross_major}
                  : std::vector<double>{cross_minor, 1.0 - cross_minor};
  }
  return validate_policy_profile(rows);
}

}  // namespace polartax
