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

// Penalty and reward accounting for the per-round (true distribution) and
// end-of-horizon (empirical distribution) polarization taxes.

#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/optima.hpp"

namespace polartax {

struct PenaltyBreakdown {
  std::vector<double> per_user;
  double total = 0.0;
};

inline PenaltyBreakdown penalty_breakdown(std::span<const double> p,
                                          std::size_t n, std::size_t k,
                                          const ConstraintParams& params) {
  params.validate();
  PenaltyBreakdown out;
  out.per_user = gamma_shortfall(p, n, k, params.gamma);
  for (double& v : out.per_user) v *= params.eta;
  out.total = std::accumulate(out.per_user.begin(), out.per_user.end(), 0.0);
  return out;
}

// Per-round tax on the distributions actually played.
inline PenaltyBreakdown step_penalty(const PolicyProfile& profile,
                                     const ConstraintParams& params) {
  return penalty_breakdown(profile.flat(), profile.n(), profile.k(), params);
}

// End-of-horizon tax on observed play frequencies.
inline PenaltyBreakdown empirical_penalty(const EmpiricalProfile& p_hat,
                                          const ConstraintParams& params) {
  return penalty_breakdown(p_hat.p_hat, p_hat.n, p_hat.k, params);
}

enum class RewardBasis { Pseudo, Realized };

enum class TaxFormulation { PerRound, EndOfHorizon };

struct RewardAccounting {
  double raw_reward = 0.0;       // sum of realized rewards
  double expected_reward = 0.0;  // sum_t sum_i mu_i . pi_i^(t)
  double penalty_total = 0.0;
  double net = 0.0;
  RewardBasis basis = RewardBasis::Pseudo;
  TaxFormulation formulation = TaxFormulation::PerRound;
};

namespace detail {

inline double sum_rewards(const RunRecord& run) {
  return std::accumulate(run.rewards.begin(), run.rewards.end(), 0.0);
}

inline double sum_expected(const RunRecord& run, const MeanMatrix& means) {
  double total = 0.0;
  for (const auto& profile : run.played_profiles) {
    total += expected_reward(means, profile);
  }
  return total;
}

}  // namespace detail

// Cumulative reward minus the tax charged every round on the played
// profiles. Requires stored profiles.
inline RewardAccounting reward2(const RunRecord& run, const MeanMatrix& means,
                                const ConstraintParams& params,
                                RewardBasis basis = RewardBasis::Pseudo) {
  detail::require(run.has_profiles(), ErrorKind::MissingProfiles,
                  "per-round accounting needs the played profiles");
  RewardAccounting acc;
  acc.formulation = TaxFormulation::PerRound;
  acc.basis = basis;
  acc.raw_reward = detail::sum_rewards(run);
  acc.expected_reward = detail::sum_expected(run, means);
  for (const auto& profile : run.played_profiles) {
    acc.penalty_total += step_penalty(profile, params).total;
  }
  const double base =
      basis == RewardBasis::Pseudo ? acc.expected_reward : acc.raw_reward;
  acc.net = base - acc.penalty_total;
  return acc;
}

// Cumulative reward minus a single tax on the empirical profile. Falls back
// to realized rewards when profiles were not stored.
inline RewardAccounting reward3(const RunRecord& run, const MeanMatrix& means,
                                const ConstraintParams& params,
                                RewardBasis basis = RewardBasis::Pseudo) {
  RewardAccounting acc;
  acc.formulation = TaxFormulation::EndOfHorizon;
  acc.raw_reward = detail::sum_rewards(run);
  acc.basis = run.has_profiles() ? basis : RewardBasis::Realized;
  if (run.has_profiles()) acc.expected_reward = detail::sum_expected(run, means);
  acc.penalty_total =
      empirical_penalty(empirical_profile(run, means.k()), params).total;
  const double base = acc.basis == RewardBasis::Pseudo ? acc.expected_reward
                                                       : acc.raw_reward;
  acc.net = base - acc.penalty_total;
  return acc;
}

// Upper bound on the best achievable end-of-horizon-tax reward: T times the
// per-round penalized optimum with the tax rate scaled down to eta/T.
inline double form3_benchmark(const MeanMatrix& means,
                              const ConstraintParams& params, std::size_t T) {
  detail::require(T >= 1, ErrorKind::InvalidArgument, "horizon must be >= 1");
  ConstraintParams scaled = params;
  scaled.eta = params.eta / static_cast<double>(T);
  return static_cast<double>(T) * optimal_form2(means, scaled).objective_value;
}

// Bound on how far the per-round tax at eta/T can exceed the end-of-horizon
// tax at eta for a policy that explores every arm once up front.
inline double gap_bound(const ConstraintParams& params, std::size_t n,
                        std::size_t k, std::size_t T) {
  detail::require(T >= 2, ErrorKind::PreconditionViolated,
                  "gap bound needs T >= 2");
  const double tt = static_cast<double>(T);
  return params.eta * static_cast<double>(n) * static_cast<double>(k) *
         (params.gamma + 1.0) * std::sqrt(10.0 * std::log(tt) / tt);
}

}  // namespace polartax
