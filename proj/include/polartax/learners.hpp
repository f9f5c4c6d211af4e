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

// Step-wise UCB learners for the constrained and penalized problems.
//
// Each learner first plays arm t-1 to every user in rounds t = 1..k, then
// optimizes over its optimistic estimates:
//   n-UCB        per-(user, arm) Hoeffding indices, gamma-constrained LP;
//   Robust-UCB   one shared arm (gamma = 1), median-of-means indices over
//                aggregated rewards sum_i X_ij;
//   Penalty-UCB  per-(user, arm) indices, penalized LP without constraints.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/estimators.hpp"
#include "polartax/optima.hpp"

namespace polartax {

enum class Algorithm { NUcb, RobustUcb, PenaltyUcb };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NUcb: return "n-ucb";
    case Algorithm::RobustUcb: return "robust-ucb";
    case Algorithm::PenaltyUcb: return "penalty-ucb";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "n-ucb" || name == "nucb") return Algorithm::NUcb;
  if (name == "robust-ucb" || name == "robust") return Algorithm::RobustUcb;
  if (name == "penalty-ucb" || name == "penalty") return Algorithm::PenaltyUcb;
  return std::nullopt;
}

struct LearnerState {
  Algorithm algorithm = Algorithm::NUcb;
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t horizon = 0;
  std::size_t round = 0;  // completed rounds
  ConstraintParams params;
  double delta = 0.0;

  // NUcb / PenaltyUcb: n*k per-user stats and optimistic estimates.
  // RobustUcb: k aggregated stats, per-arm sample logs, k estimates.
  std::vector<ArmStats> stats;
  std::vector<std::vector<double>> samples;
  std::vector<double> optimistic;

  bool per_user() const { return algorithm != Algorithm::RobustUcb; }
  bool exploring() const { return round < k; }
  const ArmStats& user_stats(std::size_t i, std::size_t j) const {
    return stats[i * k + j];
  }
};

// Confidence defaults to 1/(nT) when `delta` is not given.
inline LearnerState make_learner(Algorithm algorithm, std::size_t n,
                                 std::size_t k, std::size_t horizon,
                                 const ConstraintParams& params,
                                 std::optional<double> delta = std::nullopt) {
  params.validate();
  detail::require(n >= 1 && k >= 2, ErrorKind::InvalidArgument,
                  "learner needs n >= 1 users and k >= 2 arms");
  detail::require(horizon >= 1, ErrorKind::InvalidArgument,
                  "horizon must be >= 1");
  LearnerState s;
  s.algorithm = algorithm;
  s.n = n;
  s.k = k;
  s.horizon = horizon;
  s.params = params;
  s.delta = delta.value_or(1.0 / (static_cast<double>(n) *
                                  static_cast<double>(horizon)));
  detail::require(s.delta > 0.0 && s.delta < 1.0, ErrorKind::InvalidArgument,
                  "delta must lie in (0,1)");
  if (s.per_user()) {
    s.stats.assign(n * k, ArmStats{});
    s.optimistic.assign(n * k, 0.0);
  } else {
    s.stats.assign(k, ArmStats{});
    s.samples.assign(k, {});
    s.optimistic.assign(k, 0.0);
  }
  return s;
}

namespace detail {

inline void require_algorithm(const LearnerState& s, Algorithm a) {
  require(s.algorithm == a, ErrorKind::InvalidArgument,
          std::string("learner is not ") + to_string(a));
}

}  // namespace detail

inline PolicyProfile nucb_step(const LearnerState& s) {
  detail::require_algorithm(s, Algorithm::NUcb);
  if (s.exploring()) return PolicyProfile::pure(s.n, s.k, s.round);
  return solve_form1(s.optimistic, s.n, s.k, s.params.gamma).profile;
}

inline PolicyProfile penalty_ucb_step(const LearnerState& s) {
  detail::require_algorithm(s, Algorithm::PenaltyUcb);
  if (s.exploring()) return PolicyProfile::pure(s.n, s.k, s.round);
  return solve_form2(s.optimistic, s.n, s.k, s.params.gamma, s.params.eta)
      .profile;
}

// Shared arm distribution; ties in the index go to the lowest arm.
inline std::vector<double> robust_ucb_step(const LearnerState& s) {
  detail::require_algorithm(s, Algorithm::RobustUcb);
  std::size_t arm = s.round;
  if (!s.exploring()) {
    arm = 0;
    for (std::size_t j = 1; j < s.k; ++j) {
      if (s.optimistic[j] > s.optimistic[arm]) arm = j;
    }
  }
  std::vector<double> row(s.k, 0.0);
  row[arm] = 1.0;
  return row;
}

// Profile for the next round, whatever the algorithm.
inline PolicyProfile step(const LearnerState& s) {
  switch (s.algorithm) {
    case Algorithm::NUcb: return nucb_step(s);
    case Algorithm::PenaltyUcb: return penalty_ucb_step(s);
    case Algorithm::RobustUcb: {
      const auto row = robust_ucb_step(s);
      return validate_policy_profile(Rows(s.n, row));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown algorithm");
}

// Records one round of feedback and refreshes the optimistic estimates of
// every pulled arm. Counters of other arms are left untouched.
inline void observe(LearnerState& s, std::span<const int> actions,
                    std::span<const double> rewards) {
  detail::require(actions.size() == s.n && rewards.size() == s.n,
                  ErrorKind::InvalidArgument,
                  "observe needs one action and reward per user");
  for (int a : actions) {
    detail::require(a >= 0 && static_cast<std::size_t>(a) < s.k,
                    ErrorKind::InvalidArgument, "action out of range");
  }
  if (s.per_user()) {
    for (std::size_t i = 0; i < s.n; ++i) {
      const auto j = static_cast<std::size_t>(actions[i]);
      ArmStats& st = s.stats[i * s.k + j];
      st.add(rewards[i]);
      s.optimistic[i * s.k + j] =
          st.mean() + ucb_radius(st.count, s.horizon, s.n, s.k, s.delta);
    }
  } else {
    const int arm = actions[0];
    for (int a : actions) {
      detail::require(a == arm, ErrorKind::MixedArmsForRobust,
                      "robust-ucb users must share one arm per round");
    }
    const auto j = static_cast<std::size_t>(arm);
    double total = 0.0;
    for (double r : rewards) total += r;
    s.stats[j].add(total);
    s.samples[j].push_back(total);
    s.optimistic[j] =
        median_of_means(s.samples[j], s.delta) +
        robust_radius(s.stats[j].count, s.horizon, s.n, s.k, s.delta);
  }
  ++s.round;
}

}  // namespace polartax
