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

// The interaction loop binding a learner to an instance, regret accounting
// under the three formulations, and seed-replicated batches.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/learners.hpp"
#include "polartax/optima.hpp"
#include "polartax/parallel.hpp"
#include "polartax/penalties.hpp"

namespace polartax {

struct SimConfig {
  std::size_t T = 1;
  std::uint64_t seed = 0;
  ConstraintParams params;
  std::optional<double> delta;  // defaults to 1/(nT)
  Algorithm algorithm = Algorithm::NUcb;
  bool store_profiles = true;

  void validate() const {
    detail::require(T >= 1, ErrorKind::InvalidArgument, "horizon must be >= 1");
    params.validate();
    if (algorithm == Algorithm::RobustUcb) {
      detail::require(params.gamma == 1.0, ErrorKind::InvalidArgument,
                      "robust-ucb shows every user the same distribution and "
                      "requires gamma = 1");
    }
  }
};

// Each user draws arms from stream 2i and rewards from stream 2i+1 of the
// run seed, so adding users does not perturb existing users' draws.
inline RunRecord run(const Instance& instance, const SimConfig& config) {
  config.validate();
  const std::size_t n = instance.means.n();
  const std::size_t k = instance.means.k();
  LearnerState learner = make_learner(config.algorithm, n, k, config.T,
                                      config.params, config.delta);

  RunRecord rec;
  rec.T = config.T;
  rec.n = n;
  rec.k = k;
  rec.seed = config.seed;
  rec.actions.resize(config.T * n);
  rec.rewards.resize(config.T * n);
  rec.profiles_stored = config.store_profiles;
  rec.exploration_rounds = std::min(config.T, k);
  if (config.store_profiles) rec.played_profiles.reserve(config.T);

  const CounterRng base(config.seed);
  std::vector<CounterRng> arm_rng;
  std::vector<CounterRng> reward_rng;
  for (std::size_t i = 0; i < n; ++i) {
    arm_rng.push_back(base.split(2 * i));
    reward_rng.push_back(base.split(2 * i + 1));
  }

  for (std::size_t t = 0; t < config.T; ++t) {
    PolicyProfile profile;
    try {
      profile = step(learner);
    } catch (const Error& e) {
      throw Error(e.kind(), "round " + std::to_string(t + 1) + ": " + e.what());
    }
    int* actions = rec.actions.data() + t * n;
    double* rewards = rec.rewards.data() + t * n;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t arm = sample_index(profile.row(i), arm_rng[i]);
      actions[i] = static_cast<int>(arm);
      rewards[i] = instance.sample(i, arm, reward_rng[i]);
    }
    observe(learner, std::span<const int>(actions, n),
            std::span<const double>(rewards, n));
    if (config.store_profiles) rec.played_profiles.push_back(std::move(profile));
  }
  return rec;
}

struct Baselines {
  double form1_per_round = 0.0;  // optimal gamma-constrained reward
  double form2_per_round = 0.0;  // optimal reward minus per-round tax
  double form3_benchmark = 0.0;  // upper bound on the end-of-horizon optimum
};

inline Baselines compute_baselines(const MeanMatrix& means,
                                   const ConstraintParams& params,
                                   std::size_t T) {
  Baselines b;
  b.form1_per_round = optimal_form1(means, params.gamma).objective_value;
  b.form2_per_round = optimal_form2(means, params).objective_value;
  b.form3_benchmark = form3_benchmark(means, params, T);
  return b;
}

struct RegretReport {
  // Cumulative regret after each round; pseudo trajectories use
  // mu . profile, realized ones the sampled rewards.
  std::vector<double> regret_form1;
  std::vector<double> regret_form1_realized;
  std::vector<double> regret_form2;
  std::vector<double> regret_form2_realized;
  // End of horizon, against the form3 benchmark (an upper bound on regret).
  double regret_form3_upper = 0.0;
  double regret_form3_upper_realized = 0.0;
  Baselines baselines;
  RewardAccounting form1;
  RewardAccounting form2;
  RewardAccounting form3;
};

inline RegretReport evaluate(const RunRecord& run, const Instance& instance,
                             const SimConfig& config,
                             const Baselines& baselines) {
  detail::require(run.has_profiles(), ErrorKind::MissingProfiles,
                  "regret accounting needs the played profiles");
  const MeanMatrix& means = instance.means;
  RegretReport rep;
  rep.baselines = baselines;
  rep.regret_form1.resize(run.T);
  rep.regret_form1_realized.resize(run.T);
  rep.regret_form2.resize(run.T);
  rep.regret_form2_realized.resize(run.T);

  double r1 = 0.0, r1r = 0.0, r2 = 0.0, r2r = 0.0;
  for (std::size_t t = 0; t < run.T; ++t) {
    const auto& profile = run.played_profiles[t];
    const double pseudo = expected_reward(means, profile);
    double realized = 0.0;
    for (std::size_t i = 0; i < run.n; ++i) realized += run.reward(t, i);
    const double tax = step_penalty(profile, config.params).total;
    r1 += baselines.form1_per_round - pseudo;
    r1r += baselines.form1_per_round - realized;
    r2 += baselines.form2_per_round - (pseudo - tax);
    r2r += baselines.form2_per_round - (realized - tax);
    rep.regret_form1[t] = r1;
    rep.regret_form1_realized[t] = r1r;
    rep.regret_form2[t] = r2;
    rep.regret_form2_realized[t] = r2r;
  }

  ConstraintParams untaxed = config.params;
  untaxed.eta = 0.0;
  rep.form1 = reward2(run, means, untaxed);
  rep.form2 = reward2(run, means, config.params);
  rep.form3 = reward3(run, means, config.params);
  rep.regret_form3_upper = baselines.form3_benchmark - rep.form3.net;
  rep.regret_form3_upper_realized =
      baselines.form3_benchmark -
      (rep.form3.raw_reward - rep.form3.penalty_total);
  return rep;
}

inline RegretReport evaluate(const RunRecord& run, const Instance& instance,
                             const SimConfig& config) {
  return evaluate(run, instance, config,
                  compute_baselines(instance.means, config.params, run.T));
}

// Mergeable mean/variance accumulator (Welford, Chan et al. merge).
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) *
                     static_cast<double>(o.count) / total;
    count += o.count;
  }
  double stderr_of_mean() const {
    if (count < 2) return 0.0;
    const double var = m2 / static_cast<double>(count - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
  }
};

struct TrajectoryStats {
  std::vector<RunningStats> points;

  void add(const std::vector<double>& traj) {
    if (points.empty()) points.resize(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) points[t].add(traj[t]);
  }
  void merge(const TrajectoryStats& o) {
    if (points.empty()) points.resize(o.points.size());
    for (std::size_t t = 0; t < o.points.size(); ++t) points[t].merge(o.points[t]);
  }
  double mean(std::size_t t) const { return points[t].mean; }
  double stderr_at(std::size_t t) const { return points[t].stderr_of_mean(); }
  double final_mean() const { return points.back().mean; }
};

struct BatchStats {
  std::size_t runs = 0;
  Baselines baselines;
  TrajectoryStats form1;
  TrajectoryStats form1_realized;
  TrajectoryStats form2;
  TrajectoryStats form2_realized;
  RunningStats form3_upper;
  RunningStats form3_upper_realized;

  void add(const RegretReport& r) {
    ++runs;
    form1.add(r.regret_form1);
    form1_realized.add(r.regret_form1_realized);
    form2.add(r.regret_form2);
    form2_realized.add(r.regret_form2_realized);
    form3_upper.add(r.regret_form3_upper);
    form3_upper_realized.add(r.regret_form3_upper_realized);
  }
  void merge(const BatchStats& o) {
    runs += o.runs;
    form1.merge(o.form1);
    form1_realized.merge(o.form1_realized);
    form2.merge(o.form2);
    form2_realized.merge(o.form2_realized);
    form3_upper.merge(o.form3_upper);
    form3_upper_realized.merge(o.form3_upper_realized);
  }
};

// Runs one simulation per seed (in parallel) and aggregates in seed order.
inline BatchStats batch(const Instance& instance, const SimConfig& config,
                        const std::vector<std::uint64_t>& seeds) {
  detail::require(!seeds.empty(), ErrorKind::InvalidArgument,
                  "batch needs at least one seed");
  config.validate();
  detail::require(config.store_profiles, ErrorKind::MissingProfiles,
                  "batch accounting needs stored profiles");
  const Baselines baselines =
      compute_baselines(instance.means, config.params, config.T);
  std::vector<RegretReport> reports(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    SimConfig c = config;
    c.seed = seeds[s];
    try {
      reports[s] = evaluate(run(instance, c), instance, c, baselines);
    } catch (const Error& e) {
      throw Error(e.kind(), "seed " + std::to_string(seeds[s]) + ": " + e.what());
    }
  });
  BatchStats out;
  out.baselines = baselines;
  for (const auto& r : reports) out.add(r);
  return out;
}

}  // namespace polartax
