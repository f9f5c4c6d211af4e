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

// Shared domain types for the polarization-constrained bandit library:
// mean matrices, policy profiles, run records and the counter-based RNG
// every simulation draws from.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polartax {

inline constexpr double kConstructionTol = 1e-9;
inline constexpr double kUpperClampTol = 1e-12;

enum class ErrorKind {
  InvalidArgument,
  NonStochasticRow,
  NegativeEntry,
  EmptyRun,
  Infeasible,
  Unbounded,
  NumericalFailure,
  PreconditionViolated,
  MissingProfiles,
  ZeroCount,
  EmptySequence,
  MixedArmsForRobust,
  UnknownItem,
  EmptyDataset,
  HorizonTooSmall,
  MissingCell,
  DuplicateCell,
  ParseError,
  IoError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonStochasticRow: return "NonStochasticRow";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::EmptyRun: return "EmptyRun";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::MissingProfiles: return "MissingProfiles";
    case ErrorKind::ZeroCount: return "ZeroCount";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::MixedArmsForRobust: return "MixedArmsForRobust";
    case ErrorKind::UnknownItem: return "UnknownItem";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::HorizonTooSmall: return "HorizonTooSmall";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::DuplicateCell: return "DuplicateCell";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

// All library failures are reported through this exception; `kind()` lets
// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

using Rows = std::vector<std::vector<double>>;

namespace detail {

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

inline std::vector<double> flatten(const Rows& rows, std::size_t& n,
                                   std::size_t& k) {
  n = rows.size();
  k = n == 0 ? 0 : rows.front().size();
  std::vector<double> out;
  out.reserve(n * k);
  for (const auto& row : rows) {
    require(row.size() == k, ErrorKind::InvalidArgument,
            "matrix rows have different lengths");
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace detail

// n x k matrix of expected rewards mu[i][j] in [0,1].
class MeanMatrix {
 public:
  MeanMatrix() = default;

  static MeanMatrix from_rows(const Rows& rows) {
    MeanMatrix m;
    m.values_ = detail::flatten(rows, m.n_, m.k_);
    detail::require(m.n_ >= 1, ErrorKind::InvalidArgument,
                    "mean matrix needs at least one user");
    detail::require(m.k_ >= 2, ErrorKind::InvalidArgument,
                    "mean matrix needs at least two arms");
    for (double v : m.values_) {
      detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                      ErrorKind::InvalidArgument,
                      "mean entries must lie in [0,1]");
    }
    return m;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * k_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * k_, k_};
  }
  Rows rows() const {
    Rows out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i].assign(row(i).begin(), row(i).end());
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> values_;
};

// n row-stochastic distributions over k arms.
class PolicyProfile {
 public:
  PolicyProfile() = default;

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  double operator()(std::size_t i, std::size_t j) const {
    return p_[i * k_ + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {p_.data() + i * k_, k_};
  }
  Rows rows() const {
    Rows out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i].assign(row(i).begin(), row(i).end());
    }
    return out;
  }

  std::span<const double> flat() const { return p_; }

  // Population-average distribution (column means).
  std::vector<double> column_means() const {
    std::vector<double> avg(k_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < k_; ++j) avg[j] += p_[i * k_ + j];
    }
    for (double& v : avg) v /= static_cast<double>(n_);
    return avg;
  }

  // Every user plays `arm` with probability one.
  static PolicyProfile pure(std::size_t n, std::size_t k, std::size_t arm) {
    PolicyProfile p;
    p.n_ = n;
    p.k_ = k;
    p.p_.assign(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) p.p_[i * k + arm] = 1.0;
    return p;
  }

  friend PolicyProfile validate_policy_profile(const Rows& raw);

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> p_;
};

// Rejects entries below -1e-9 and rows whose sum is off by more than 1e-9;
// clamps the rest to [0,1] and renormalizes each row.
inline PolicyProfile validate_policy_profile(const Rows& raw) {
  PolicyProfile out;
  out.p_ = detail::flatten(raw, out.n_, out.k_);
  detail::require(out.n_ >= 1 && out.k_ >= 1, ErrorKind::InvalidArgument,
                  "policy profile must be non-empty");
  for (std::size_t i = 0; i < out.n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < out.k_; ++j) {
      double& v = out.p_[i * out.k_ + j];
      detail::require(std::isfinite(v), ErrorKind::InvalidArgument,
                      "non-finite probability in row " + std::to_string(i));
      detail::require(v >= -kConstructionTol, ErrorKind::NegativeEntry,
                      "row " + std::to_string(i) + " has a negative entry");
      v = std::min(std::max(v, 0.0), 1.0 + kUpperClampTol);
      sum += v;
    }
    detail::require(std::abs(sum - 1.0) <= kConstructionTol,
                    ErrorKind::NonStochasticRow,
                    "row " + std::to_string(i) + " sums to " +
                        std::to_string(sum));
    for (std::size_t j = 0; j < out.k_; ++j) {
      double& v = out.p_[i * out.k_ + j];
      v = std::min(v / sum, 1.0);
    }
  }
  return out;
}

// Per-user shortfall below the gamma-scaled population average:
//   sum_j max{ gamma * pbar_j - p[i][j], 0 }.
// Both penalty formulations share this arithmetic; they differ only in
// which matrix (true or empirical distributions) is passed in.
inline std::vector<double> gamma_shortfall(std::span<const double> p,
                                           std::size_t n, std::size_t k,
                                           double gamma) {
  std::vector<double> avg(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) avg[j] += p[i * k + j];
  }
  for (double& v : avg) v = gamma * v / static_cast<double>(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      out[i] += std::max(avg[j] - p[i * k + j], 0.0);
    }
  }
  return out;
}

struct ConstraintParams {
  double gamma = 0.0;
  double eta = 0.0;
  double delta_naive = 0.0;

  void validate() const {
    detail::require(gamma >= 0.0 && gamma <= 1.0, ErrorKind::InvalidArgument,
                    "gamma must lie in [0,1]");
    detail::require(eta >= 0.0 && std::isfinite(eta),
                    ErrorKind::InvalidArgument, "eta must be >= 0");
    detail::require(delta_naive >= 0.0, ErrorKind::InvalidArgument,
                    "delta_naive must be >= 0");
  }
};

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so streams can be split off without shared state.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    return mix(key_ + (counter_++) * 0xd1b54a32d192ed03ULL);
  }

  // Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  CounterRng split(std::uint64_t stream) const {
    return CounterRng(seed_, stream);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Draws an index from a probability row by inversion.
inline std::size_t sample_index(std::span<const double> probs,
                                CounterRng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    last_positive = j;
    cum += probs[j];
    if (u < cum) return j;
  }
  return last_positive;
}

enum class RewardFamily { Bernoulli };

// Bernoulli reward distributions parameterized by a mean matrix.
struct Instance {
  MeanMatrix means;
  RewardFamily family = RewardFamily::Bernoulli;

  double sample(std::size_t user, std::size_t arm, CounterRng& rng) const {
    return rng.uniform() < means(user, arm) ? 1.0 : 0.0;
  }
};

// Full history of one simulated interaction.
struct RunRecord {
  std::size_t T = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<int> actions;      // T*n, row-major by round
  std::vector<double> rewards;   // T*n
  std::vector<PolicyProfile> played_profiles;  // empty when not stored
  bool profiles_stored = false;
  // Exploration rounds play e_t regardless of the gamma constraint.
  std::size_t exploration_rounds = 0;

  int action(std::size_t t, std::size_t i) const { return actions[t * n + i]; }
  double reward(std::size_t t, std::size_t i) const {
    return rewards[t * n + i];
  }
  bool has_profiles() const {
    return profiles_stored && played_profiles.size() == T;
  }
};

struct EmpiricalProfile {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t T = 0;
  std::vector<double> p_hat;  // n*k

  double operator()(std::size_t i, std::size_t j) const {
    return p_hat[i * k + j];
  }
};

// Per-user empirical arm frequencies, as an auditor would reconstruct them.
inline EmpiricalProfile empirical_profile(std::size_t T, std::size_t n,
                                          std::size_t k,
                                          std::span<const int> actions) {
  detail::require(T >= 1, ErrorKind::EmptyRun, "run has no rounds");
  detail::require(actions.size() == T * n, ErrorKind::InvalidArgument,
                  "action matrix shape mismatch");
  EmpiricalProfile out{n, k, T, std::vector<double>(n * k, 0.0)};
  std::vector<std::size_t> counts(n * k, 0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const int a = actions[t * n + i];
      detail::require(a >= 0 && static_cast<std::size_t>(a) < k,
                      ErrorKind::InvalidArgument, "action index out of range");
      ++counts[i * k + static_cast<std::size_t>(a)];
    }
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out.p_hat[c] = static_cast<double>(counts[c]) / static_cast<double>(T);
  }
  return out;
}

inline EmpiricalProfile empirical_profile(const RunRecord& run,
                                          std::size_t k) {
  return empirical_profile(run.T, run.n, k, run.actions);
}

}  // namespace polartax
