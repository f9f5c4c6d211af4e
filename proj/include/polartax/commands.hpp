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

// Implementations of the command-line subcommands. Each command reads
// already-opened streams and writes CSV to an output stream so that tests
// can drive it without a process boundary.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/instances.hpp"
#include "polartax/io.hpp"
#include "polartax/learners.hpp"
#include "polartax/optima.hpp"
#include "polartax/parallel.hpp"
#include "polartax/penalties.hpp"
#include "polartax/sim.hpp"

namespace polartax::cli {

// n points equally spaced on [lo, hi], endpoints included.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  detail::require(n >= 1, ErrorKind::InvalidArgument, "grid needs >= 1 point");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

struct SweepSpec {
  std::vector<double> gamma_grid;
  std::vector<double> eta_grid;
  // user row -> group label; empty means a single group.
  std::vector<std::string> group_labels;

  void validate() const {
    detail::require(!gamma_grid.empty() && !eta_grid.empty(),
                    ErrorKind::InvalidArgument, "sweep grids must be non-empty");
    detail::require(std::is_sorted(gamma_grid.begin(), gamma_grid.end()) &&
                        std::is_sorted(eta_grid.begin(), eta_grid.end()),
                    ErrorKind::InvalidArgument,
                    "sweep grids must be sorted ascending");
    detail::require(gamma_grid.front() >= 0.0 && gamma_grid.back() <= 1.0,
                    ErrorKind::InvalidArgument, "gamma grid must lie in [0,1]");
    detail::require(eta_grid.front() >= 0.0, ErrorKind::InvalidArgument,
                    "eta grid must be >= 0");
  }
};

// Group = arm with the highest mean (lowest index on ties).
inline std::vector<std::string> argmax_groups(
    const MeanMatrix& means, const std::vector<std::string>& arm_names) {
  std::vector<std::string> out(means.n());
  for (std::size_t i = 0; i < means.n(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < means.k(); ++j) {
      if (means(i, j) > means(i, best)) best = j;
    }
    out[i] = arm_names.at(best);
  }
  return out;
}

// Labels file `user_id,group`; every user in the means file needs a label.
inline std::vector<std::string> read_group_labels(
    std::istream& in, const std::vector<std::string>& user_ids) {
  const auto t = io::read_csv(in, "labels file");
  io::require_header(t, {"user_id", "group"}, "labels file");
  std::map<std::string, std::string> by_user;
  for (const auto& row : t.rows) by_user[row[0]] = row[1];
  std::vector<std::string> out;
  for (const auto& id : user_ids) {
    const auto it = by_user.find(id);
    detail::require(it != by_user.end(), ErrorKind::ParseError,
                    "labels file has no group for user " + id);
    out.push_back(it->second);
  }
  return out;
}

inline double max_row_spread(const PolicyProfile& p) {
  double spread = 0.0;
  for (std::size_t j = 0; j < p.k(); ++j) {
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) {
      lo = std::min(lo, p(i, j));
      hi = std::max(hi, p(i, j));
    }
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

struct OptimalOptions {
  Formulation formulation = Formulation::Form1;
  ConstraintParams params;
  std::optional<SweepSpec> sweep;
};

inline OptimalPolicyResult solve_formulation(const MeanMatrix& means,
                                             Formulation f,
                                             const ConstraintParams& params) {
  switch (f) {
    case Formulation::Naive: return optimal_naive(means, params.delta_naive);
    case Formulation::Form1: return optimal_form1(means, params.gamma);
    case Formulation::Form2: return optimal_form2(means, params);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown formulation");
}

// Without a sweep: the optimal profile, one row per user, with the
// objective in a metadata line. With a sweep: one row per (gamma, eta)
// point carrying per-group average probabilities.
inline void cmd_optimal(const io::MeansFile& mf, const OptimalOptions& opt,
                        std::ostream& out) {
  const MeanMatrix& means = mf.means;
  if (!opt.sweep) {
    const auto res = solve_formulation(means, opt.formulation, opt.params);
    out << "# formulation=" << to_string(opt.formulation) << '\n';
    out << "# gamma=" << io::fmt(opt.params.gamma)
        << " eta=" << io::fmt(opt.params.eta)
        << " delta_naive=" << io::fmt(opt.params.delta_naive) << '\n';
    out << "# objective=" << io::fmt(res.objective_value) << '\n';
    std::vector<std::string> header{"user_id"};
    header.insert(header.end(), mf.arm_names.begin(), mf.arm_names.end());
    io::write_row(out, header);
    for (std::size_t i = 0; i < means.n(); ++i) {
      std::vector<std::string> f{mf.user_ids.at(i)};
      for (std::size_t j = 0; j < means.k(); ++j) f.push_back(io::fmt(res.profile(i, j)));
      io::write_row(out, f);
    }
    return;
  }

  const SweepSpec& sweep = *opt.sweep;
  sweep.validate();
  std::vector<std::string> labels = sweep.group_labels;
  if (labels.empty()) labels.assign(means.n(), "all");
  detail::require(labels.size() == means.n(), ErrorKind::InvalidArgument,
                  "one group label per user required");
  const std::set<std::string> group_set(labels.begin(), labels.end());
  const std::vector<std::string> groups(group_set.begin(), group_set.end());

  struct Point {
    double gamma, eta;
  };
  std::vector<Point> points;
  const bool uses_eta = opt.formulation == Formulation::Form2;
  for (double g : sweep.gamma_grid) {
    if (uses_eta) {
      for (double e : sweep.eta_grid) points.push_back({g, e});
    } else {
      points.push_back({g, opt.params.eta});
    }
  }
  std::vector<OptimalPolicyResult> results(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    ConstraintParams params = opt.params;
    params.gamma = points[p].gamma;
    params.eta = points[p].eta;
    results[p] = solve_formulation(means, opt.formulation, params);
  });

  out << "# formulation=" << to_string(opt.formulation) << '\n';
  out << "# groups=";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out << (g ? ";" : "") << groups[g];
  }
  out << '\n';
  std::vector<std::string> header{"gamma", "eta", "objective", "reward",
                                  "penalty", "max_row_spread"};
  for (const auto& g : groups) {
    for (const auto& a : mf.arm_names) header.push_back("grp_" + g + "_" + a);
  }
  io::write_row(out, header);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto& res = results[p];
    std::vector<std::string> f{io::fmt(points[p].gamma), io::fmt(points[p].eta),
                               io::fmt(res.objective_value), io::fmt(res.reward),
                               io::fmt(res.penalty),
                               io::fmt(max_row_spread(res.profile))};
    for (const auto& g : groups) {
      for (std::size_t j = 0; j < means.k(); ++j) {
        double sum = 0.0;
        std::size_t members = 0;
        for (std::size_t i = 0; i < means.n(); ++i) {
          if (labels[i] != g) continue;
          sum += res.profile(i, j);
          ++members;
        }
        f.push_back(io::fmt(sum / static_cast<double>(members)));
      }
    }
    io::write_row(out, f);
  }
}

// "1,2,3" or "count@base" (base, base+1, ..., base+count-1).
inline std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> out;
  const auto at = spec.find('@');
  if (at != std::string::npos) {
    const auto count = io::parse_int(io::trim(spec.substr(0, at)), "seed count");
    const auto base = io::parse_int(io::trim(spec.substr(at + 1)), "seed base");
    detail::require(count >= 1 && base >= 0, ErrorKind::InvalidArgument,
                    "seed spec count@base needs count >= 1, base >= 0");
    for (long long s = 0; s < count; ++s) {
      out.push_back(static_cast<std::uint64_t>(base + s));
    }
  } else {
    for (const auto& f : io::split(spec)) {
      const auto v = io::parse_int(f, "seed");
      detail::require(v >= 0, ErrorKind::InvalidArgument, "seeds must be >= 0");
      out.push_back(static_cast<std::uint64_t>(v));
    }
  }
  detail::require(!out.empty(), ErrorKind::InvalidArgument, "no seeds given");
  return out;
}

struct SimulateOptions {
  SimConfig config;
  std::vector<std::uint64_t> seeds{0};
  // Extra "# key=value" lines, e.g. the lower-bound epsilon.
  std::vector<std::pair<std::string, std::string>> metadata;
};

inline void cmd_simulate(const MeanMatrix& means, const SimulateOptions& opt,
                         std::ostream& out) {
  const SimConfig& cfg = opt.config;
  cfg.validate();
  const Instance instance{means, RewardFamily::Bernoulli};
  const auto stats = batch(instance, cfg, opt.seeds);
  const double delta = cfg.delta.value_or(
      1.0 / (static_cast<double>(means.n()) * static_cast<double>(cfg.T)));

  out << "# algorithm=" << to_string(cfg.algorithm) << '\n';
  out << "# n=" << means.n() << " k=" << means.k() << " T=" << cfg.T
      << " seeds=" << opt.seeds.size() << '\n';
  out << "# gamma=" << io::fmt(cfg.params.gamma)
      << " eta=" << io::fmt(cfg.params.eta) << " delta=" << io::fmt(delta)
      << '\n';
  for (const auto& [key, value] : opt.metadata) {
    out << "# " << key << '=' << value << '\n';
  }
  out << "# baseline_form1_per_round=" << io::fmt(stats.baselines.form1_per_round)
      << '\n';
  out << "# baseline_form2_per_round=" << io::fmt(stats.baselines.form2_per_round)
      << '\n';
  out << "# baseline_form3_upper_bound=" << io::fmt(stats.baselines.form3_benchmark)
      << '\n';
  out << "# regret_form3_upper_mean=" << io::fmt(stats.form3_upper.mean)
      << " stderr=" << io::fmt(stats.form3_upper.stderr_of_mean()) << '\n';
  out << "# regret_form3_upper_realized_mean="
      << io::fmt(stats.form3_upper_realized.mean)
      << " stderr=" << io::fmt(stats.form3_upper_realized.stderr_of_mean())
      << '\n';
  out << "# form3 regret is measured against an upper bound on the optimum\n";
  out << "# exploration_rounds=" << std::min(cfg.T, means.k())
      << " (play e_t for t <= k, gamma constraint not enforced)\n";
  if (cfg.T < means.k()) out << "# exploration_only=true\n";
  io::write_row(out, {"t", "regret1_mean", "regret1_stderr",
                      "regret1_realized_mean", "regret1_realized_stderr",
                      "regret2_mean", "regret2_stderr", "regret2_realized_mean",
                      "regret2_realized_stderr"});
  for (std::size_t t = 0; t < cfg.T; ++t) {
    io::write_row(out, {std::to_string(t + 1), io::fmt(stats.form1.mean(t)),
                        io::fmt(stats.form1.stderr_at(t)),
                        io::fmt(stats.form1_realized.mean(t)),
                        io::fmt(stats.form1_realized.stderr_at(t)),
                        io::fmt(stats.form2.mean(t)),
                        io::fmt(stats.form2.stderr_at(t)),
                        io::fmt(stats.form2_realized.mean(t)),
                        io::fmt(stats.form2_realized.stderr_at(t))});
  }
}

struct AuditResult {
  EmpiricalProfile p_hat;
  PenaltyBreakdown penalty;
};

// Reads a `t,user,arm` log that must cover every (t, user) pair exactly once.
inline EmpiricalProfile read_audit_log(std::istream& in, std::size_t n,
                                       std::size_t k, std::size_t T) {
  detail::require(n >= 1 && k >= 1 && T >= 1, ErrorKind::InvalidArgument,
                  "audit needs n, k, T >= 1");
  const auto t = io::read_csv(in, "audit log");
  io::require_header(t, {"t", "user", "arm"}, "audit log");
  std::vector<int> actions(T * n, -1);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto where = "audit log line " + std::to_string(t.line_numbers[r]);
    const auto round = io::parse_int(t.rows[r][0], where);
    const auto user = io::parse_int(t.rows[r][1], where);
    const auto arm = io::parse_int(t.rows[r][2], where);
    detail::require(round >= 0 && static_cast<std::size_t>(round) < T &&
                        user >= 0 && static_cast<std::size_t>(user) < n &&
                        arm >= 0 && static_cast<std::size_t>(arm) < k,
                    ErrorKind::ParseError, where + ": index out of range");
    int& cell = actions[static_cast<std::size_t>(round) * n +
                        static_cast<std::size_t>(user)];
    detail::require(cell == -1, ErrorKind::DuplicateCell,
                    where + ": duplicate entry for t=" + std::to_string(round) +
                        " user=" + std::to_string(user));
    cell = static_cast<int>(arm);
  }
  for (std::size_t c = 0; c < actions.size(); ++c) {
    detail::require(actions[c] != -1, ErrorKind::MissingCell,
                    "no entry for t=" + std::to_string(c / n) +
                        " user=" + std::to_string(c % n));
  }
  return empirical_profile(T, n, k, actions);
}

inline AuditResult audit(std::istream& log, std::size_t n, std::size_t k,
                         std::size_t T, const ConstraintParams& params) {
  AuditResult res;
  res.p_hat = read_audit_log(log, n, k, T);
  res.penalty = empirical_penalty(res.p_hat, params);
  return res;
}

inline void cmd_audit(std::istream& log, std::size_t n, std::size_t k,
                      std::size_t T, const ConstraintParams& params,
                      std::ostream& out) {
  const auto res = audit(log, n, k, T, params);
  out << "# gamma=" << io::fmt(params.gamma) << " eta=" << io::fmt(params.eta)
      << " T=" << T << '\n';
  std::vector<std::string> header{"user"};
  for (std::size_t j = 0; j < k; ++j) header.push_back("p_" + std::to_string(j));
  header.push_back("penalty");
  io::write_row(out, header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> f{std::to_string(i)};
    for (std::size_t j = 0; j < k; ++j) f.push_back(io::fmt(res.p_hat(i, j)));
    f.push_back(io::fmt(res.penalty.per_user[i]));
    io::write_row(out, f);
  }
  std::vector<std::string> total{"total"};
  for (std::size_t j = 0; j < k; ++j) total.emplace_back();
  total.push_back(io::fmt(res.penalty.total));
  io::write_row(out, total);
}

struct IngestOptions {
  std::vector<long long> users;  // explicit list; wins over sampling
  std::size_t sample_count = 58;
  std::uint64_t sample_seed = 0;
  std::vector<std::string> genres;  // restrict arms; empty = all genres
};

inline IngestResult ingest(std::istream& ratings, std::istream& genres,
                           const IngestOptions& opt) {
  auto ds = make_dataset(read_ratings(ratings), read_genres(genres), opt.genres);
  detail::require(!ds.ratings.empty(), ErrorKind::EmptyDataset,
                  "ratings file has no ratings");
  auto users = opt.users.empty()
                   ? sample_users(ds, opt.sample_count, opt.sample_seed)
                   : opt.users;
  return ingest_ratings(ds, std::move(users));
}

inline void cmd_ingest(std::istream& ratings, std::istream& genres,
                       const IngestOptions& opt, std::ostream& out) {
  const auto res = ingest(ratings, genres, opt);
  out << "# unrated_cells=" << res.unrated.size()
      << " (mean set to 0 for genres a user never rated)\n";
  std::vector<std::string> ids;
  for (long long id : res.user_ids) ids.push_back(std::to_string(id));
  io::write_means(out, res.means, res.genres, ids);
}

struct UtilityPoint {
  double gamma = 0.0;
  double eta = 0.0;
  double utility = 0.0;   // sum_i mu_i . p_i at the penalized optimum
  double baseline = 0.0;  // same at eta = 0
  double ratio = 1.0;
  double additive_loss = 0.0;  // per-user average utility lost
  double penalty = 0.0;
};

inline std::vector<UtilityPoint> utility_sweep(const MeanMatrix& means,
                                               const SweepSpec& sweep) {
  sweep.validate();
  const double baseline = optimal_form1(means, 0.0).reward;
  detail::require(baseline > 0.0, ErrorKind::InvalidArgument,
                  "utility ratio undefined when the unconstrained optimum is 0");
  std::vector<UtilityPoint> points;
  for (double g : sweep.gamma_grid) {
    for (double e : sweep.eta_grid) points.push_back({g, e});
  }
  parallel_for(points.size(), [&](std::size_t p) {
    auto& pt = points[p];
    const auto res = optimal_form2(means, {pt.gamma, pt.eta, 0.0});
    pt.utility = expected_reward(means, res.profile);
    pt.baseline = baseline;
    pt.ratio = pt.utility / baseline;
    pt.additive_loss =
        (baseline - pt.utility) / static_cast<double>(means.n());
    pt.penalty = res.penalty;
  });
  return points;
}

inline void cmd_utility(const MeanMatrix& means, const SweepSpec& sweep,
                        std::ostream& out) {
  const auto points = utility_sweep(means, sweep);
  io::write_row(out, {"gamma", "eta", "utility", "baseline_utility", "ratio",
                      "additive_loss", "penalty"});
  for (const auto& p : points) {
    io::write_row(out, {io::fmt(p.gamma), io::fmt(p.eta), io::fmt(p.utility),
                        io::fmt(p.baseline), io::fmt(p.ratio),
                        io::fmt(p.additive_loss), io::fmt(p.penalty)});
  }
}

struct LowerBoundOptions {
  bool k_arm = false;
  std::vector<int> bits;  // two-arm instance
  std::size_t n = 1;      // k-arm instance
  std::size_t k = 2;
  std::optional<std::size_t> special_arm;
  std::size_t T = 1;
};

struct LowerBoundInstance {
  MeanMatrix means;
  double epsilon = 0.0;
};

inline LowerBoundInstance make_lower_bound(const LowerBoundOptions& opt) {
  if (opt.k_arm) {
    return {lower_bound_instance_karm(opt.n, opt.k, opt.T, opt.special_arm),
            lower_bound_epsilon_karm(opt.n, opt.k, opt.T)};
  }
  const auto spec = make_lower_bound_spec(opt.bits, opt.T);
  return {lower_bound_instance_2arm(spec), spec.epsilon};
}

inline std::vector<int> parse_bits(const std::string& s) {
  std::vector<int> bits;
  for (char c : s) {
    if (c == ',' || c == ' ') continue;
    detail::require(c == '0' || c == '1', ErrorKind::InvalidArgument,
                    "bits must be a string of 0/1");
    bits.push_back(c - '0');
  }
  return bits;
}

inline void cmd_lowerbound(const LowerBoundOptions& opt, std::ostream& out) {
  const auto lb = make_lower_bound(opt);
  out << "# epsilon=" << io::fmt(lb.epsilon) << " T=" << opt.T << '\n';
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < lb.means.n(); ++i) ids.push_back(std::to_string(i));
  io::write_means(out, lb.means, io::default_arm_names(lb.means.k()), ids);
}

// Exit codes: 2 usage, 3 data, 4 numerical.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::PreconditionViolated:
      return 2;
    case ErrorKind::Infeasible:
    case ErrorKind::Unbounded:
    case ErrorKind::NumericalFailure:
      return 4;
    default:
      return 3;
  }
}

}  // namespace polartax::cli
