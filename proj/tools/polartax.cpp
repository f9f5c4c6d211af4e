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

// polartax command-line entry point.
//
//   polartax optimal    --means M.csv --formulation form1 --gamma 0.5
//   polartax simulate   --means M.csv --algorithm n-ucb -T 2000 --seeds 20@0
//   polartax audit      --log log.csv --users 4 --arms 2 -T 100 --gamma 1 --eta 1
//   polartax ingest     --ratings ratings.csv --genres movies.csv
//   polartax utility    --means M.csv
//   polartax lowerbound --bits 0110 -T 1000

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polartax/commands.hpp"

namespace {

using polartax::Error;
using polartax::ErrorKind;
namespace cli = polartax::cli;
namespace io = polartax::io;

std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + what + " '" + path + "'");
  return in;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_grid(const std::string& list, std::size_t steps,
                               double lo, double hi) {
  if (list.empty()) return cli::linspace(lo, hi, steps);
  std::vector<double> grid;
  for (const auto& f : io::split(list)) grid.push_back(io::parse_double(f, "grid"));
  return grid;
}

polartax::Formulation parse_formulation(const std::string& s) {
  if (s == "naive") return polartax::Formulation::Naive;
  if (s == "form1" || s == "cap") return polartax::Formulation::Form1;
  if (s == "form2" || s == "tax") return polartax::Formulation::Form2;
  throw Error(ErrorKind::InvalidArgument, "unknown formulation '" + s + "'");
}

std::vector<long long> parse_id_list(const std::string& s) {
  std::vector<long long> ids;
  if (s.empty()) return ids;
  for (const auto& f : io::split(s)) ids.push_back(io::parse_int(f, "user id"));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polarization-constrained recommendation bandits"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "csv";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "Output file (default stdout)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv"}));
  };

  // optimal
  std::string means_path, formulation = "form1", labels_path, group_by;
  double gamma = 0.0, eta = 0.0, delta_naive = 0.0;
  bool sweep = false;
  std::string gamma_grid, eta_grid;
  std::size_t gamma_steps = 0, eta_steps = 50;
  double eta_max = 1.0;
  auto* optimal = app.add_subcommand("optimal", "Exact optimal policy or a gamma/eta sweep");
  optimal->add_option("--means", means_path, "Means CSV")->required();
  optimal->add_option("--formulation", formulation, "naive | form1 | form2");
  optimal->add_option("--gamma", gamma, "Personalization constraint gamma");
  optimal->add_option("--eta", eta, "Penalty weight eta");
  optimal->add_option("--delta-naive", delta_naive, "l-infinity radius for the naive formulation");
  optimal->add_flag("--sweep", sweep, "Sweep gamma (and eta for form2)");
  optimal->add_option("--gamma-grid", gamma_grid, "Comma-separated gamma values");
  optimal->add_option("--gamma-steps", gamma_steps, "Equally spaced gamma points on [0,1]");
  optimal->add_option("--eta-grid", eta_grid, "Comma-separated eta values");
  optimal->add_option("--eta-steps", eta_steps, "Equally spaced eta points on [0,eta-max]");
  optimal->add_option("--eta-max", eta_max, "Upper end of the eta grid");
  optimal->add_option("--labels", labels_path, "Group labels CSV (user_id,group)");
  optimal->add_option("--group-by", group_by, "'argmax' groups users by preferred arm");
  add_common(optimal);

  // simulate
  std::string algorithm = "n-ucb", seeds_spec = "0", lowerbound_kind, bits;
  std::size_t horizon = 1000, lb_users = 1, lb_arms = 2;
  std::optional<double> delta;
  std::optional<std::size_t> special_arm;
  auto* simulate = app.add_subcommand("simulate", "Run a learner and report regret trajectories");
  simulate->add_option("--means", means_path, "Means CSV");
  simulate->add_option("--algorithm", algorithm, "n-ucb | robust-ucb | penalty-ucb");
  simulate->add_option("-T,--horizon", horizon, "Horizon T")->required();
  simulate->add_option("--seeds", seeds_spec, "Comma list or count@base");
  simulate->add_option("--gamma", gamma, "Personalization constraint gamma");
  simulate->add_option("--eta", eta, "Penalty weight eta");
  simulate->add_option("--delta", delta, "Confidence parameter (default 1/(nT))");
  simulate->add_option("--lowerbound", lowerbound_kind, "Use a worst-case instance: 2arm | karm")
      ->check(CLI::IsMember({"2arm", "karm"}));
  simulate->add_option("--bits", bits, "Preference bits for the 2arm instance");
  simulate->add_option("--users", lb_users, "Users for the karm instance");
  simulate->add_option("--arms", lb_arms, "Arms for the karm instance");
  simulate->add_option("--special", special_arm, "Raised arm for the karm instance");
  add_common(simulate);

  // audit
  std::string log_path;
  std::size_t audit_users = 0, audit_arms = 0;
  auto* audit = app.add_subcommand("audit", "End-of-horizon penalty from an exposure log");
  audit->add_option("--log", log_path, "Log CSV (t,user,arm)")->required();
  audit->add_option("-n,--users", audit_users, "User count")->required();
  audit->add_option("-k,--arms", audit_arms, "Arm count")->required();
  audit->add_option("-T,--horizon", horizon, "Horizon T")->required();
  audit->add_option("--gamma", gamma, "Personalization constraint gamma")->required();
  audit->add_option("--eta", eta, "Penalty weight eta")->required();
  add_common(audit);

  // ingest
  std::string ratings_path, genres_path, users_list, genre_list;
  std::size_t sample_count = 58;
  std::uint64_t sample_seed = 0;
  auto* ingest = app.add_subcommand("ingest", "Per-genre user preferences from ratings");
  ingest->add_option("--ratings", ratings_path, "Ratings CSV")->required();
  ingest->add_option("--genres", genres_path, "Genre CSV (item_id,genres)")->required();
  ingest->add_option("--user-ids", users_list, "Comma-separated user ids");
  ingest->add_option("--sample", sample_count, "Number of users to sample");
  ingest->add_option("--sample-seed", sample_seed, "Seed for user sampling");
  ingest->add_option("--only-genres", genre_list, "Comma-separated genres to keep");
  add_common(ingest);

  // utility
  auto* utility = app.add_subcommand("utility", "Utility ratio and loss over a gamma x eta grid");
  utility->add_option("--means", means_path, "Means CSV")->required();
  utility->add_option("--gamma-grid", gamma_grid, "Comma-separated gamma values");
  utility->add_option("--gamma-steps", gamma_steps, "Equally spaced gamma points on [0,1]");
  utility->add_option("--eta-grid", eta_grid, "Comma-separated eta values");
  utility->add_option("--eta-steps", eta_steps, "Equally spaced eta points on [0,eta-max]");
  utility->add_option("--eta-max", eta_max, "Upper end of the eta grid");
  add_common(utility);

  // lowerbound
  auto* lowerbound = app.add_subcommand("lowerbound", "Emit a worst-case instance");
  lowerbound->add_option("--bits", bits, "Preference bits (2-arm instance)");
  lowerbound->add_option("--users", lb_users, "Users (k-arm instance)");
  lowerbound->add_option("--arms", lb_arms, "Arms (k-arm instance)");
  lowerbound->add_option("--special", special_arm, "Raised arm (k-arm instance)");
  lowerbound->add_option("-T,--horizon", horizon, "Horizon T")->required();
  add_common(lowerbound);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Output out(out_path);
    auto lower_bound_options = [&] {
      cli::LowerBoundOptions lb;
      lb.T = horizon;
      lb.k_arm = bits.empty();
      lb.bits = cli::parse_bits(bits);
      lb.n = lb_users;
      lb.k = lb_arms;
      lb.special_arm = special_arm;
      return lb;
    };

    if (optimal->parsed()) {
      auto in = open_input(means_path, "means file");
      const auto mf = io::read_means(in);
      cli::OptimalOptions opt;
      opt.formulation = parse_formulation(formulation);
      opt.params = {gamma, eta, delta_naive};
      if (sweep) {
        cli::SweepSpec spec;
        const std::size_t default_gammas =
            opt.formulation == polartax::Formulation::Form2 ? 6 : 50;
        spec.gamma_grid = parse_grid(gamma_grid, gamma_steps ? gamma_steps : default_gammas, 0.0, 1.0);
        spec.eta_grid = parse_grid(eta_grid, eta_steps, 0.0, eta_max);
        if (!labels_path.empty()) {
          auto lin = open_input(labels_path, "labels file");
          spec.group_labels = cli::read_group_labels(lin, mf.user_ids);
        } else if (group_by == "argmax") {
          spec.group_labels = cli::argmax_groups(mf.means, mf.arm_names);
        } else if (!group_by.empty()) {
          throw Error(ErrorKind::InvalidArgument, "--group-by supports only 'argmax'");
        }
        opt.sweep = std::move(spec);
      }
      cli::cmd_optimal(mf, opt, out.stream());
    } else if (simulate->parsed()) {
      cli::SimulateOptions opt;
      const auto alg = polartax::parse_algorithm(algorithm);
      if (!alg) throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + algorithm + "'");
      opt.config.algorithm = *alg;
      opt.config.T = horizon;
      opt.config.params = {gamma, eta, 0.0};
      opt.config.delta = delta;
      opt.seeds = cli::parse_seeds(seeds_spec);
      polartax::MeanMatrix means;
      if (!lowerbound_kind.empty()) {
        auto lb = lower_bound_options();
        lb.k_arm = lowerbound_kind == "karm";
        const auto inst = cli::make_lower_bound(lb);
        means = inst.means;
        opt.metadata.emplace_back("instance", "lowerbound-" + lowerbound_kind);
        opt.metadata.emplace_back("epsilon", io::fmt(inst.epsilon));
      } else {
        if (means_path.empty()) throw Error(ErrorKind::InvalidArgument, "--means or --lowerbound required");
        auto in = open_input(means_path, "means file");
        means = io::read_means(in).means;
      }
      cli::cmd_simulate(means, opt, out.stream());
    } else if (audit->parsed()) {
      auto in = open_input(log_path, "audit log");
      cli::cmd_audit(in, audit_users, audit_arms, horizon, {gamma, eta, 0.0}, out.stream());
    } else if (ingest->parsed()) {
      auto rin = open_input(ratings_path, "ratings file");
      auto gin = open_input(genres_path, "genre file");
      cli::IngestOptions opt;
      opt.users = parse_id_list(users_list);
      opt.sample_count = sample_count;
      opt.sample_seed = sample_seed;
      if (!genre_list.empty()) opt.genres = io::split(genre_list);
      cli::cmd_ingest(rin, gin, opt, out.stream());
    } else if (utility->parsed()) {
      auto in = open_input(means_path, "means file");
      const auto mf = io::read_means(in);
      cli::SweepSpec spec;
      spec.gamma_grid = parse_grid(gamma_grid, gamma_steps ? gamma_steps : 6, 0.0, 1.0);
      spec.eta_grid = parse_grid(eta_grid, eta_steps, 0.0, eta_max);
      cli::cmd_utility(mf.means, spec, out.stream());
    } else if (lowerbound->parsed()) {
      cli::cmd_lowerbound(lower_bound_options(), out.stream());
    }
  } catch (const Error& e) {
    std::cerr << "polartax: " << e.what() << '\n';
    return cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "polartax: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
