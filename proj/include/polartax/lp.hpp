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

// Dense two-phase primal simplex with Bland's pivoting rule.
//
// Problems are stated as
//   maximize    c . x
//   subject to  a_r . x  (<= | >= | =)  b_r   for every row r
//               lo <= x <= hi
// with finite lower bounds (default 0) and optional finite upper bounds.
// Bland's rule makes the pivot sequence, and hence the returned vertex, a
// deterministic function of the input.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "polartax/core.hpp"

namespace polartax::lp {

inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kPivotTol = 1e-10;

enum class Relation { LessEq, GreaterEq, Equal };

struct Constraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEq;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
  std::vector<double> lower;  // empty => all zero
  std::vector<double> upper;  // empty => all +inf

  explicit LinearProgram(std::size_t num_vars = 0)
      : objective(num_vars, 0.0) {}

  std::size_t num_vars() const { return objective.size(); }

  Constraint& add(std::vector<double> coeffs, Relation rel, double rhs) {
    constraints.push_back({std::move(coeffs), rel, rhs});
    return constraints.back();
  }

  double lower_bound(std::size_t j) const {
    return lower.empty() ? 0.0 : lower[j];
  }
  double upper_bound(std::size_t j) const {
    return upper.empty() ? std::numeric_limits<double>::infinity() : upper[j];
  }

  void validate() const {
    const std::size_t nv = num_vars();
    detail::require(nv >= 1, ErrorKind::InvalidArgument,
                    "linear program has no variables");
    for (const auto& c : constraints) {
      detail::require(c.coeffs.size() == nv, ErrorKind::InvalidArgument,
                      "constraint width differs from objective width");
    }
    detail::require(lower.empty() || lower.size() == nv,
                    ErrorKind::InvalidArgument, "lower bound size mismatch");
    detail::require(upper.empty() || upper.size() == nv,
                    ErrorKind::InvalidArgument, "upper bound size mismatch");
    for (std::size_t j = 0; j < nv; ++j) {
      detail::require(std::isfinite(lower_bound(j)),
                      ErrorKind::InvalidArgument,
                      "lower bounds must be finite");
      detail::require(lower_bound(j) <= upper_bound(j),
                      ErrorKind::InvalidArgument, "lower bound above upper");
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

namespace detail_simplex {

// Row-major dense tableau; column `cols` holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0),
        obj_(cols + 1, 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const {
    return a_[r * (cols_ + 1) + c];
  }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  std::vector<double>& obj() { return obj_; }
  std::vector<std::size_t>& basis() { return basis_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = cols_ + 1;
    double* prow = &a_[pr * w];
    const double inv = 1.0 / prow[pc];
    nz_.clear();
    for (std::size_t c = 0; c < w; ++c) {
      if (prow[c] == 0.0) continue;
      prow[c] *= inv;
      nz_.push_back(c);
    }
    prow[pc] = 1.0;
    // Only the pivot row's nonzero columns change.
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c : nz_) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    const double f = obj_[pc];
    if (f != 0.0) {
      for (std::size_t c : nz_) obj_[c] -= f * prow[c];
      obj_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<double> obj_;  // reduced costs d_j = c_B B^-1 a_j - c_j; rhs = z
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

enum class PhaseResult { Optimal, Unbounded };

// Runs Bland-rule simplex iterations on columns [0, allowed_cols).
inline PhaseResult iterate(Tableau& t, std::size_t allowed_cols,
                           std::size_t& iterations, std::size_t cap) {
  for (;;) {
    std::size_t enter = allowed_cols;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      if (t.obj()[c] < -kPivotTol) {
        enter = c;
        break;
      }
    }
    if (enter == allowed_cols) return PhaseResult::Optimal;

    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > kPivotTol) best_ratio = std::min(best_ratio, std::max(t.rhs(r), 0.0) / a);
    }
    // Among minimum-ratio rows, the one whose basic variable has the lowest
    // index leaves.
    std::size_t leave = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kPivotTol) continue;
      if (std::max(t.rhs(r), 0.0) / a > best_ratio + kPivotTol) continue;
      if (leave == t.rows() || t.basis()[r] < t.basis()[leave]) leave = r;
    }
    if (leave == t.rows()) return PhaseResult::Unbounded;

    if (++iterations > cap) {
      throw Error(ErrorKind::NumericalFailure,
                  "simplex iteration cap of " + std::to_string(cap) +
                      " exceeded");
    }
    t.pivot(leave, enter);
  }
}

}  // namespace detail_simplex

inline LpSolution solve(const LinearProgram& lp) {
  using detail_simplex::PhaseResult;
  using detail_simplex::Tableau;

  lp.validate();
  const std::size_t nv = lp.num_vars();

  // Shift x = lo + y and turn finite upper bounds into rows.
  struct Row {
    std::vector<double> coeffs;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size());
  for (const auto& c : lp.constraints) {
    double rhs = c.rhs;
    for (std::size_t j = 0; j < nv; ++j) rhs -= c.coeffs[j] * lp.lower_bound(j);
    rows.push_back({c.coeffs, c.relation, rhs});
  }
  for (std::size_t j = 0; j < nv; ++j) {
    const double hi = lp.upper_bound(j);
    if (std::isfinite(hi)) {
      std::vector<double> e(nv, 0.0);
      e[j] = 1.0;
      rows.push_back({std::move(e), Relation::LessEq, hi - lp.lower_bound(j)});
    }
  }
  // Normalize to non-negative right-hand sides. A ">= 0" row becomes a
  // "<= 0" row so that it starts with a slack in the basis.
  for (auto& r : rows) {
    const bool flip = r.rhs < 0.0 || (r.rhs == 0.0 && r.rel == Relation::GreaterEq);
    if (!flip) continue;
    for (double& v : r.coeffs) v = -v;
    r.rhs = -r.rhs;
    if (r.rel == Relation::LessEq) {
      r.rel = Relation::GreaterEq;
    } else if (r.rel == Relation::GreaterEq) {
      r.rel = Relation::LessEq;
    }
  }

  const std::size_t m = rows.size();
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++n_slack;
    if (r.rel != Relation::LessEq) ++n_art;
  }
  const std::size_t art_begin = nv + n_slack;
  const std::size_t cols = art_begin + n_art;

  Tableau t(m, cols);
  std::size_t slack = nv;
  std::size_t art = art_begin;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < nv; ++j) t.at(r, j) = rows[r].coeffs[j];
    t.rhs(r) = rows[r].rhs;
    switch (rows[r].rel) {
      case Relation::LessEq:
        t.at(r, slack) = 1.0;
        t.basis()[r] = slack++;
        break;
      case Relation::GreaterEq:
        t.at(r, slack++) = -1.0;
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
      case Relation::Equal:
        t.at(r, art) = 1.0;
        t.basis()[r] = art++;
        break;
    }
  }

  const std::size_t cap = 10 * (m + cols) * (m + cols);
  LpSolution sol;

  // Phase 1: maximize -(sum of artificials).
  if (n_art > 0) {
    auto& obj = t.obj();
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art_begin) continue;
      for (std::size_t c = 0; c <= cols; ++c) obj[c] -= t.at(r, c);
    }
    for (std::size_t c = art_begin; c < cols; ++c) obj[c] += 1.0;
    detail_simplex::iterate(t, cols, sol.iterations, cap);
    if (t.obj()[cols] < -kFeasibilityTol) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining artificials out of the basis where possible; rows
    // where that fails are redundant and stay inert.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art_begin) continue;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > 1e-9) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }

  // Phase 2 on the original objective; artificial columns may not enter.
  {
    auto& obj = t.obj();
    std::fill(obj.begin(), obj.end(), 0.0);
    for (std::size_t j = 0; j < nv; ++j) obj[j] = -lp.objective[j];
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t b = t.basis()[r];
      const double cb = b < nv ? lp.objective[b] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) obj[c] += cb * t.at(r, c);
    }
  }
  if (detail_simplex::iterate(t, art_begin, sol.iterations, cap) ==
      PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.x.assign(nv, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis()[r];
    if (b < nv) sol.x[b] = std::max(t.rhs(r), 0.0);
  }
  for (std::size_t j = 0; j < nv; ++j) {
    sol.x[j] = std::min(sol.x[j] + lp.lower_bound(j), lp.upper_bound(j));
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < nv; ++j) {
    sol.objective_value += lp.objective[j] * sol.x[j];
  }

  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < nv; ++j) lhs += c.coeffs[j] * sol.x[j];
    const double scale = 1e-6 * (1.0 + std::abs(c.rhs));
    const bool ok = (c.relation == Relation::LessEq && lhs <= c.rhs + scale) ||
                    (c.relation == Relation::GreaterEq && lhs >= c.rhs - scale) ||
                    (c.relation == Relation::Equal && std::abs(lhs - c.rhs) <= scale);
    if (!ok) {
      throw Error(ErrorKind::NumericalFailure,
                  "simplex solution violates a constraint by more than 1e-6");
    }
  }
  sol.status = LpStatus::Optimal;
  return sol;
}

// Like solve(), but turns Infeasible/Unbounded into an Error.
inline LpSolution solve_or_throw(const LinearProgram& lp,
                                 const std::string& context) {
  LpSolution sol = solve(lp);
  if (sol.status == LpStatus::Infeasible) {
    throw Error(ErrorKind::Infeasible, context);
  }
  if (sol.status == LpStatus::Unbounded) {
    throw Error(ErrorKind::Unbounded, context);
  }
  return sol;
}

}  // namespace polartax::lp
