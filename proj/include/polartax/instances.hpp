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

// Instance construction: the polarized two-arm society, the worst-case
// Bernoulli instances behind the regret lower bounds, and per-genre user
// preferences derived from a ratings dataset.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "polartax/core.hpp"
#include "polartax/io.hpp"

namespace polartax {

// First `majority` rows (1,0), remaining rows (0,1).
inline MeanMatrix polarized_instance(std::size_t n, std::size_t majority) {
  detail::require(majority <= n, ErrorKind::InvalidArgument,
                  "group size exceeds user count");
  Rows rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i < majority ? std::vector<double>{1.0, 0.0}
                           : std::vector<double>{0.0, 1.0};
  }
  return MeanMatrix::from_rows(rows);
}

// Same society with preferred/unpreferred means `high`/`low`.
inline MeanMatrix polarized_instance(std::size_t n, std::size_t majority,
                                     double high, double low) {
  detail::require(majority <= n, ErrorKind::InvalidArgument,
                  "group size exceeds user count");
  Rows rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = i < majority ? std::vector<double>{high, low}
                           : std::vector<double>{low, high};
  }
  return MeanMatrix::from_rows(rows);
}

struct LowerBoundSpec {
  std::vector<int> bits;
  std::size_t T = 1;
  double epsilon = 0.0;
};

// sqrt(1/(8T)): gap of the two-arm worst case.
inline double lower_bound_epsilon_2arm(std::size_t T) {
  detail::require(T >= 1, ErrorKind::InvalidArgument, "horizon must be >= 1");
  return std::sqrt(1.0 / (8.0 * static_cast<double>(T)));
}

// sqrt((k-1)/(8nT)): gap of the k-arm worst case.
inline double lower_bound_epsilon_karm(std::size_t n, std::size_t k,
                                       std::size_t T) {
  return std::sqrt(static_cast<double>(k - 1) /
                   (8.0 * static_cast<double>(n) * static_cast<double>(T)));
}

inline LowerBoundSpec make_lower_bound_spec(std::vector<int> bits,
                                            std::size_t T) {
  for (int b : bits) {
    detail::require(b == 0 || b == 1, ErrorKind::InvalidArgument,
                    "preference bits must be 0 or 1");
  }
  detail::require(!bits.empty(), ErrorKind::InvalidArgument,
                  "need at least one preference bit");
  return {std::move(bits), T, lower_bound_epsilon_2arm(T)};
}

// Row i is (1/2 + eps, 1/2) when b_i = 0 and (1/2, 1/2 + eps) when b_i = 1.
inline MeanMatrix lower_bound_instance_2arm(const LowerBoundSpec& spec) {
  Rows rows;
  for (int b : spec.bits) {
    rows.push_back(b == 0 ? std::vector<double>{0.5 + spec.epsilon, 0.5}
                          : std::vector<double>{0.5, 0.5 + spec.epsilon});
  }
  return MeanMatrix::from_rows(rows);
}

inline MeanMatrix lower_bound_instance_2arm(const std::vector<int>& bits,
                                            std::size_t T) {
  return lower_bound_instance_2arm(make_lower_bound_spec(bits, T));
}

// All rows (1/2 + eps, 1/2, ..., 1/2); the alternative instance raises
// `special_arm` (0-based, >= 1) to 1/2 + 2 eps.
inline MeanMatrix lower_bound_instance_karm(
    std::size_t n, std::size_t k, std::size_t T,
    std::optional<std::size_t> special_arm = std::nullopt) {
  detail::require(n >= 1 && k >= 2, ErrorKind::InvalidArgument,
                  "need n >= 1 and k >= 2");
  detail::require(n * T > 7 * (k - 1), ErrorKind::HorizonTooSmall,
                  "k-arm lower bound instance needs nT > 7(k-1)");
  const double eps = lower_bound_epsilon_karm(n, k, T);
  std::vector<double> row(k, 0.5);
  row[0] = 0.5 + eps;
  if (special_arm) {
    detail::require(*special_arm >= 1 && *special_arm < k,
                    ErrorKind::InvalidArgument,
                    "special arm must be in [1, k)");
    row[*special_arm] = 0.5 + 2.0 * eps;
  }
  return MeanMatrix::from_rows(Rows(n, row));
}

// ---------------------------------------------------------------------------
// Ratings ingestion

struct Rating {
  long long user_id = 0;
  long long item_id = 0;
  double rating = 0.0;
  long long timestamp = 0;
};

struct RatingsDataset {
  std::vector<Rating> ratings;
  std::map<long long, std::vector<std::string>> genres;
  std::vector<std::string> genre_index;  // sorted; defines arm order
};

inline constexpr const char* kNoGenres = "(no genres listed)";

inline bool valid_half_star(double r) {
  const double twice = 2.0 * r;
  return r >= 0.5 && r <= 5.0 && std::abs(twice - std::round(twice)) < 1e-9;
}

inline std::vector<Rating> read_ratings(std::istream& in) {
  const auto t = io::read_csv(in, "ratings file", /*allow_empty=*/true);
  detail::require(!t.header.empty(), ErrorKind::EmptyDataset,
                  "ratings file is empty");
  io::require_header(t, {"user_id", "item_id", "rating", "timestamp"},
                     "ratings file");
  std::vector<Rating> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const auto where = "ratings file line " + std::to_string(t.line_numbers[r]);
    Rating rt{io::parse_int(f[0], where), io::parse_int(f[1], where),
              io::parse_double(f[2], where), io::parse_int(f[3], where)};
    detail::require(valid_half_star(rt.rating), ErrorKind::ParseError,
                    where + ": rating must be a half-star value in [0.5, 5]");
    out.push_back(rt);
  }
  return out;
}

inline std::map<long long, std::vector<std::string>> read_genres(
    std::istream& in) {
  const auto t = io::read_csv(in, "genre file");
  io::require_header(t, {"item_id", "genres"}, "genre file");
  std::map<long long, std::vector<std::string>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& f = t.rows[r];
    const auto where = "genre file line " + std::to_string(t.line_numbers[r]);
    std::vector<std::string> genres;
    for (auto& g : io::split(f[1], '|')) {
      if (!g.empty() && g != kNoGenres) genres.push_back(std::move(g));
    }
    std::sort(genres.begin(), genres.end());
    genres.erase(std::unique(genres.begin(), genres.end()), genres.end());
    out[io::parse_int(f[0], where)] = std::move(genres);
  }
  return out;
}

// Builds the dataset with the alphabetical genre index. When `only_genres`
// is non-empty the arms are restricted to those genres.
inline RatingsDataset make_dataset(
    std::vector<Rating> ratings,
    std::map<long long, std::vector<std::string>> genres,
    const std::vector<std::string>& only_genres = {}) {
  RatingsDataset ds{std::move(ratings), std::move(genres), {}};
  std::set<std::string> index;
  if (only_genres.empty()) {
    for (const auto& [item, gs] : ds.genres) index.insert(gs.begin(), gs.end());
  } else {
    index.insert(only_genres.begin(), only_genres.end());
  }
  ds.genre_index.assign(index.begin(), index.end());
  return ds;
}

struct IngestResult {
  MeanMatrix means;
  std::vector<std::string> genres;
  std::vector<long long> user_ids;
  // (user row, genre column) cells with no ratings; their mean is 0.
  std::vector<std::pair<std::size_t, std::size_t>> unrated;
};

inline std::vector<long long> dataset_users(const RatingsDataset& ds) {
  std::set<long long> users;
  for (const auto& r : ds.ratings) users.insert(r.user_id);
  return {users.begin(), users.end()};
}

// Seeded sample of `count` users (all users when count >= available),
// returned in ascending id order.
inline std::vector<long long> sample_users(const RatingsDataset& ds,
                                           std::size_t count,
                                           std::uint64_t seed) {
  auto users = dataset_users(ds);
  if (count >= users.size()) return users;
  CounterRng rng(seed);
  for (std::size_t i = users.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(users[i], users[j]);
  }
  users.resize(count);
  std::sort(users.begin(), users.end());
  return users;
}

// mu[i][j] = (mean rating of user i over items in genre j) / 5, with 0 for
// genres the user never rated. Users default to everyone in the dataset.
inline IngestResult ingest_ratings(const RatingsDataset& ds,
                                   std::vector<long long> users = {}) {
  detail::require(!ds.ratings.empty(), ErrorKind::EmptyDataset,
                  "ratings dataset is empty");
  for (const auto& r : ds.ratings) {
    const auto it = ds.genres.find(r.item_id);
    detail::require(it != ds.genres.end() && !it->second.empty(),
                    ErrorKind::UnknownItem,
                    "item " + std::to_string(r.item_id) + " has no genres");
    detail::require(valid_half_star(r.rating), ErrorKind::InvalidArgument,
                    "rating out of range");
  }
  detail::require(ds.genre_index.size() >= 2, ErrorKind::InvalidArgument,
                  "need at least two genres");
  if (users.empty()) users = dataset_users(ds);

  std::map<long long, std::size_t> row_of;
  for (std::size_t i = 0; i < users.size(); ++i) row_of[users[i]] = i;
  std::map<std::string, std::size_t> col_of;
  for (std::size_t j = 0; j < ds.genre_index.size(); ++j) {
    col_of[ds.genre_index[j]] = j;
  }

  const std::size_t n = users.size();
  const std::size_t k = ds.genre_index.size();
  std::vector<double> sums(n * k, 0.0);
  std::vector<std::size_t> counts(n * k, 0);
  for (const auto& r : ds.ratings) {
    const auto row = row_of.find(r.user_id);
    if (row == row_of.end()) continue;
    for (const auto& g : ds.genres.at(r.item_id)) {
      const auto col = col_of.find(g);
      if (col == col_of.end()) continue;
      sums[row->second * k + col->second] += r.rating;
      ++counts[row->second * k + col->second];
    }
  }

  IngestResult out;
  out.genres = ds.genre_index;
  out.user_ids = users;
  Rows rows(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t c = counts[i * k + j];
      if (c == 0) {
        out.unrated.emplace_back(i, j);
      } else {
        rows[i][j] = sums[i * k + j] / static_cast<double>(c) / 5.0;
      }
    }
  }
  out.means = MeanMatrix::from_rows(rows);
  return out;
}

}  // namespace polartax
