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

// Mean estimators used by the learners: Hoeffding-style optimistic radii for
// per-(user, arm) means and the median-of-means estimator for aggregated
// rewards supported on [0, n].

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "polartax/core.hpp"

namespace polartax {

struct ArmStats {
  std::size_t count = 0;
  double sum = 0.0;

  double mean() const {
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
  }
  void add(double reward) {
    ++count;
    sum += reward;
  }
};

struct MedianOfMeansPlan {
  double delta = 0.5;
  std::size_t samples = 0;
  std::size_t blocks = 1;     // m
  std::size_t block_len = 0;  // floor(samples / m)
};

// m = max(1, min(floor(8 ln(1/delta)), floor(T/2))).
inline MedianOfMeansPlan median_of_means_plan(std::size_t samples,
                                              double delta) {
  detail::require(delta > 0.0 && delta < 1.0, ErrorKind::InvalidArgument,
                  "delta must lie in (0,1)");
  MedianOfMeansPlan plan;
  plan.delta = delta;
  plan.samples = samples;
  const auto by_delta =
      static_cast<std::size_t>(std::floor(8.0 * std::log(1.0 / delta)));
  plan.blocks = std::max<std::size_t>(1, std::min(by_delta, samples / 2));
  plan.block_len = samples / plan.blocks;
  return plan;
}

inline double median_of_means(std::span<const double> samples, double delta) {
  detail::require(!samples.empty(), ErrorKind::EmptySequence,
                  "median of means needs at least one sample");
  const auto plan = median_of_means_plan(samples.size(), delta);
  std::vector<double> block_means(plan.blocks, 0.0);
  for (std::size_t b = 0; b < plan.blocks; ++b) {
    double sum = 0.0;
    for (std::size_t s = 0; s < plan.block_len; ++s) {
      sum += samples[b * plan.block_len + s];
    }
    block_means[b] = sum / static_cast<double>(plan.block_len);
  }
  std::sort(block_means.begin(), block_means.end());
  const std::size_t mid = plan.blocks / 2;
  if (plan.blocks % 2 == 1) return block_means[mid];
  return 0.5 * (block_means[mid - 1] + block_means[mid]);
}

// sqrt(ln(2 T n k / delta) / count)
inline double ucb_radius(std::size_t count, std::size_t T, std::size_t n,
                         std::size_t k, double delta) {
  detail::require(count >= 1, ErrorKind::ZeroCount,
                  "confidence radius needs at least one pull");
  const double scale = 2.0 * static_cast<double>(T) * static_cast<double>(n) *
                       static_cast<double>(k) / delta;
  return std::sqrt(std::log(scale) / static_cast<double>(count));
}

// sqrt(24 n ln(T k / delta) / count)
inline double robust_radius(std::size_t count, std::size_t T, std::size_t n,
                            std::size_t k, double delta) {
  detail::require(count >= 1, ErrorKind::ZeroCount,
                  "confidence radius needs at least one pull");
  const double scale =
      static_cast<double>(T) * static_cast<double>(k) / delta;
  return std::sqrt(24.0 * static_cast<double>(n) * std::log(scale) /
                   static_cast<double>(count));
}

}  // namespace polartax
