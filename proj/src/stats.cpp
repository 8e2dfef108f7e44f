// Copyright 2026 The Peaqlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "peaqlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "peaqlab/error.hpp"

namespace peaqlab {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "correlation inputs have different lengths (" +
                    std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    throw Error(ErrorKind::kTooFewSamples,
                "correlation needs at least 2 samples, got " + std::to_string(x.size()));
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kConstantInput, "correlation input has zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // Tied block [i, j] shares the mean of its 1-based rank positions.
    const double mean_rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  return pearson(rx, ry);
}

double aes(std::span<const double> objective, std::span<const double> subjective,
           std::span<const double> ci_half_widths) {
  if (objective.size() != subjective.size() || objective.size() != ci_half_widths.size()) {
    throw Error(ErrorKind::kLengthMismatch, "error-score inputs have different lengths");
  }
  if (objective.empty()) {
    throw Error(ErrorKind::kTooFewSamples, "error score needs at least 1 sample");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < objective.size(); ++i) {
    if (ci_half_widths[i] <= 0.0) {
      throw Error(ErrorKind::kNonPositiveCI, "confidence interval half-widths must be positive");
    }
    const double z = (objective[i] - subjective[i]) / ci_half_widths[i];
    acc += z * z;
  }
  return std::sqrt(acc / static_cast<double>(objective.size()));
}

MeanCi aggregate_ci(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::kTooFewSamples, "aggregate needs at least 1 sample");
  }
  const std::size_t n = samples.size();
  MeanCi out;
  out.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  if (n == 1) return out;
  double ss = 0.0;
  for (double v : samples) {
    const double d = v - out.mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.ci95_half_width = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return out;
}

MeanCi aggregate_ci_percentile(std::span<const double> samples) {
  if (samples.empty()) {
    throw Error(ErrorKind::kTooFewSamples, "aggregate needs at least 1 sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  MeanCi out;
  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
             static_cast<double>(sorted.size());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  out.ci95_half_width = (quantile(0.975) - quantile(0.025)) / 2.0;
  return out;
}

}  // namespace peaqlab
