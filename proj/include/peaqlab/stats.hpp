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

#ifndef PEAQLAB_STATS_HPP_
#define PEAQLAB_STATS_HPP_

#include <span>
#include <vector>

namespace peaqlab {

/// Sample Pearson correlation; throws ConstantInput / LengthMismatch.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average-ranked data (ties get their mean rank).
double spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based), ties resolved to the mean rank.
std::vector<double> average_ranks(std::span<const double> x);

/// CI-weighted RMS error: sqrt(mean(((o - s) / ci)^2)).
double aes(std::span<const double> objective, std::span<const double> subjective,
           std::span<const double> ci_half_widths);

struct MeanCi {
  double mean = 0.0;
  double ci95_half_width = 0.0;
};

/// Mean with normal-approximation 95% CI of the mean (1.96 * sd / sqrt(n)).
MeanCi aggregate_ci(std::span<const double> samples);

/// Percentile-based alternative: mean with the [2.5%, 97.5%] spread reported
/// as a symmetric half-width.
MeanCi aggregate_ci_percentile(std::span<const double> samples);

}  // namespace peaqlab

#endif  // PEAQLAB_STATS_HPP_
