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

#ifndef PEAQLAB_BOOTSTRAP_HPP_
#define PEAQLAB_BOOTSTRAP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "peaqlab/dataset.hpp"
#include "peaqlab/mars.hpp"
#include "peaqlab/stats.hpp"

namespace peaqlab {

/// Test-set performance of one trained mapping.
struct MetricsReport {
  double pearson_rp = 0.0;
  double spearman_rs = 0.0;
  double aes_score = 0.0;
  int n_points = 0;
};

struct BootstrapConfig {
  int iterations = 2000;
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
  /// Feature sets to evaluate, one report row per set.
  std::vector<std::vector<std::string>> feature_sets;
  /// Content categories to evaluate, one column group per selector.
  std::vector<ContentSelector> contents = {ContentSelector::kAll};
  bool resample_train = false;  // draw the training set with replacement
  bool split_by_item = false;   // partition items instead of data points
  bool percentile_ci = false;   // percentile CIs instead of 1.96*sd/sqrt(N)
  bool dump_raw = false;        // keep per-iteration metrics in the report
  int threads = 1;              // 0 = hardware concurrency
  MarsConfig mars;
};

/// Aggregated metrics for one (feature set, content selector) pair.
struct BootstrapCell {
  MeanCi pearson_m;
  MeanCi spearman_m;
  MeanCi aes_m;
  int n_rows = 0;
  int n_train = 0;
  int n_test = 0;
  int degenerate_resamples = 0;
  std::vector<MetricsReport> raw;  // populated only when dump_raw is set
};

struct BootstrapRow {
  std::string label;                  // feature names joined with '+'
  std::vector<std::string> features;
  std::vector<BootstrapCell> cells;   // parallel to BootstrapReport::contents
};

struct BootstrapReport {
  BootstrapConfig config;                 // echo of the run configuration
  std::vector<ContentSelector> contents;  // column groups, in output order
  std::vector<BootstrapRow> rows;

  std::string to_json() const;
  static BootstrapReport from_json(const std::string& text, const std::string& origin);
  /// Table layout: one row per feature set, R_pm/AES_m columns per content
  /// category, mean and CI half-width side by side.
  std::string to_table_csv() const;
};

/// Derives a statistically independent stream seed from (master, indices).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Rounded half-up training-set size.
int train_size(double train_fraction, int n_rows);

MetricsReport evaluate_predictions(const std::vector<double>& predicted,
                                   const std::vector<double>& subjective,
                                   const std::vector<double>& ci_half_widths);

/// One (feature set, content) evaluation over cfg.iterations random splits.
BootstrapCell bootstrap_cell(const Dataset& ds, const std::vector<std::string>& features,
                             const BootstrapConfig& cfg);

/// Full protocol: every (feature set, content selector) combination.
BootstrapReport bootstrap_run(const Dataset& ds, const BootstrapConfig& cfg);

}  // namespace peaqlab

#endif  // PEAQLAB_BOOTSTRAP_HPP_
