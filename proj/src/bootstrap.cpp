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

#include "peaqlab/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "peaqlab/error.hpp"

namespace peaqlab {

namespace {

constexpr const char* kReportSchema = "peaqlab-bootstrap/1";
constexpr int kMaxResampleAttempts = 1000;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool is_constant(const std::vector<double>& v) {
  for (double x : v) {
    if (x != v.front()) return false;
  }
  return true;
}

std::string join_features(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& name : names) {
    if (!out.empty()) out += "+";
    out += name;
  }
  return out;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = master;
  std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (a * 0xd1342543de82ef95ULL);
  mixed = splitmix64(state);
  state = mixed ^ (b * 0xaf251af3b0f025b5ULL);
  return splitmix64(state);
}

int train_size(double train_fraction, int n_rows) {
  return static_cast<int>(std::floor(train_fraction * static_cast<double>(n_rows) + 0.5));
}

MetricsReport evaluate_predictions(const std::vector<double>& predicted,
                                   const std::vector<double>& subjective,
                                   const std::vector<double>& ci_half_widths) {
  MetricsReport report;
  report.n_points = static_cast<int>(predicted.size());
  // A fit that collapsed to a constant carries no ranking information; score
  // it as zero correlation rather than failing the whole run.
  if (is_constant(predicted)) {
    report.pearson_rp = 0.0;
    report.spearman_rs = 0.0;
  } else {
    report.pearson_rp = pearson(predicted, subjective);
    report.spearman_rs = spearman(predicted, subjective);
  }
  report.aes_score = aes(predicted, subjective, ci_half_widths);
  return report;
}

namespace {

struct CellData {
  std::vector<double> x;  // row-major, n_rows x n_vars
  std::vector<double> y;
  std::vector<double> ci;
  std::vector<std::string> item_ids;  // parallel to rows
  int n_rows = 0;
  int n_vars = 0;
};

CellData gather(const Dataset& ds, const std::vector<std::string>& features) {
  CellData data;
  data.n_rows = static_cast<int>(ds.rows.size());
  data.n_vars = static_cast<int>(features.size());
  std::vector<int> cols;
  for (const std::string& name : features) {
    const int idx = ds.feature_index(name);
    if (idx < 0) {
      throw Error(ErrorKind::kFeatureMismatch, "feature '" + name + "' not found in dataset");
    }
    cols.push_back(idx);
  }
  data.x.reserve(static_cast<std::size_t>(data.n_rows) * cols.size());
  for (const DatasetRow& row : ds.rows) {
    for (int c : cols) data.x.push_back(row.features[static_cast<std::size_t>(c)]);
    data.y.push_back(row.score.mushra_mean);
    data.ci.push_back(row.score.ci95_half_width);
    data.item_ids.push_back(row.score.item_id);
  }
  return data;
}

/// Splits row indices into train/test with a freshly seeded generator. The
/// generator only ever sees this iteration's derived seed, so scheduling
/// across threads cannot change the outcome.
void split_rows(const CellData& data, const BootstrapConfig& cfg, std::uint64_t seed,
                std::vector<int>& train, std::vector<int>& test) {
  std::mt19937_64 rng(seed);
  train.clear();
  test.clear();
  if (cfg.split_by_item) {
    std::vector<std::string> items;
    for (const std::string& id : data.item_ids) {
      if (std::find(items.begin(), items.end(), id) == items.end()) items.push_back(id);
    }
    std::shuffle(items.begin(), items.end(), rng);
    const int n_train_items = train_size(cfg.train_fraction, static_cast<int>(items.size()));
    std::set<std::string> train_items(items.begin(), items.begin() + n_train_items);
    for (int i = 0; i < data.n_rows; ++i) {
      if (train_items.count(data.item_ids[static_cast<std::size_t>(i)]) != 0) {
        train.push_back(i);
      } else {
        test.push_back(i);
      }
    }
  } else {
    std::vector<int> order(static_cast<std::size_t>(data.n_rows));
    for (int i = 0; i < data.n_rows; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const int n_train = train_size(cfg.train_fraction, data.n_rows);
    train.assign(order.begin(), order.begin() + n_train);
    test.assign(order.begin() + n_train, order.end());
  }
  if (cfg.resample_train && !train.empty()) {
    // Training set is drawn with replacement from the 80% block; the test
    // block stays disjoint from every drawn row.
    std::vector<int> block = train;
    std::uniform_int_distribution<std::size_t> pick(0, block.size() - 1);
    for (int& idx : train) idx = block[pick(rng)];
  }
}

struct IterationResult {
  MetricsReport metrics;
  int resamples = 0;
};

IterationResult run_iteration(const CellData& data, const std::vector<std::string>& features,
                              const BootstrapConfig& cfg, int iteration) {
  IterationResult result;
  std::vector<int> train, test;
  std::vector<double> test_y;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= kMaxResampleAttempts) {
      throw Error(ErrorKind::kDegenerateSplit,
                  "could not draw a test set with non-constant subjective scores after " +
                      std::to_string(kMaxResampleAttempts) + " attempts");
    }
    const std::uint64_t seed =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(iteration),
                    static_cast<std::uint64_t>(attempt));
    split_rows(data, cfg, seed, train, test);
    if (test.size() < 2) {
      throw Error(ErrorKind::kDegenerateSplit, "test split has fewer than 2 rows");
    }
    test_y.clear();
    for (int idx : test) test_y.push_back(data.y[static_cast<std::size_t>(idx)]);
    if (!is_constant(test_y)) break;
    ++result.resamples;
  }

  const int n_vars = data.n_vars;
  std::vector<double> train_x, train_y;
  train_x.reserve(train.size() * static_cast<std::size_t>(n_vars));
  for (int idx : train) {
    const double* row = data.x.data() + static_cast<std::size_t>(idx) * n_vars;
    train_x.insert(train_x.end(), row, row + n_vars);
    train_y.push_back(data.y[static_cast<std::size_t>(idx)]);
  }
  const MarsModel model =
      mars_fit(train_x, static_cast<int>(train.size()), n_vars, train_y, features, cfg.mars);

  std::vector<double> test_x, test_ci;
  test_x.reserve(test.size() * static_cast<std::size_t>(n_vars));
  for (int idx : test) {
    const double* row = data.x.data() + static_cast<std::size_t>(idx) * n_vars;
    test_x.insert(test_x.end(), row, row + n_vars);
    test_ci.push_back(data.ci[static_cast<std::size_t>(idx)]);
  }
  const std::vector<double> predicted =
      mars_predict_rows(model, test_x, static_cast<int>(test.size()), n_vars);
  result.metrics = evaluate_predictions(predicted, test_y, test_ci);
  return result;
}

}  // namespace

BootstrapCell bootstrap_cell(const Dataset& ds, const std::vector<std::string>& features,
                             const BootstrapConfig& cfg) {
  if (cfg.iterations < 1) {
    throw Error(ErrorKind::kTooFewSamples, "bootstrap needs at least 1 iteration");
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw Error(ErrorKind::kDegenerateSplit, "train fraction must lie strictly between 0 and 1");
  }
  if (ds.rows.size() < 10) {
    throw Error(ErrorKind::kTooFewRows,
                "bootstrap needs at least 10 rows after content filtering, got " +
                    std::to_string(ds.rows.size()));
  }
  const CellData data = gather(ds, features);

  std::vector<IterationResult> results(static_cast<std::size_t>(cfg.iterations));
  int thread_count = cfg.threads;
  if (thread_count <= 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
  }
  thread_count = std::min(thread_count, cfg.iterations);

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&](int worker_index) {
    for (int iter = worker_index; iter < cfg.iterations; iter += thread_count) {
      try {
        results[static_cast<std::size_t>(iter)] = run_iteration(data, features, cfg, iter);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (thread_count == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker, t);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  BootstrapCell cell;
  cell.n_rows = data.n_rows;
  if (cfg.split_by_item) {
    cell.n_train = -1;  // varies with the per-item row counts
    cell.n_test = -1;
  } else {
    cell.n_train = train_size(cfg.train_fraction, data.n_rows);
    cell.n_test = data.n_rows - cell.n_train;
  }
  std::vector<double> rp, rs, es;
  rp.reserve(results.size());
  for (const IterationResult& r : results) {
    rp.push_back(r.metrics.pearson_rp);
    rs.push_back(r.metrics.spearman_rs);
    es.push_back(r.metrics.aes_score);
    cell.degenerate_resamples += r.resamples;
  }
  auto aggregate = cfg.percentile_ci ? aggregate_ci_percentile : aggregate_ci;
  cell.pearson_m = aggregate(rp);
  cell.spearman_m = aggregate(rs);
  cell.aes_m = aggregate(es);
  if (cfg.dump_raw) {
    cell.raw.reserve(results.size());
    for (const IterationResult& r : results) cell.raw.push_back(r.metrics);
  }
  return cell;
}

BootstrapReport bootstrap_run(const Dataset& ds, const BootstrapConfig& cfg) {
  if (cfg.feature_sets.empty()) {
    throw Error(ErrorKind::kFeatureMismatch, "no feature sets requested");
  }
  if (cfg.contents.empty()) {
    throw Error(ErrorKind::kFeatureMismatch, "no content categories requested");
  }
  BootstrapReport report;
  report.config = cfg;
  report.contents = cfg.contents;
  for (const std::vector<std::string>& features : cfg.feature_sets) {
    BootstrapRow row;
    row.features = features;
    row.label = join_features(features);
    for (ContentSelector selector : cfg.contents) {
      const Dataset filtered = filter_content(ds, selector);
      row.cells.push_back(bootstrap_cell(filtered, features, cfg));
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace {

nlohmann::json mean_ci_to_json(const MeanCi& m) {
  return nlohmann::json{{"mean", m.mean}, {"ci95_half_width", m.ci95_half_width}};
}

MeanCi mean_ci_from_json(const nlohmann::json& j) {
  MeanCi m;
  m.mean = j.at("mean").get<double>();
  m.ci95_half_width = j.at("ci95_half_width").get<double>();
  return m;
}

}  // namespace

std::string BootstrapReport::to_json() const {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["config"] = {
      {"iterations", config.iterations},
      {"train_fraction", config.train_fraction},
      {"seed", config.seed},
      {"resample_train", config.resample_train},
      {"split_by_item", config.split_by_item},
      {"percentile_ci", config.percentile_ci},
      {"mars",
       {{"max_terms", config.mars.max_terms},
        {"max_interaction", config.mars.max_interaction},
        {"penalty", config.mars.penalty},
        {"mode", config.mars.mode == MarsMode::kPiecewiseCubic ? "cubic" : "linear"}}},
  };
  j["contents"] = nlohmann::json::array();
  for (ContentSelector s : contents) j["contents"].push_back(content_selector_name(s));
  j["rows"] = nlohmann::json::array();
  for (const BootstrapRow& row : rows) {
    nlohmann::json jr;
    jr["label"] = row.label;
    jr["features"] = row.features;
    jr["cells"] = nlohmann::json::array();
    for (const BootstrapCell& cell : row.cells) {
      nlohmann::json jc;
      jc["pearson_m"] = mean_ci_to_json(cell.pearson_m);
      jc["spearman_m"] = mean_ci_to_json(cell.spearman_m);
      jc["aes_m"] = mean_ci_to_json(cell.aes_m);
      jc["n_rows"] = cell.n_rows;
      jc["n_train"] = cell.n_train;
      jc["n_test"] = cell.n_test;
      jc["degenerate_resamples"] = cell.degenerate_resamples;
      if (!cell.raw.empty()) {
        nlohmann::json raw = nlohmann::json::array();
        for (const MetricsReport& m : cell.raw) {
          raw.push_back({{"pearson_rp", m.pearson_rp},
                         {"spearman_rs", m.spearman_rs},
                         {"aes", m.aes_score},
                         {"n_points", m.n_points}});
        }
        jc["raw"] = std::move(raw);
      }
      jr["cells"].push_back(std::move(jc));
    }
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

BootstrapReport BootstrapReport::from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": invalid report JSON: " + e.what());
  }
  try {
    const std::string schema = j.at("schema").get<std::string>();
    if (schema != kReportSchema) {
      throw Error(ErrorKind::kSchemaVersionMismatch,
                  origin + ": unsupported report schema '" + schema + "', expected '" +
                      kReportSchema + "'");
    }
    BootstrapReport report;
    const nlohmann::json& jc = j.at("config");
    report.config.iterations = jc.at("iterations").get<int>();
    report.config.train_fraction = jc.at("train_fraction").get<double>();
    report.config.seed = jc.at("seed").get<std::uint64_t>();
    report.config.resample_train = jc.at("resample_train").get<bool>();
    report.config.split_by_item = jc.at("split_by_item").get<bool>();
    report.config.percentile_ci = jc.at("percentile_ci").get<bool>();
    const nlohmann::json& jm = jc.at("mars");
    report.config.mars.max_terms = jm.at("max_terms").get<int>();
    report.config.mars.max_interaction = jm.at("max_interaction").get<int>();
    report.config.mars.penalty = jm.at("penalty").get<double>();
    report.config.mars.mode = jm.at("mode").get<std::string>() == "cubic"
                                  ? MarsMode::kPiecewiseCubic
                                  : MarsMode::kPiecewiseLinear;
    for (const nlohmann::json& s : j.at("contents")) {
      report.contents.push_back(parse_content_selector(s.get<std::string>()));
    }
    report.config.contents = report.contents;
    for (const nlohmann::json& jr : j.at("rows")) {
      BootstrapRow row;
      row.label = jr.at("label").get<std::string>();
      row.features = jr.at("features").get<std::vector<std::string>>();
      for (const nlohmann::json& jcell : jr.at("cells")) {
        BootstrapCell cell;
        cell.pearson_m = mean_ci_from_json(jcell.at("pearson_m"));
        cell.spearman_m = mean_ci_from_json(jcell.at("spearman_m"));
        cell.aes_m = mean_ci_from_json(jcell.at("aes_m"));
        cell.n_rows = jcell.at("n_rows").get<int>();
        cell.n_train = jcell.at("n_train").get<int>();
        cell.n_test = jcell.at("n_test").get<int>();
        cell.degenerate_resamples = jcell.at("degenerate_resamples").get<int>();
        row.cells.push_back(std::move(cell));
      }
      report.config.feature_sets.push_back(row.features);
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": malformed report: " + e.what());
  }
}

std::string BootstrapReport::to_table_csv() const {
  std::ostringstream out;
  out << "feature_set";
  for (ContentSelector s : contents) {
    const std::string name = content_selector_name(s);
    out << "," << name << "_Rp_mean," << name << "_Rp_ci95," << name << "_AES_mean," << name
        << "_AES_ci95";
  }
  out << "\n";
  for (const BootstrapRow& row : rows) {
    out << row.label;
    for (const BootstrapCell& cell : row.cells) {
      out << "," << fmt_real(cell.pearson_m.mean) << "," << fmt_real(cell.pearson_m.ci95_half_width)
          << "," << fmt_real(cell.aes_m.mean) << "," << fmt_real(cell.aes_m.ci95_half_width);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace peaqlab
