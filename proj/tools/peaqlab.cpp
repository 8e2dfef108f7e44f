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

// Command-line front end: feature extraction from WAV pairs, regression
// training, bootstrap evaluation, and report rendering.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "peaqlab/ann.hpp"
#include "peaqlab/audio.hpp"
#include "peaqlab/bootstrap.hpp"
#include "peaqlab/csv.hpp"
#include "peaqlab/dataset.hpp"
#include "peaqlab/earmodel.hpp"
#include "peaqlab/error.hpp"
#include "peaqlab/mars.hpp"
#include "peaqlab/mov.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

using peaqlab::EarModelConfig;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Run manifest: embedded in every emitted artifact so a run can be replayed.
// Wall-clock timing is reported on stderr only; keeping it out of the files
// makes repeated runs with the same inputs byte-identical.

json make_manifest(const std::string& command, const std::vector<std::string>& inputs,
                   const json& config_echo) {
  json m;
  m["tool"] = "peaqlab";
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["inputs"] = inputs;
  m["config"] = config_echo;
  return m;
}

std::string manifest_comment(const json& manifest) {
  return "# manifest: " + manifest.dump() + "\n";
}

EarModelConfig resolve_ear_config(const std::string& flag_path, std::string* origin) {
  if (!flag_path.empty()) {
    *origin = flag_path;
    return EarModelConfig::load(flag_path);
  }
  if (const char* dir = std::getenv("PEAQLAB_CONFIG_DIR")) {
    const std::filesystem::path candidate = std::filesystem::path(dir) / "earmodel.json";
    if (std::filesystem::exists(candidate)) {
      *origin = candidate.string();
      return EarModelConfig::load(candidate.string());
    }
  }
  *origin = "<builtin>";
  return EarModelConfig::advanced_default();
}

struct TimedScope {
  std::string label;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  ~TimedScope() {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    std::cerr << label << " took " << elapsed.count() << " ms\n";
  }
};

std::string default_key_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string movs_csv_row(const std::string& item_id, const std::string& condition_id,
                         const peaqlab::MovVector& movs) {
  std::ostringstream out;
  out << item_id << "," << condition_id << "," << peaqlab::format_csv_field(movs.rms_noise_loudness)
      << "," << peaqlab::format_csv_field(movs.rms_missing_components) << ","
      << peaqlab::format_csv_field(movs.avg_lin_dist) << ","
      << peaqlab::format_csv_field(movs.rms_noise_loud_asym);
  return out.str();
}

std::string movs_csv_header() {
  std::string out = "item_id,condition_id";
  for (const char* name : peaqlab::kMovNames) {
    out += ",";
    out += name;
  }
  return out;
}

std::vector<std::vector<std::string>> parse_feature_sets(
    const std::vector<std::string>& specs, const std::vector<std::string>& available) {
  std::vector<std::vector<std::string>> sets;
  if (specs.empty()) {
    // Default: evaluate every feature on its own, one report row each.
    for (const std::string& name : available) sets.push_back({name});
    return sets;
  }
  for (const std::string& spec : specs) {
    std::vector<std::string> names;
    std::stringstream ss(spec);
    std::string token;
    while (std::getline(ss, token, '+')) {
      if (!token.empty()) names.push_back(token);
    }
    if (names.empty()) {
      throw peaqlab::Error(peaqlab::ErrorKind::kFeatureMismatch,
                           "empty feature set spec '" + spec + "'");
    }
    sets.push_back(std::move(names));
  }
  return sets;
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const std::string& ref_path, const std::string& test_path,
                const std::string& out_path, bool as_json, std::string item_id,
                std::string condition_id, const std::string& ear_config_path,
                double level_dbspl, double max_lag_ms) {
  TimedScope timer{"extract"};
  std::string config_origin;
  EarModelConfig cfg = resolve_ear_config(ear_config_path, &config_origin);
  peaqlab::AlignConfig align_cfg;
  align_cfg.max_lag_ms = max_lag_ms;
  align_cfg.playback_level_db_spl = level_dbspl > 0 ? level_dbspl : cfg.default_playback_level_db_spl;

  if (item_id.empty()) item_id = default_key_from_path(ref_path);
  if (condition_id.empty()) condition_id = default_key_from_path(test_path);

  const peaqlab::Signal reference = peaqlab::load_wav(ref_path);
  const peaqlab::Signal test = peaqlab::load_wav(test_path);
  const peaqlab::MovVector movs = peaqlab::extract_movs(reference, test, cfg, align_cfg);

  json config_echo = {{"ear_config", config_origin},
                      {"ear_config_version", cfg.version},
                      {"ear_config_checksum", cfg.checksum()},
                      {"level_dbspl", align_cfg.playback_level_db_spl},
                      {"max_lag_ms", align_cfg.max_lag_ms}};
  const json manifest = make_manifest("extract", {ref_path, test_path}, config_echo);

  std::string payload;
  if (as_json) {
    json row = {{"item_id", item_id},
                {"condition_id", condition_id},
                {"RmsNoiseLoudness_A", movs.rms_noise_loudness},
                {"RmsMissingComponents", movs.rms_missing_components},
                {"AvgLinDist_A", movs.avg_lin_dist},
                {"RmsNoiseLoudAsym_A", movs.rms_noise_loud_asym},
                {"manifest", manifest}};
    payload = row.dump(2) + "\n";
  } else {
    payload = manifest_comment(manifest) + movs_csv_header() + "\n" +
              movs_csv_row(item_id, condition_id, movs) + "\n";
  }
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    peaqlab::write_file_atomic(out_path, payload);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// batch-extract

int cmd_batch_extract(const std::string& list_path, const std::string& out_path,
                      const std::string& ear_config_path, double level_dbspl,
                      double max_lag_ms, int threads) {
  TimedScope timer{"batch-extract"};
  std::string config_origin;
  EarModelConfig cfg = resolve_ear_config(ear_config_path, &config_origin);
  peaqlab::AlignConfig align_cfg;
  align_cfg.max_lag_ms = max_lag_ms;
  align_cfg.playback_level_db_spl = level_dbspl > 0 ? level_dbspl : cfg.default_playback_level_db_spl;

  const peaqlab::CsvTable list = peaqlab::read_csv(list_path);
  const int c_item = list.require_column("item_id");
  const int c_cond = list.require_column("condition_id");
  const int c_ref = list.require_column("ref_wav");
  const int c_test = list.require_column("test_wav");

  const std::size_t n = list.rows.size();
  std::vector<std::string> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  int thread_count = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;
  thread_count = std::min<std::size_t>(thread_count, std::max<std::size_t>(n, 1));

  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        const auto& row = list.rows[i];
        const peaqlab::Signal reference = peaqlab::load_wav(row[c_ref]);
        const peaqlab::Signal test = peaqlab::load_wav(row[c_test]);
        const peaqlab::MovVector movs = peaqlab::extract_movs(reference, test, cfg, align_cfg);
        rows[i] = movs_csv_row(row[c_item], row[c_cond], movs);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      std::cerr << "row " << (i + 1) << " (" << list.rows[i][c_item] << ","
                << list.rows[i][c_cond] << ") failed\n";
      std::rethrow_exception(errors[i]);
    }
  }

  json config_echo = {{"ear_config", config_origin},
                      {"ear_config_version", cfg.version},
                      {"ear_config_checksum", cfg.checksum()},
                      {"level_dbspl", align_cfg.playback_level_db_spl},
                      {"max_lag_ms", align_cfg.max_lag_ms}};
  std::string payload =
      manifest_comment(make_manifest("batch-extract", {list_path}, config_echo)) +
      movs_csv_header() + "\n";
  for (const std::string& row : rows) payload += row + "\n";
  peaqlab::write_file_atomic(out_path, payload);
  std::cerr << "wrote " << n << " rows to " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const std::string& scores_path, const std::string& features_path,
              const std::string& out_path, const std::vector<std::string>& feature_specs,
              const std::string& content, const peaqlab::MarsConfig& mars_cfg) {
  TimedScope timer{"train"};
  const auto scores = peaqlab::load_scores(scores_path);
  const auto features = peaqlab::load_features(features_path);
  peaqlab::Dataset ds = peaqlab::join_features(scores, features);
  ds = peaqlab::filter_content(ds, peaqlab::parse_content_selector(content));

  std::vector<std::string> selected;
  if (feature_specs.empty()) {
    selected = ds.feature_names;
  } else {
    const auto sets = parse_feature_sets(feature_specs, ds.feature_names);
    for (const auto& set : sets) selected.insert(selected.end(), set.begin(), set.end());
  }
  const int n_vars = static_cast<int>(selected.size());
  const int n_rows = static_cast<int>(ds.rows.size());
  std::vector<int> cols;
  for (const std::string& name : selected) {
    const int idx = ds.feature_index(name);
    if (idx < 0) {
      throw peaqlab::Error(peaqlab::ErrorKind::kFeatureMismatch,
                           "feature '" + name + "' not found in dataset");
    }
    cols.push_back(idx);
  }
  std::vector<double> x, y;
  x.reserve(static_cast<std::size_t>(n_rows) * n_vars);
  for (const peaqlab::DatasetRow& row : ds.rows) {
    for (int c : cols) x.push_back(row.features[static_cast<std::size_t>(c)]);
    y.push_back(row.score.mushra_mean);
  }
  const peaqlab::MarsModel model = peaqlab::mars_fit(x, n_rows, n_vars, y, selected, mars_cfg);

  json model_json = json::parse(model.to_json());
  model_json["manifest"] = make_manifest(
      "train", {scores_path, features_path},
      {{"content", content},
       {"features", selected},
       {"mars", {{"max_terms", mars_cfg.max_terms},
                 {"max_interaction", mars_cfg.max_interaction},
                 {"penalty", mars_cfg.penalty},
                 {"mode", mars_cfg.mode == peaqlab::MarsMode::kPiecewiseCubic ? "cubic" : "linear"}}}});
  peaqlab::write_file_atomic(out_path, model_json.dump(2) + "\n");
  std::cerr << "trained on " << n_rows << " rows, " << model.terms.size()
            << " basis terms, GCV " << model.gcv_score << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bootstrap

int cmd_bootstrap(const std::string& scores_path, const std::string& features_path,
                  const std::string& out_json, const std::string& out_csv,
                  peaqlab::BootstrapConfig cfg, const std::vector<std::string>& feature_specs,
                  const std::vector<std::string>& content_specs) {
  TimedScope timer{"bootstrap"};
  const auto scores = peaqlab::load_scores(scores_path);
  const auto features = peaqlab::load_features(features_path);
  const peaqlab::Dataset ds = peaqlab::join_features(scores, features);

  cfg.feature_sets = parse_feature_sets(feature_specs, ds.feature_names);
  cfg.contents.clear();
  if (content_specs.empty()) {
    cfg.contents.push_back(peaqlab::ContentSelector::kAll);
  } else {
    for (const std::string& spec : content_specs) {
      cfg.contents.push_back(peaqlab::parse_content_selector(spec));
    }
  }

  const peaqlab::BootstrapReport report = peaqlab::bootstrap_run(ds, cfg);

  const json manifest = make_manifest(
      "bootstrap", {scores_path, features_path},
      {{"iterations", cfg.iterations},
       {"train_fraction", cfg.train_fraction},
       {"seed", cfg.seed},
       {"resample_train", cfg.resample_train},
       {"split_by_item", cfg.split_by_item},
       {"percentile_ci", cfg.percentile_ci}});
  json report_json = json::parse(report.to_json());
  report_json["manifest"] = manifest;
  peaqlab::write_file_atomic(out_json, report_json.dump(2) + "\n");
  if (!out_csv.empty()) {
    peaqlab::write_file_atomic(out_csv, manifest_comment(manifest) + report.to_table_csv());
  }
  std::cerr << "wrote " << report.rows.size() << " report rows to " << out_json << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::string& report_path) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) {
    throw peaqlab::Error(peaqlab::ErrorKind::kFileNotFound, "cannot open " + report_path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const peaqlab::BootstrapReport report =
      peaqlab::BootstrapReport::from_json(buf.str(), report_path);

  const std::size_t n_contents = report.contents.size();
  // Best single-feature row per column; multi-feature rows never get marked.
  std::vector<int> best_rp(n_contents, -1), best_aes(n_contents, -1);
  for (std::size_t c = 0; c < n_contents; ++c) {
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
      if (report.rows[r].features.size() != 1) continue;
      const peaqlab::BootstrapCell& cell = report.rows[r].cells[c];
      if (best_rp[c] < 0 ||
          cell.pearson_m.mean > report.rows[static_cast<std::size_t>(best_rp[c])].cells[c].pearson_m.mean) {
        best_rp[c] = static_cast<int>(r);
      }
      if (best_aes[c] < 0 ||
          cell.aes_m.mean < report.rows[static_cast<std::size_t>(best_aes[c])].cells[c].aes_m.mean) {
        best_aes[c] = static_cast<int>(r);
      }
    }
  }

  auto fmt_cell = [](const peaqlab::MeanCi& m, bool bold) {
    char buf2[64];
    std::snprintf(buf2, sizeof(buf2), "%.3f±%.3f", m.mean, m.ci95_half_width);
    std::string s(buf2);
    return bold ? "*" + s + "*" : " " + s + " ";
  };

  std::size_t label_width = std::string("feature set").size();
  for (const peaqlab::BootstrapRow& row : report.rows) {
    label_width = std::max(label_width, row.label.size());
  }
  std::ostringstream out;
  out << std::left;
  out.width(static_cast<std::streamsize>(label_width));
  out << "feature set";
  for (peaqlab::ContentSelector s : report.contents) {
    out << "  " << peaqlab::content_selector_name(s) << ": R_pm / AES_m";
  }
  out << "\n";
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    out.width(static_cast<std::streamsize>(label_width));
    out << report.rows[r].label;
    for (std::size_t c = 0; c < n_contents; ++c) {
      const peaqlab::BootstrapCell& cell = report.rows[r].cells[c];
      out << "  " << fmt_cell(cell.pearson_m, best_rp[c] == static_cast<int>(r)) << "/ "
          << fmt_cell(cell.aes_m, best_aes[c] == static_cast<int>(r));
    }
    out << "\n";
  }
  out << "(iterations " << report.config.iterations << ", train fraction "
      << report.config.train_fraction << ", seed " << report.config.seed
      << "; * marks the best single-feature value per column)\n";
  std::cout << out.str();
  return 0;
}

// ---------------------------------------------------------------------------
// ear-config

int cmd_ear_config(const std::string& out_path) {
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  if (out_path.empty()) {
    std::cout << cfg.to_json();
  } else {
    cfg.save(out_path);
    std::cerr << "wrote ear model config (version " << cfg.version << ", checksum "
              << cfg.checksum() << ") to " << out_path << "\n";
  }
  return 0;
}

void emit_error_record(const std::string& kind, const std::string& message) {
  json record = {{"error", kind}, {"message", message}};
  std::cerr << record.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peaqlab: disturbance-loudness audio quality toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // Shared option storage.
  std::string ref_path, test_path, out_path, out_csv, item_id, condition_id;
  std::string ear_config_path, content = "all", report_path, list_path;
  std::string scores_path, features_path;
  std::vector<std::string> feature_specs, content_specs;
  double level_dbspl = 0.0, max_lag_ms = 100.0;
  bool as_json = false;
  peaqlab::BootstrapConfig bs_cfg;
  peaqlab::MarsConfig mars_cfg;
  bool cubic = false;

  CLI::App* extract = app.add_subcommand("extract", "Extract MOV features from one WAV pair");
  extract->add_option("ref", ref_path, "Reference WAV")->required();
  extract->add_option("test", test_path, "Test WAV")->required();
  extract->add_option("-o,--out", out_path, "Output file (default stdout)");
  extract->add_flag("--json", as_json, "Emit JSON instead of CSV");
  extract->add_option("--item-id", item_id, "Item key (default: reference stem)");
  extract->add_option("--condition-id", condition_id, "Condition key (default: test stem)");
  extract->add_option("--ear-config", ear_config_path, "Ear model config JSON");
  extract->add_option("--level-dbspl", level_dbspl, "Playback level of a full-scale sine");
  extract->add_option("--max-lag-ms", max_lag_ms, "Alignment search range");

  CLI::App* batch = app.add_subcommand("batch-extract", "Extract MOVs for a CSV list of pairs");
  batch->add_option("list", list_path, "CSV with item_id,condition_id,ref_wav,test_wav")->required();
  batch->add_option("-o,--out", out_path, "features.csv output")->required();
  batch->add_option("--ear-config", ear_config_path, "Ear model config JSON");
  batch->add_option("--level-dbspl", level_dbspl, "Playback level of a full-scale sine");
  batch->add_option("--max-lag-ms", max_lag_ms, "Alignment search range");
  batch->add_option("--threads", bs_cfg.threads, "Worker threads (0 = all cores)");

  CLI::App* train = app.add_subcommand("train", "Fit the spline regression on a full dataset");
  train->add_option("scores", scores_path, "scores.csv")->required();
  train->add_option("features", features_path, "features.csv")->required();
  train->add_option("-o,--out", out_path, "Model JSON output")->required();
  train->add_option("--features-set,--feature", feature_specs,
                    "Feature names, '+'-joined or repeated (default: all)");
  train->add_option("--content", content, "music|speech|mixed|all");
  train->add_option("--max-terms", mars_cfg.max_terms, "Forward-pass basis budget");
  train->add_option("--max-interaction", mars_cfg.max_interaction, "Max hinge product degree");
  train->add_option("--penalty", mars_cfg.penalty, "GCV penalty per knot");
  train->add_flag("--cubic", cubic, "Piecewise-cubic smoothing after pruning");

  CLI::App* bootstrap = app.add_subcommand("bootstrap", "Bootstrap Monte Carlo evaluation");
  bootstrap->add_option("scores", scores_path, "scores.csv")->required();
  bootstrap->add_option("features", features_path, "features.csv")->required();
  bootstrap->add_option("-o,--out", out_path, "Report JSON output")->required();
  bootstrap->add_option("--out-csv", out_csv, "Optional table-shaped CSV output");
  bootstrap->add_option("--features-set,--feature", feature_specs,
                        "Feature set per row, '+'-joined (default: each feature alone)");
  bootstrap->add_option("--content", content_specs, "Content categories (repeatable)");
  bootstrap->add_option("--iterations", bs_cfg.iterations, "Bootstrap iterations");
  bootstrap->add_option("--seed", bs_cfg.seed, "Master RNG seed");
  bootstrap->add_option("--train-fraction", bs_cfg.train_fraction, "Training share");
  bootstrap->add_flag("--resample-train", bs_cfg.resample_train,
                      "Draw the training set with replacement from the train block");
  bootstrap->add_flag("--split-by-item", bs_cfg.split_by_item, "Partition items, not data points");
  bootstrap->add_flag("--percentile-ci", bs_cfg.percentile_ci, "Percentile CIs instead of normal");
  bootstrap->add_flag("--dump-raw", bs_cfg.dump_raw, "Keep per-iteration metrics in the JSON");
  bootstrap->add_option("--threads", bs_cfg.threads, "Worker threads (0 = all cores)");
  bootstrap->add_option("--max-terms", mars_cfg.max_terms, "Forward-pass basis budget");
  bootstrap->add_option("--max-interaction", mars_cfg.max_interaction, "Max hinge product degree");
  bootstrap->add_option("--penalty", mars_cfg.penalty, "GCV penalty per knot");
  bootstrap->add_flag("--cubic", cubic, "Piecewise-cubic smoothing after pruning");

  CLI::App* report = app.add_subcommand("report", "Render a bootstrap report as a table");
  report->add_option("report", report_path, "Report JSON")->required();

  CLI::App* earcfg = app.add_subcommand("ear-config", "Dump the built-in ear model config");
  earcfg->add_option("-o,--out", out_path, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  mars_cfg.mode = cubic ? peaqlab::MarsMode::kPiecewiseCubic : peaqlab::MarsMode::kPiecewiseLinear;
  bs_cfg.mars = mars_cfg;

  try {
    if (extract->parsed()) {
      return cmd_extract(ref_path, test_path, out_path, as_json, item_id, condition_id,
                         ear_config_path, level_dbspl, max_lag_ms);
    }
    if (batch->parsed()) {
      return cmd_batch_extract(list_path, out_path, ear_config_path, level_dbspl, max_lag_ms,
                               bs_cfg.threads);
    }
    if (train->parsed()) {
      return cmd_train(scores_path, features_path, out_path, feature_specs, content, mars_cfg);
    }
    if (bootstrap->parsed()) {
      return cmd_bootstrap(scores_path, features_path, out_path, out_csv, bs_cfg, feature_specs,
                           content_specs);
    }
    if (report->parsed()) {
      return cmd_report(report_path);
    }
    if (earcfg->parsed()) {
      return cmd_ear_config(out_path);
    }
  } catch (const peaqlab::Error& e) {
    emit_error_record(peaqlab::error_kind_name(e.kind()), e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error_record("Internal", e.what());
    return 1;
  }
  return 1;
}
