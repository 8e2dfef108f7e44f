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

// Acceptance suite: one pass/fail line per criterion. Criterion 8 needs
// user-supplied listening-test data and is skipped when that data is absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "peaqlab/ann.hpp"
#include "peaqlab/audio.hpp"
#include "peaqlab/bootstrap.hpp"
#include "peaqlab/dataset.hpp"
#include "peaqlab/earmodel.hpp"
#include "peaqlab/error.hpp"
#include "peaqlab/mars.hpp"
#include "peaqlab/mov.hpp"
#include "peaqlab/stats.hpp"

using namespace peaqlab;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

Outcome pass(std::string detail) { return {true, false, std::move(detail)}; }
Outcome fail(std::string detail) { return {false, false, std::move(detail)}; }
Outcome skip(std::string detail) { return {false, true, std::move(detail)}; }

Signal make_noise(double amplitude, double seconds, std::uint64_t seed) {
  Signal s;
  s.sample_rate = 48000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  s.samples.resize(static_cast<std::size_t>(seconds * 48000));
  for (double& v : s.samples) v = dist(rng);
  return s;
}

// Amplitude-modulated noise bursts: a non-stationary reference, so slow
// pattern adaptation cannot fully equalize a static spectral change.
Signal make_bursty_reference(double seconds, std::uint64_t seed) {
  Signal s = make_noise(0.35, seconds, seed);
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const double t = static_cast<double>(i) / s.sample_rate;
    const double env = 0.15 + 0.85 * std::pow(std::sin(2.0 * std::numbers::pi * 2.0 * t), 2.0);
    s.samples[i] *= env;
  }
  return s;
}

Signal brickwall_lowpass(const Signal& in, double cutoff_hz) {
  // Windowed-sinc FIR; steep enough for a clear bandwidth contrast.
  const int half = 256;
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  const double fc = cutoff_hz / in.sample_rate;
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * i / (half + 1.0));
    const double x = 2.0 * std::numbers::pi * fc * i;
    h[static_cast<std::size_t>(i + half)] = w * (i == 0 ? 2.0 * fc : std::sin(x) / (std::numbers::pi * i));
    sum += h[static_cast<std::size_t>(i + half)];
  }
  for (double& v : h) v /= sum;
  Signal out;
  out.sample_rate = in.sample_rate;
  out.samples.assign(in.samples.size(), 0.0);
  for (std::size_t n = 0; n < in.samples.size(); ++n) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) {
      const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(n) + k;
      if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(in.samples.size())) {
        acc += h[static_cast<std::size_t>(k + half)] * in.samples[static_cast<std::size_t>(idx)];
      }
    }
    out.samples[n] = acc;
  }
  return out;
}

// --------------------------------------------------------------------------

Outcome criterion1_identity() {
  const double t0 = now_seconds();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(0.0, 20.0);
  std::uniform_int_distribution<int> len(1, 80);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<FrameLoudness> frames(static_cast<std::size_t>(len(rng)));
    for (FrameLoudness& f : frames) {
      f.noise_loudness = dist(rng);
      f.missing_loudness = dist(rng);
      f.lin_dist_loudness = dist(rng);
    }
    const MovVector mov = pool(frames, 0);
    if (mov.rms_noise_loud_asym != mov.rms_noise_loudness + 0.5 * mov.rms_missing_components) {
      return fail("identity broke at trial " + std::to_string(trial));
    }
  }
  const double elapsed = now_seconds() - t0;
  if (elapsed >= 1.0) return fail("took " + std::to_string(elapsed) + " s (budget 1 s)");
  std::ostringstream msg;
  msg << "1000 fixtures bit-exact in " << elapsed << " s";
  return pass(msg.str());
}

Outcome criterion2_null_pair() {
  const double t0 = now_seconds();
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const Signal ref = make_bursty_reference(10.0, 21);
  const MovVector mov = extract_movs(ref, ref, cfg);
  const double elapsed = now_seconds() - t0;
  std::ostringstream msg;
  msg << "MOVs (" << mov.rms_noise_loudness << ", " << mov.rms_missing_components << ", "
      << mov.avg_lin_dist << ", " << mov.rms_noise_loud_asym << ") in " << elapsed << " s";
  if (mov.rms_noise_loudness > 1e-6 || mov.rms_missing_components > 1e-6 ||
      mov.avg_lin_dist > 1e-6 || mov.rms_noise_loud_asym > 1e-6) {
    return fail("null pair not silent: " + msg.str());
  }
  if (elapsed >= 30.0) return fail("took " + std::to_string(elapsed) + " s (budget 30 s)");
  return pass(msg.str());
}

Outcome criterion3_monotonicity() {
  const double t0 = now_seconds();
  const EarModelConfig cfg = EarModelConfig::advanced_default();
  const Signal ref = make_bursty_reference(2.5, 33);

  std::vector<double> noise_movs;
  for (double dbfs : {-60.0, -50.0, -40.0, -30.0}) {
    Signal noisy = ref;
    std::mt19937_64 rng(7);  // same noise realization at every gain
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double gain = std::pow(10.0, dbfs / 20.0);
    for (double& v : noisy.samples) v += gain * dist(rng);
    noise_movs.push_back(extract_movs(ref, noisy, cfg).rms_noise_loudness);
  }
  for (std::size_t i = 1; i < noise_movs.size(); ++i) {
    if (!(noise_movs[i] >= noise_movs[i - 1])) {
      std::ostringstream msg;
      msg << "noise MOV not nondecreasing: " << noise_movs[i - 1] << " -> " << noise_movs[i];
      return fail(msg.str());
    }
  }

  std::vector<double> missing_movs;
  for (double cutoff : {12000.0, 7500.0, 3500.0}) {
    missing_movs.push_back(
        extract_movs(ref, brickwall_lowpass(ref, cutoff), cfg).rms_missing_components);
  }
  for (std::size_t i = 1; i < missing_movs.size(); ++i) {
    if (!(missing_movs[i] >= missing_movs[i - 1])) {
      std::ostringstream msg;
      msg << "missing MOV not nondecreasing: " << missing_movs[i - 1] << " -> "
          << missing_movs[i];
      return fail(msg.str());
    }
  }
  const double elapsed = now_seconds() - t0;
  if (elapsed >= 120.0) return fail("took " + std::to_string(elapsed) + " s (budget 120 s)");
  std::ostringstream msg;
  msg << "noise MOVs [" << noise_movs[0] << ".." << noise_movs[3] << "], missing MOVs ["
      << missing_movs[0] << ".." << missing_movs[2] << "] in " << elapsed << " s";
  return pass(msg.str());
}

Outcome criterion4_mars_oracle() {
  // Hand value: 2.5 / (10 * (1 - 1/10)^2) = 2.5 / 8.1 = 0.308642 (6 digits).
  if (std::abs(gcv(2.5, 10, 1, 3.0) - 2.5 / 8.1) > 1e-9 ||
      std::abs(gcv(2.5, 10, 1, 3.0) - 0.308642) > 1e-6) {
    return fail("GCV hand value mismatch: " + std::to_string(gcv(2.5, 10, 1, 3.0)));
  }
  std::vector<double> x, y;
  for (double v = 0.0; v <= 6.0 + 1e-9; v += 0.5) {
    x.push_back(v);
    y.push_back(std::max(0.0, v - 3.0));
  }
  const MarsModel model = mars_fit(x, static_cast<int>(x.size()), 1, y, {"f"});
  const std::vector<double> pred = mars_predict_rows(model, x, static_cast<int>(x.size()), 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += (pred[i] - y[i]) * (pred[i] - y[i]);
  const double rmse = std::sqrt(acc / static_cast<double>(y.size()));
  if (rmse >= 1e-6) return fail("hinge recovery RMSE " + std::to_string(rmse));
  bool adjacent = false;
  for (const BasisTerm& term : model.terms) {
    for (const Hinge& h : term.hinges) {
      if (std::abs(h.knot - 3.0) <= 0.5 + 1e-9) adjacent = true;
    }
  }
  if (!adjacent) return fail("no knot adjacent to the bend at 3");
  std::ostringstream msg;
  msg << "RMSE " << rmse << ", knot adjacent to 3, GCV oracle matches";
  return pass(msg.str());
}

Outcome criterion5_metric_oracles() {
  if (std::abs(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) - 0.8) >
      1e-12) {
    return fail("pearson oracle");
  }
  if (std::abs(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 1, 2, 3}) -
               0.948683) > 1e-6) {
    return fail("spearman tied oracle");
  }
  const double a = aes(std::vector<double>{12, 24}, std::vector<double>{10, 20},
                       std::vector<double>{2, 2});
  if (std::abs(a - 1.581139) > 1e-6) return fail("aes oracle");
  const double half = aes(std::vector<double>{12, 24}, std::vector<double>{10, 20},
                          std::vector<double>{4, 4});
  if (half != a / 2.0) return fail("aes CI scale covariance");
  return pass("pearson 0.8, spearman 0.948683, aes 1.581139, scale covariance exact");
}

Dataset make_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 3.0);
  std::uniform_real_distribution<double> junk(0.0, 10.0);
  Dataset ds;
  ds.feature_names = {"informative", "junk"};
  const ContentType kinds[] = {ContentType::kMusic, ContentType::kSpeech, ContentType::kMixed};
  for (int item = 0; item < 27; ++item) {
    for (int cond = 0; cond < 12; ++cond) {
      DatasetRow row;
      row.score.item_id = "item" + std::to_string(item);
      row.score.condition_id = "c" + std::to_string(cond);
      row.score.content_type = kinds[item / 9];
      row.score.mushra_mean = std::clamp(15.0 + 6.5 * cond + jitter(rng), 0.0, 100.0);
      row.score.ci95_half_width = 2.0 + 0.1 * cond;
      row.features = {row.score.mushra_mean + jitter(rng), junk(rng)};
      ds.rows.push_back(std::move(row));
    }
  }
  return ds;
}

Outcome criterion6_bootstrap_protocol() {
  const Dataset ds = make_fixture(101);
  BootstrapConfig cfg;
  cfg.iterations = 50;
  cfg.seed = 11;
  cfg.dump_raw = true;
  const BootstrapCell probe = bootstrap_cell(ds, {"informative"}, cfg);
  if (probe.n_train != 259 || probe.n_test != 65) {
    return fail("split sizes " + std::to_string(probe.n_train) + "/" +
                std::to_string(probe.n_test));
  }
  for (const MetricsReport& m : probe.raw) {
    if (m.n_points != 65) return fail("iteration with test size " + std::to_string(m.n_points));
  }

  BootstrapConfig det = cfg;
  det.iterations = 100;
  det.dump_raw = false;
  det.feature_sets = {{"informative", "junk"}};
  det.threads = 1;
  const std::string run1 = bootstrap_run(ds, det).to_json();
  const std::string run2 = bootstrap_run(ds, det).to_json();
  det.threads = 4;
  const std::string run3 = bootstrap_run(ds, det).to_json();
  if (run1 != run2) return fail("same-seed reruns differ");
  if (run1 != run3) return fail("thread count changes the report");

  BootstrapConfig timed = det;
  timed.iterations = 2000;
  timed.threads = 0;  // all cores
  const double t0 = now_seconds();
  bootstrap_run(ds, timed);
  const double elapsed = now_seconds() - t0;
  if (elapsed >= 60.0) return fail("N=2000 took " + std::to_string(elapsed) + " s (budget 60 s)");
  std::ostringstream msg;
  msg << "splits 259/65, byte-identical across runs and threads, N=2000 in " << elapsed << " s";
  return pass(msg.str());
}

Outcome criterion7_discrimination() {
  const Dataset ds = make_fixture(102);
  BootstrapConfig cfg;
  cfg.iterations = 500;
  cfg.seed = 23;
  cfg.feature_sets = {{"informative"}, {"junk"}};
  const BootstrapReport report = bootstrap_run(ds, cfg);
  const BootstrapCell& good = report.rows[0].cells[0];
  const BootstrapCell& bad = report.rows[1].cells[0];
  const bool rp_separated = good.pearson_m.mean - good.pearson_m.ci95_half_width >
                            bad.pearson_m.mean + bad.pearson_m.ci95_half_width;
  const bool aes_separated = good.aes_m.mean + good.aes_m.ci95_half_width <
                             bad.aes_m.mean - bad.aes_m.ci95_half_width;
  std::ostringstream msg;
  msg << "R_pm " << good.pearson_m.mean << "±" << good.pearson_m.ci95_half_width << " vs "
      << bad.pearson_m.mean << "±" << bad.pearson_m.ci95_half_width << "; AES_m "
      << good.aes_m.mean << "±" << good.aes_m.ci95_half_width << " vs " << bad.aes_m.mean
      << "±" << bad.aes_m.ci95_half_width;
  if (!rp_separated || !aes_separated) return fail("intervals overlap: " + msg.str());
  return pass(msg.str());
}

Outcome criterion8_user_database() {
  // Looks for user-supplied listening-test data:
  //   $PEAQLAB_USER_DATA/scores.csv    (324 rows)
  //   $PEAQLAB_USER_DATA/features.csv  (the four loudness MOVs per pair)
  //   $PEAQLAB_USER_DATA/ann.json      (reference ANN weights)
  const char* dir = std::getenv("PEAQLAB_USER_DATA");
  std::filesystem::path base;
  if (dir != nullptr) {
    base = dir;
  } else {
    base = std::filesystem::path(PEAQLAB_DATA_DIR) / "user";
  }
  const auto scores_path = base / "scores.csv";
  const auto features_path = base / "features.csv";
  const auto ann_path = base / "ann.json";
  if (!std::filesystem::exists(scores_path) || !std::filesystem::exists(features_path) ||
      !std::filesystem::exists(ann_path)) {
    return skip("user data not present under " + base.string());
  }

  const auto scores = load_scores(scores_path.string());
  const auto features = load_features(features_path.string());
  Dataset ds = join_features(scores, features);
  const AnnMapping ann = AnnMapping::load(ann_path.string());

  // Append the reference mapping's condensed index as a feature column.
  std::vector<int> cols;
  for (const std::string& name : ann.input_names) {
    const int idx = ds.feature_index(name);
    if (idx < 0) return fail("feature table lacks ANN input '" + name + "'");
    cols.push_back(idx);
  }
  ds.feature_names.push_back("PEAQ_DI");
  for (DatasetRow& row : ds.rows) {
    std::vector<double> input;
    for (int c : cols) input.push_back(row.features[static_cast<std::size_t>(c)]);
    row.features.push_back(apply_reference_ann(input, ann).di);
  }

  BootstrapConfig cfg;
  cfg.iterations = 2000;
  cfg.seed = 1;
  cfg.threads = 0;
  cfg.feature_sets = {std::vector<std::string>(ds.feature_names.begin(),
                                               ds.feature_names.end() - 1),
                      {"PEAQ_DI"}};
  const BootstrapReport report = bootstrap_run(ds, cfg);
  const double retrained = report.rows[0].cells[0].pearson_m.mean;
  const double reference = report.rows[1].cells[0].pearson_m.mean;
  std::ostringstream msg;
  msg << "retrained multi-feature R_pm " << retrained << " vs reference index R_pm "
      << reference;
  if (retrained <= reference) return fail("ordering not reproduced: " + msg.str());
  return pass(msg.str());
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"combined-MOV identity over randomized frame fixtures", criterion1_identity},
      {"null pair yields silent MOVs", criterion2_null_pair},
      {"disturbance monotonicity in noise level and bandwidth", criterion3_monotonicity},
      {"spline regression and GCV oracles", criterion4_mars_oracle},
      {"correlation and error-score oracles", criterion5_metric_oracles},
      {"bootstrap split, determinism, and runtime budget", criterion6_bootstrap_protocol},
      {"informative vs noise feature discrimination", criterion7_discrimination},
      {"user-database qualitative ordering (conditional)", criterion8_user_database},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.skipped ? "[SKIP]" : (outcome.pass ? "[PASS]" : "[FAIL]");
    std::cout << tag << " criterion " << index << ": " << c.name << " — " << outcome.detail
              << "\n";
    if (!outcome.pass && !outcome.skipped) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
