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

#include "peaqlab/earmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "peaqlab/csv.hpp"
#include "peaqlab/error.hpp"

namespace peaqlab {

namespace {

// Auditory pitch scale of the 40-band filterbank design: z = asinh(f / 650).
double pitch_of(double hz) { return std::asinh(hz / 650.0); }
double hz_of(double pitch) { return 650.0 * std::sinh(pitch); }

double outer_middle_ear_weight_db(double hz) {
  const double k = hz / 1000.0;
  return -0.6 * 3.64 * std::pow(k, -0.8) +
         6.5 * std::exp(-0.6 * (k - 3.3) * (k - 3.3)) - 1e-3 * std::pow(k, 3.6);
}

}  // namespace

EarModelConfig EarModelConfig::advanced_default() {
  EarModelConfig cfg;
  const double z_lo = pitch_of(50.0);
  const double z_hi = pitch_of(18000.0);
  const double dz = (z_hi - z_lo) / (cfg.band_count - 1);
  cfg.band_step_bark = dz;
  for (int k = 0; k < cfg.band_count; ++k) {
    const double z = z_lo + k * dz;
    const double fc = hz_of(z);
    cfg.band_centers.push_back(fc);
    // Band edge spacing on the pitch scale fixes the filter bandwidth; the
    // sin^2-window FIR matches it with N = 2 * fs / bw.
    const double bw = (hz_of(z + 0.5 * dz) - hz_of(z - 0.5 * dz));
    int len = 2 * static_cast<int>(std::lround(cfg.sample_rate / bw));
    cfg.filter_lengths.push_back(len);
    cfg.outer_middle_ear_db.push_back(outer_middle_ear_weight_db(fc));
    cfg.internal_noise.push_back(std::pow(10.0, 0.4 * 0.364 * std::pow(fc / 1000.0, -0.8)));
    cfg.forward_masking_tau.push_back(0.004 + (100.0 / fc) * (0.020 - 0.004));
    cfg.adaptation_tau.push_back(0.008 + (100.0 / fc) * (0.050 - 0.008));
    cfg.modulation_tau.push_back(0.008 + (100.0 / fc) * (0.050 - 0.008));
  }
  for (int i = 0; i < 12; ++i) {
    const double c = std::cos(M_PI * (i - 5.0) / 12.0);
    cfg.backmask_fir.push_back(c * c * 0.9761 / 6.0);
  }
  return cfg;
}

void EarModelConfig::validate() const {
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::kConfigMismatch, what);
  };
  const auto n = static_cast<std::size_t>(band_count);
  need(band_count > 0, "band_count must be positive");
  need(band_centers.size() == n, "band_centers length != band_count");
  need(filter_lengths.size() == n, "filter_lengths length != band_count");
  need(outer_middle_ear_db.size() == n, "outer_middle_ear_db length != band_count");
  need(internal_noise.size() == n, "internal_noise length != band_count");
  need(forward_masking_tau.size() == n, "forward_masking_tau length != band_count");
  need(adaptation_tau.size() == n, "adaptation_tau length != band_count");
  need(modulation_tau.size() == n, "modulation_tau length != band_count");
  for (std::size_t k = 0; k + 1 < n; ++k) {
    need(band_centers[k] < band_centers[k + 1], "band_centers must be strictly increasing");
  }
  for (std::size_t k = 0; k < n; ++k) {
    need(forward_masking_tau[k] > 0 && adaptation_tau[k] > 0 && modulation_tau[k] > 0,
         "time constants must be positive");
    need(internal_noise[k] > 0, "internal noise floor must be positive");
    need(filter_lengths[k] > 0 && filter_lengths[k] % 2 == 0, "filter lengths must be positive and even");
  }
  need(filterbank_hop > 0 && backmask_downsample > 0, "hops must be positive");
  need(!backmask_fir.empty(), "backward masking FIR missing");
  need(warmup_seconds >= 0, "warmup must be nonnegative");
  need(sample_rate > 0, "sample_rate must be positive");
}

namespace {

nlohmann::json params_to_json(const NoiseLoudnessParams& p) {
  return {{"alpha", p.alpha},
          {"mod_weight", p.mod_weight},
          {"offset", p.offset},
          {"clamp_min", p.clamp_min}};
}

NoiseLoudnessParams params_from_json(const nlohmann::json& j) {
  NoiseLoudnessParams p;
  p.alpha = j.at("alpha").get<double>();
  p.mod_weight = j.at("mod_weight").get<double>();
  p.offset = j.at("offset").get<double>();
  p.clamp_min = j.at("clamp_min").get<double>();
  return p;
}

nlohmann::json config_body(const EarModelConfig& c) {
  nlohmann::json j;
  j["version"] = c.version;
  j["sample_rate"] = c.sample_rate;
  j["band_count"] = c.band_count;
  j["band_centers"] = c.band_centers;
  j["filter_lengths"] = c.filter_lengths;
  j["outer_middle_ear_db"] = c.outer_middle_ear_db;
  j["internal_noise"] = c.internal_noise;
  j["forward_masking_tau"] = c.forward_masking_tau;
  j["adaptation_tau"] = c.adaptation_tau;
  j["modulation_tau"] = c.modulation_tau;
  j["band_step_bark"] = c.band_step_bark;
  j["spread_lower_slope"] = c.spread_lower_slope;
  j["spread_upper_base"] = c.spread_upper_base;
  j["spread_upper_freq_coef"] = c.spread_upper_freq_coef;
  j["spread_upper_level_coef"] = c.spread_upper_level_coef;
  j["spread_upper_slope_max"] = c.spread_upper_slope_max;
  j["filterbank_hop"] = c.filterbank_hop;
  j["backmask_downsample"] = c.backmask_downsample;
  j["backmask_fir"] = c.backmask_fir;
  j["loudness_exponent"] = c.loudness_exponent;
  j["loudness_scale"] = c.loudness_scale;
  j["nl_noise"] = params_to_json(c.nl_noise);
  j["nl_missing"] = params_to_json(c.nl_missing);
  j["nl_lindist"] = params_to_json(c.nl_lindist);
  j["asym_weight"] = c.asym_weight;
  j["pattern_smooth_radius"] = c.pattern_smooth_radius;
  j["warmup_seconds"] = c.warmup_seconds;
  j["default_playback_level_db_spl"] = c.default_playback_level_db_spl;
  return j;
}

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

uint64_t EarModelConfig::checksum() const { return fnv1a(config_body(*this).dump()); }

std::string EarModelConfig::to_json() const {
  nlohmann::json j = config_body(*this);
  j["checksum"] = checksum();
  return j.dump(2) + "\n";
}

EarModelConfig EarModelConfig::from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  EarModelConfig c;
  try {
    c.version = j.at("version").get<std::string>();
    c.sample_rate = j.at("sample_rate").get<int>();
    c.band_count = j.at("band_count").get<int>();
    c.band_centers = j.at("band_centers").get<std::vector<double>>();
    c.filter_lengths = j.at("filter_lengths").get<std::vector<int>>();
    c.outer_middle_ear_db = j.at("outer_middle_ear_db").get<std::vector<double>>();
    c.internal_noise = j.at("internal_noise").get<std::vector<double>>();
    c.forward_masking_tau = j.at("forward_masking_tau").get<std::vector<double>>();
    c.adaptation_tau = j.at("adaptation_tau").get<std::vector<double>>();
    c.modulation_tau = j.at("modulation_tau").get<std::vector<double>>();
    c.band_step_bark = j.at("band_step_bark").get<double>();
    c.spread_lower_slope = j.at("spread_lower_slope").get<double>();
    c.spread_upper_base = j.at("spread_upper_base").get<double>();
    c.spread_upper_freq_coef = j.at("spread_upper_freq_coef").get<double>();
    c.spread_upper_level_coef = j.at("spread_upper_level_coef").get<double>();
    c.spread_upper_slope_max = j.at("spread_upper_slope_max").get<double>();
    c.filterbank_hop = j.at("filterbank_hop").get<int>();
    c.backmask_downsample = j.at("backmask_downsample").get<int>();
    c.backmask_fir = j.at("backmask_fir").get<std::vector<double>>();
    c.loudness_exponent = j.at("loudness_exponent").get<double>();
    c.loudness_scale = j.at("loudness_scale").get<double>();
    c.nl_noise = params_from_json(j.at("nl_noise"));
    c.nl_missing = params_from_json(j.at("nl_missing"));
    c.nl_lindist = params_from_json(j.at("nl_lindist"));
    c.asym_weight = j.at("asym_weight").get<double>();
    c.pattern_smooth_radius = j.at("pattern_smooth_radius").get<int>();
    c.warmup_seconds = j.at("warmup_seconds").get<double>();
    c.default_playback_level_db_spl = j.at("default_playback_level_db_spl").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  if (j.contains("checksum")) {
    uint64_t declared = j.at("checksum").get<uint64_t>();
    if (declared != c.checksum()) {
      throw Error(ErrorKind::kChecksumMismatch,
                  origin + ": declared checksum does not match config contents");
    }
  }
  c.validate();
  return c;
}

EarModelConfig EarModelConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), path);
}

void EarModelConfig::save(const std::string& path) const { write_file_atomic(path, to_json()); }

int PatternSequence::first_frame_after(double seconds) const {
  return static_cast<int>(std::ceil(seconds * frame_rate));
}

namespace {

/// One signal through the peripheral stages. Produces excitation and
/// modulation, frames x bands.
void process_signal(const std::vector<double>& samples, double playback_db,
                    const EarModelConfig& cfg, int frames,
                    std::vector<double>& excitation, std::vector<double>& modulation) {
  const int bands = cfg.band_count;
  const int n0 = *std::max_element(cfg.filter_lengths.begin(), cfg.filter_lengths.end());
  const int hop = cfg.filterbank_hop;
  const int dsub = cfg.backmask_downsample;
  const int taps = static_cast<int>(cfg.backmask_fir.size());
  const int hops = frames * dsub + taps;

  // Playback scaling: a full-scale sine maps to playback_db dB SPL.
  const double scale = std::pow(10.0, playback_db / 20.0);
  std::vector<double> x(static_cast<std::size_t>(hops) * hop + n0 + 1, 0.0);
  for (std::size_t i = 0; i < samples.size() && i < x.size(); ++i) x[i] = samples[i] * scale;

  // Precompute filter coefficients: sin^2 window, complex carrier at fc,
  // outer/middle ear weighting folded in.
  std::vector<std::vector<double>> h_re(bands), h_im(bands);
  for (int k = 0; k < bands; ++k) {
    const int len = cfg.filter_lengths[k];
    const double fc = cfg.band_centers[k];
    const double wt = std::pow(10.0, cfg.outer_middle_ear_db[k] / 20.0);
    h_re[k].resize(len);
    h_im[k].resize(len);
    for (int n = 0; n < len; ++n) {
      const double win = 4.0 / len * std::sin(M_PI * n / len) * std::sin(M_PI * n / len) * wt;
      const double phi = 2.0 * M_PI * fc * (n - len / 2.0) / cfg.sample_rate;
      h_re[k][n] = win * std::cos(phi);
      h_im[k][n] = win * std::sin(phi);
    }
  }

  const double a_down = std::pow(10.0, cfg.band_step_bark * cfg.spread_lower_slope / 20.0);

  // Rectified band energies at the filterbank rate.
  std::vector<double> rectified(static_cast<std::size_t>(hops) * bands);
  std::vector<double> out_re(bands), out_im(bands), a_up(bands);
  for (int p = 0; p < hops; ++p) {
    const std::size_t base = static_cast<std::size_t>(p) * hop;
    for (int k = 0; k < bands; ++k) {
      const int len = cfg.filter_lengths[k];
      const int delay = (n0 - len) / 2;
      const double* xi = x.data() + base + delay;
      const double* re = h_re[k].data();
      const double* im = h_im[k].data();
      double acc_re = 0.0, acc_im = 0.0;
      for (int n = 0; n < len; ++n) {
        acc_re += xi[n] * re[n];
        acc_im += xi[n] * im[n];
      }
      out_re[k] = acc_re;
      out_im[k] = acc_im;
    }
    // Level-dependent upper slope per source band.
    for (int k = 0; k < bands; ++k) {
      const double e = out_re[k] * out_re[k] + out_im[k] * out_im[k];
      const double level_db = 10.0 * std::log10(std::max(e, 1e-12));
      double slope = cfg.spread_upper_base + cfg.spread_upper_freq_coef / cfg.band_centers[k] +
                     cfg.spread_upper_level_coef * level_db;
      slope = std::min(slope, cfg.spread_upper_slope_max);
      a_up[k] = std::pow(10.0, cfg.band_step_bark * slope / 20.0);
    }
    // Cascaded first-order spreading toward higher and lower bands.
    double acc_up_re = 0.0, acc_up_im = 0.0;
    std::vector<double>& rect_row = rectified;
    const std::size_t row = static_cast<std::size_t>(p) * bands;
    static thread_local std::vector<double> spread_re, spread_im;
    spread_re.assign(bands, 0.0);
    spread_im.assign(bands, 0.0);
    for (int k = 0; k < bands; ++k) {
      spread_re[k] = out_re[k] + acc_up_re;
      spread_im[k] = out_im[k] + acc_up_im;
      acc_up_re = (acc_up_re + out_re[k]) * a_up[k];
      acc_up_im = (acc_up_im + out_im[k]) * a_up[k];
    }
    double acc_dn_re = 0.0, acc_dn_im = 0.0;
    for (int k = bands - 1; k >= 0; --k) {
      spread_re[k] += acc_dn_re;
      spread_im[k] += acc_dn_im;
      acc_dn_re = (acc_dn_re + out_re[k]) * a_down;
      acc_dn_im = (acc_dn_im + out_im[k]) * a_down;
      rect_row[row + k] = spread_re[k] * spread_re[k] + spread_im[k] * spread_im[k];
    }
  }

  // Backward masking FIR + decimation, internal noise, forward masking,
  // modulation measure.
  excitation.assign(static_cast<std::size_t>(frames) * bands, 0.0);
  modulation.assign(static_cast<std::size_t>(frames) * bands, 0.0);
  const double frame_dt = static_cast<double>(cfg.frame_hop()) / cfg.sample_rate;
  const double frame_fs = 1.0 / frame_dt;
  std::vector<double> fwd_state(bands), mod_energy(bands), mod_deriv(bands), prev_pow(bands);
  for (int f = 0; f < frames; ++f) {
    for (int k = 0; k < bands; ++k) {
      double smeared = 0.0;
      for (int i = 0; i < taps; ++i) {
        smeared += cfg.backmask_fir[i] * rectified[static_cast<std::size_t>(f * dsub + i) * bands + k];
      }
      const double noisy = smeared + cfg.internal_noise[k];

      const double a_fwd = std::exp(-frame_dt / cfg.forward_masking_tau[k]);
      if (f == 0) {
        fwd_state[k] = noisy;
      } else {
        fwd_state[k] = a_fwd * fwd_state[k] + (1.0 - a_fwd) * noisy;
      }
      excitation[static_cast<std::size_t>(f) * bands + k] = std::max(fwd_state[k], noisy);

      const double powed = std::pow(noisy, 0.3);
      const double a_mod = std::exp(-frame_dt / cfg.modulation_tau[k]);
      if (f == 0) {
        mod_energy[k] = powed;
        mod_deriv[k] = 0.0;
      } else {
        mod_energy[k] = a_mod * mod_energy[k] + (1.0 - a_mod) * powed;
        mod_deriv[k] =
            a_mod * mod_deriv[k] + (1.0 - a_mod) * frame_fs * std::abs(powed - prev_pow[k]);
      }
      prev_pow[k] = powed;
      modulation[static_cast<std::size_t>(f) * bands + k] = mod_deriv[k] / (1.0 + mod_energy[k] / 0.3);
    }
  }
}

}  // namespace

PatternSequence excitation_stage(const AlignedPair& pair, const EarModelConfig& cfg) {
  cfg.validate();
  if (pair.reference.sample_rate != cfg.sample_rate || pair.test.sample_rate != cfg.sample_rate) {
    throw Error(ErrorKind::kConfigMismatch,
                "pair sample rate does not match the filterbank design rate of " +
                    std::to_string(cfg.sample_rate) + " Hz");
  }
  if (pair.reference.samples.size() != pair.test.samples.size()) {
    throw Error(ErrorKind::kShapeMismatch, "reference/test length mismatch after alignment");
  }

  PatternSequence seq;
  seq.bands = cfg.band_count;
  seq.frame_rate = cfg.frame_rate();
  const int frames = static_cast<int>(pair.reference.samples.size()) / cfg.frame_hop();
  if (frames <= 0) {
    throw Error(ErrorKind::kShapeMismatch, "signal shorter than one analysis frame");
  }
  seq.frames = frames;
  process_signal(pair.reference.samples, pair.playback_level_db_spl, cfg, frames, seq.e_ref,
                 seq.mod_ref);
  process_signal(pair.test.samples, pair.playback_level_db_spl, cfg, frames, seq.e_test,
                 seq.mod_test);
  return seq;
}

void adapt_patterns(PatternSequence& seq, const EarModelConfig& cfg) {
  const int bands = seq.bands;
  const int frames = seq.frames;
  if (bands != cfg.band_count) {
    throw Error(ErrorKind::kShapeMismatch, "pattern band count does not match config");
  }
  const std::size_t total = static_cast<std::size_t>(frames) * bands;
  if (seq.e_ref.size() != total || seq.e_test.size() != total) {
    throw Error(ErrorKind::kShapeMismatch, "excitation arrays have inconsistent shapes");
  }
  seq.e_ref_adapted.assign(total, 0.0);
  seq.e_test_adapted.assign(total, 0.0);
  seq.correction_factors.assign(total, 1.0);

  const double frame_dt = 1.0 / seq.frame_rate;
  std::vector<double> a(bands);
  for (int k = 0; k < bands; ++k) a[k] = std::exp(-frame_dt / cfg.adaptation_tau[k]);

  std::vector<double> p_ref(bands), p_test(bands);       // smoothed levels
  std::vector<double> rn(bands), rd(bands);               // pattern ratio statistics
  std::vector<double> c_ref(bands), c_test(bands);        // smoothed corrections
  std::vector<double> band_corr_ref(bands), band_corr_test(bands);
  const int radius = std::max(0, cfg.pattern_smooth_radius);

  for (int f = 0; f < frames; ++f) {
    const std::size_t row = static_cast<std::size_t>(f) * bands;
    // Level adaptation: smooth both patterns, then scale the louder signal
    // down by the global correlation gain.
    double num = 0.0, den = 0.0;
    for (int k = 0; k < bands; ++k) {
      const double er = seq.e_ref[row + k];
      const double et = seq.e_test[row + k];
      if (f == 0) {
        p_ref[k] = er;
        p_test[k] = et;
      } else {
        p_ref[k] = a[k] * p_ref[k] + (1.0 - a[k]) * er;
        p_test[k] = a[k] * p_test[k] + (1.0 - a[k]) * et;
      }
      num += std::sqrt(p_ref[k] * p_test[k]);
      den += p_test[k];
    }
    const double lev_corr = den > 0.0 ? (num * num) / (den * den) : 1.0;

    for (int k = 0; k < bands; ++k) {
      double el_ref = seq.e_ref[row + k];
      double el_test = seq.e_test[row + k];
      if (lev_corr > 1.0) {
        el_ref /= lev_corr;
      } else {
        el_test *= lev_corr;
      }
      // Pattern ratio between the level-adapted signals, time smoothed.
      if (f == 0) {
        rn[k] = el_test * el_ref;
        rd[k] = el_ref * el_ref;
      } else {
        rn[k] = a[k] * rn[k] + el_test * el_ref;
        rd[k] = a[k] * rd[k] + el_ref * el_ref;
      }
      const double ratio = rd[k] > 0.0 ? rn[k] / rd[k] : 1.0;
      seq.correction_factors[row + k] = ratio;
      if (ratio >= 1.0) {
        band_corr_ref[k] = 1.0;
        band_corr_test[k] = 1.0 / ratio;
      } else {
        band_corr_ref[k] = ratio;
        band_corr_test[k] = 1.0;
      }
      // Stash the level-adapted excitations in the output arrays; the
      // correction factors get applied after band smoothing below.
      seq.e_ref_adapted[row + k] = el_ref;
      seq.e_test_adapted[row + k] = el_test;
    }

    for (int k = 0; k < bands; ++k) {
      const int lo = std::max(0, k - radius);
      const int hi = std::min(bands - 1, k + radius);
      double sum_ref = 0.0, sum_test = 0.0;
      for (int j = lo; j <= hi; ++j) {
        sum_ref += band_corr_ref[j];
        sum_test += band_corr_test[j];
      }
      const double corr_ref = sum_ref / (hi - lo + 1);
      const double corr_test = sum_test / (hi - lo + 1);
      if (f == 0) {
        c_ref[k] = corr_ref;
        c_test[k] = corr_test;
      } else {
        c_ref[k] = a[k] * c_ref[k] + (1.0 - a[k]) * corr_ref;
        c_test[k] = a[k] * c_test[k] + (1.0 - a[k]) * corr_test;
      }
      seq.e_ref_adapted[row + k] *= c_ref[k];
      seq.e_test_adapted[row + k] *= c_test[k];
    }
  }
}

PatternSequence compute_patterns(const AlignedPair& pair, const EarModelConfig& cfg) {
  PatternSequence seq = excitation_stage(pair, cfg);
  adapt_patterns(seq, cfg);
  return seq;
}

}  // namespace peaqlab
