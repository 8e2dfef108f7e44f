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

#ifndef PEAQLAB_EARMODEL_HPP_
#define PEAQLAB_EARMODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "peaqlab/audio.hpp"

namespace peaqlab {

/// Constants of one partial disturbance-loudness comparison.
struct NoiseLoudnessParams {
  double alpha = 1.5;       // masking asymmetry steepness
  double mod_weight = 0.15; // modulation contribution to the masking threshold factor
  double offset = 1.0;      // threshold factor offset
  double clamp_min = 0.0;   // per-frame values below this collapse to zero
};

/// Every numeric constant of the filterbank ear model. The shipped defaults
/// follow the 40-band filterbank design of ITU-R BS.1387 (advanced version);
/// all of them can be retuned through a config file.
struct EarModelConfig {
  std::string version = "fb40-advanced/1";
  int sample_rate = 48000;
  int band_count = 40;

  std::vector<double> band_centers;        // Hz, strictly increasing
  std::vector<int> filter_lengths;         // FIR taps per band, even
  std::vector<double> outer_middle_ear_db; // weighting folded into the filters
  std::vector<double> internal_noise;      // linear power floor per band
  std::vector<double> forward_masking_tau; // seconds per band
  std::vector<double> adaptation_tau;      // seconds per band (level/pattern)
  std::vector<double> modulation_tau;      // seconds per band

  // Frequency-domain spreading. Slopes in dB per Bark; the upper slope is
  // level dependent: s_u = upper_base + upper_freq_coef / fc + upper_level_coef * L.
  double band_step_bark = 0.0;
  double spread_lower_slope = -31.0;
  double spread_upper_base = -24.0;
  double spread_upper_freq_coef = -230.0;
  double spread_upper_level_coef = 0.2;
  double spread_upper_slope_max = -1.0;

  int filterbank_hop = 32;     // samples between filterbank evaluations
  int backmask_downsample = 6; // additional decimation by the backward-masking FIR
  std::vector<double> backmask_fir;

  // Disturbance-loudness constants ("nl"): exponent and the per-comparison
  // parameter sets, plus the asymmetry weight of the combined MOV.
  double loudness_exponent = 0.23;
  double loudness_scale = 24.0;  // total-loudness normalization (x scale/bands)
  NoiseLoudnessParams nl_noise{2.5, 0.3, 1.0, 0.1};
  NoiseLoudnessParams nl_missing{1.5, 0.15, 1.0, 0.0};
  NoiseLoudnessParams nl_lindist{1.5, 0.15, 1.0, 0.0};
  double asym_weight = 0.5;

  int pattern_smooth_radius = 1;  // band neighborhood of the pattern correction
  double warmup_seconds = 0.5;    // frames excluded from MOV pooling
  double default_playback_level_db_spl = 92.0;

  int frame_hop() const { return filterbank_hop * backmask_downsample; }
  double frame_rate() const { return static_cast<double>(sample_rate) / frame_hop(); }

  /// Full 40-band configuration derived from the BS.1387 advanced filterbank
  /// design rules.
  static EarModelConfig advanced_default();

  void validate() const;  // throws ConfigMismatch on broken invariants
  uint64_t checksum() const;

  std::string to_json() const;
  static EarModelConfig from_json(const std::string& text, const std::string& origin);
  static EarModelConfig load(const std::string& path);
  void save(const std::string& path) const;
};

/// Per-frame, per-band internal representations of an aligned pair. All
/// arrays are frames x bands, row-major.
struct PatternSequence {
  int frames = 0;
  int bands = 0;
  double frame_rate = 0.0;

  std::vector<double> e_ref, e_test;           // excitation patterns
  std::vector<double> mod_ref, mod_test;       // modulation measures
  std::vector<double> e_ref_adapted, e_test_adapted;
  std::vector<double> correction_factors;      // raw per-band pattern ratios

  double& at(std::vector<double>& a, int frame, int band) {
    return a[static_cast<std::size_t>(frame) * bands + band];
  }
  double at(const std::vector<double>& a, int frame, int band) const {
    return a[static_cast<std::size_t>(frame) * bands + band];
  }
  double timestamp(int frame) const { return frame / frame_rate; }
  int first_frame_after(double seconds) const;
};

/// Peripheral ear model: filterbank, spreading, rectification, backward and
/// forward masking, internal noise; plus the per-band modulation measure.
/// Fills e_* and mod_* of the returned sequence.
PatternSequence excitation_stage(const AlignedPair& pair, const EarModelConfig& config);

/// Level and pattern adaptation; fills e_ref_adapted / e_test_adapted /
/// correction_factors from e_ref / e_test.
void adapt_patterns(PatternSequence& seq, const EarModelConfig& config);

/// excitation_stage + adapt_patterns.
PatternSequence compute_patterns(const AlignedPair& pair, const EarModelConfig& config);

}  // namespace peaqlab

#endif  // PEAQLAB_EARMODEL_HPP_
