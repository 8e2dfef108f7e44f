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

#ifndef PEAQLAB_AUDIO_HPP_
#define PEAQLAB_AUDIO_HPP_

#include <string>
#include <vector>

namespace peaqlab {

inline constexpr int kTargetSampleRate = 48000;

struct Signal {
  std::vector<double> samples;  // mono PCM in [-1, 1]
  int sample_rate = kTargetSampleRate;
  int channel_count = 1;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct AlignConfig {
  double max_lag_ms = 100.0;
  double playback_level_db_spl = 92.0;  // level assigned to a full-scale sine
};

struct AlignedPair {
  Signal reference;
  Signal test;
  int lag_samples = 0;       // positive: test lagged behind the reference
  double gain_applied = 1.0; // linear gain applied to the test signal
  double playback_level_db_spl = 92.0;
};

/// Reads a RIFF/WAVE file (16/24-bit PCM or float32). Stereo content is
/// downmixed to mono by averaging; `warned` (if non-null) reports that case.
Signal load_wav(const std::string& path, bool* downmix_warning = nullptr);

void write_wav(const std::string& path, const Signal& signal);

/// Band-limited rational resampling to `target_rate`. Passthrough when the
/// rates already match.
Signal resample(const Signal& signal, int target_rate);

/// Mono, 48 kHz, zero-mean: the operating point expected by the ear model.
Signal condition(const Signal& signal);

/// Global single-lag alignment by normalized cross-correlation, plus RMS gain
/// matching of the test signal against the reference.
AlignedPair align_pair(const Signal& reference, const Signal& test,
                       const AlignConfig& config = {});

}  // namespace peaqlab

#endif  // PEAQLAB_AUDIO_HPP_
