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

#include "peaqlab/mov.hpp"

#include <algorithm>
#include <cmath>

#include "peaqlab/error.hpp"

namespace peaqlab {

std::vector<double> partial_noise_loudness(std::span<const double> e_a,
                                           std::span<const double> e_b,
                                           std::span<const double> mod_a,
                                           std::span<const double> mod_b,
                                           int bands,
                                           const NoiseLoudnessParams& params,
                                           const EarModelConfig& cfg) {
  if (e_a.size() != e_b.size() || e_a.size() != mod_a.size() || e_a.size() != mod_b.size() ||
      bands <= 0 || e_a.size() % static_cast<std::size_t>(bands) != 0) {
    throw Error(ErrorKind::kShapeMismatch, "partial_noise_loudness: pattern shapes disagree");
  }
  const std::size_t frames = e_a.size() / static_cast<std::size_t>(bands);
  const double exponent = cfg.loudness_exponent;
  const double scale = cfg.loudness_scale / cfg.band_count;
  std::vector<double> out(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t row = f * static_cast<std::size_t>(bands);
    double loudness = 0.0;
    for (int k = 0; k < bands; ++k) {
      const double s_a = params.mod_weight * mod_a[row + k] + params.offset;
      const double s_b = params.mod_weight * mod_b[row + k] + params.offset;
      const double thres = cfg.internal_noise[k];
      const double ea = e_a[row + k];
      const double eb = e_b[row + k];
      const double beta = std::exp(-params.alpha * (eb - ea) / ea);
      loudness += std::pow(thres / s_b, exponent) *
                  (std::pow(1.0 + std::max(s_b * eb - s_a * ea, 0.0) / (thres + s_a * ea * beta),
                            exponent) -
                   1.0);
    }
    loudness *= scale;
    out[f] = loudness < params.clamp_min ? 0.0 : loudness;
  }
  return out;
}

std::vector<FrameLoudness> frame_loudness(const PatternSequence& seq, const EarModelConfig& cfg) {
  const std::size_t total = static_cast<std::size_t>(seq.frames) * seq.bands;
  if (seq.e_ref_adapted.size() != total || seq.e_test_adapted.size() != total) {
    throw Error(ErrorKind::kShapeMismatch, "frame_loudness: sequence lacks adapted patterns");
  }
  auto noise = partial_noise_loudness(seq.e_ref_adapted, seq.e_test_adapted, seq.mod_ref,
                                      seq.mod_test, seq.bands, cfg.nl_noise, cfg);
  auto missing = partial_noise_loudness(seq.e_test_adapted, seq.e_ref_adapted, seq.mod_test,
                                        seq.mod_ref, seq.bands, cfg.nl_missing, cfg);
  auto lin_dist = partial_noise_loudness(seq.e_ref_adapted, seq.e_ref, seq.mod_ref, seq.mod_ref,
                                         seq.bands, cfg.nl_lindist, cfg);
  std::vector<FrameLoudness> out(noise.size());
  for (std::size_t f = 0; f < noise.size(); ++f) {
    out[f] = {noise[f], missing[f], lin_dist[f]};
  }
  return out;
}

MovVector pool(const std::vector<FrameLoudness>& frames, int warmup_frames, double asym_weight) {
  if (warmup_frames < 0) warmup_frames = 0;
  const std::size_t begin = static_cast<std::size_t>(warmup_frames);
  if (begin >= frames.size()) {
    throw Error(ErrorKind::kEmptyAfterWarmup,
                "no frames left after excluding " + std::to_string(warmup_frames) +
                    " warmup frames of " + std::to_string(frames.size()));
  }
  const double n = static_cast<double>(frames.size() - begin);
  double sq_noise = 0.0, sq_missing = 0.0, sum_lin = 0.0;
  for (std::size_t f = begin; f < frames.size(); ++f) {
    sq_noise += frames[f].noise_loudness * frames[f].noise_loudness;
    sq_missing += frames[f].missing_loudness * frames[f].missing_loudness;
    sum_lin += frames[f].lin_dist_loudness;
  }
  MovVector mov;
  mov.rms_noise_loudness = std::sqrt(sq_noise / n);
  mov.rms_missing_components = std::sqrt(sq_missing / n);
  mov.avg_lin_dist = sum_lin / n;
  mov.rms_noise_loud_asym = mov.rms_noise_loudness + asym_weight * mov.rms_missing_components;
  return mov;
}

MovVector extract_movs(const Signal& reference, const Signal& test, const EarModelConfig& cfg,
                       const AlignConfig& align_cfg) {
  Signal ref_c = condition(reference);
  Signal test_c = condition(test);
  AlignedPair pair = align_pair(ref_c, test_c, align_cfg);
  PatternSequence seq = compute_patterns(pair, cfg);
  auto frames = frame_loudness(seq, cfg);
  return pool(frames, seq.first_frame_after(cfg.warmup_seconds), cfg.asym_weight);
}

}  // namespace peaqlab
