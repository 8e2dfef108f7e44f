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

#ifndef PEAQLAB_MOV_HPP_
#define PEAQLAB_MOV_HPP_

#include <span>
#include <vector>

#include "peaqlab/earmodel.hpp"

namespace peaqlab {

/// The three per-frame disturbance-loudness comparisons.
struct FrameLoudness {
  double noise_loudness = 0.0;     // additive disturbances
  double missing_loudness = 0.0;   // missing components
  double lin_dist_loudness = 0.0;  // what pattern adaptation removed
};

struct MovVector {
  double rms_noise_loudness = 0.0;     // RmsNoiseLoudness_A
  double rms_missing_components = 0.0; // RmsMissingComponents
  double avg_lin_dist = 0.0;           // AvgLinDist_A
  double rms_noise_loud_asym = 0.0;    // RmsNoiseLoudness_A + w * RmsMissingComponents
};

inline constexpr const char* kMovNames[] = {
    "RmsNoiseLoudness_A",
    "RmsMissingComponents",
    "AvgLinDist_A",
    "RmsNoiseLoudAsym_A",
};

/// Partial loudness of the components of pattern `b` exceeding pattern `a`,
/// one value per frame. All four patterns are frames x bands.
std::vector<double> partial_noise_loudness(std::span<const double> e_a,
                                           std::span<const double> e_b,
                                           std::span<const double> mod_a,
                                           std::span<const double> mod_b,
                                           int bands,
                                           const NoiseLoudnessParams& params,
                                           const EarModelConfig& cfg);

/// The three comparisons over a fully adapted pattern sequence.
std::vector<FrameLoudness> frame_loudness(const PatternSequence& seq, const EarModelConfig& cfg);

/// Pools per-frame loudness into MOVs: RMS for the noise/missing channels,
/// linear mean for the linear-distortion channel. `warmup_frames` leading
/// frames are excluded.
MovVector pool(const std::vector<FrameLoudness>& frames, int warmup_frames,
               double asym_weight = 0.5);

/// Full pipeline: condition, align, ear model, comparisons, pooling.
MovVector extract_movs(const Signal& reference, const Signal& test, const EarModelConfig& cfg,
                       const AlignConfig& align_cfg = {});

}  // namespace peaqlab

#endif  // PEAQLAB_MOV_HPP_
