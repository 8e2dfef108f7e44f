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

#ifndef PEAQLAB_ANN_HPP_
#define PEAQLAB_ANN_HPP_

#include <span>
#include <string>
#include <vector>

namespace peaqlab {

/// Reference one-hidden-layer mapping from MOVs to DI/ODG. The weights are
/// user supplied (the standard's tables are not shipped); the repo carries
/// only the schema and a synthetic test fixture.
struct AnnMapping {
  std::vector<std::string> input_names;
  std::vector<double> input_min, input_max;      // per-input scaling
  std::vector<std::vector<double>> hidden_weights;  // [hidden][input]
  std::vector<double> hidden_bias;
  std::vector<double> output_weights;            // per hidden unit
  double output_bias = 0.0;
  double odg_min = -3.98;
  double odg_max = 0.22;

  void validate() const;  // throws DimensionMismatch on inconsistent shapes

  std::string to_json() const;
  static AnnMapping from_json(const std::string& text, const std::string& origin);
  static AnnMapping load(const std::string& path);
};

struct AnnOutput {
  double di = 0.0;   // pre-output aggregation (distortion index)
  double odg = 0.0;  // output scaling applied to the DI
};

/// DI = output bias + weighted sum of sigmoid hidden activations; ODG = the
/// monotone output stage applied to the DI.
AnnOutput apply_reference_ann(std::span<const double> inputs, const AnnMapping& ann);

}  // namespace peaqlab

#endif  // PEAQLAB_ANN_HPP_
