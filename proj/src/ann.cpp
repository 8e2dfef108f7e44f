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

#include "peaqlab/ann.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "peaqlab/error.hpp"

namespace peaqlab {

void AnnMapping::validate() const {
  const std::size_t inputs = input_names.size();
  const std::size_t hidden = hidden_weights.size();
  if (input_min.size() != inputs || input_max.size() != inputs) {
    throw Error(ErrorKind::kDimensionMismatch, "input scaling size != input count");
  }
  for (std::size_t i = 0; i < inputs; ++i) {
    if (!(input_min[i] < input_max[i])) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "degenerate scaling range for input '" + input_names[i] + "'");
    }
  }
  if (hidden_bias.size() != hidden || output_weights.size() != hidden) {
    throw Error(ErrorKind::kDimensionMismatch, "hidden bias/output weight size != hidden count");
  }
  for (const auto& row : hidden_weights) {
    if (row.size() != inputs) {
      throw Error(ErrorKind::kDimensionMismatch, "hidden weight row size != input count");
    }
  }
  if (!(odg_min < odg_max)) {
    throw Error(ErrorKind::kDimensionMismatch, "degenerate ODG scaling range");
  }
}

AnnOutput apply_reference_ann(std::span<const double> inputs, const AnnMapping& ann) {
  ann.validate();
  if (inputs.size() != ann.input_names.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "ANN expects " + std::to_string(ann.input_names.size()) + " inputs, got " +
                    std::to_string(inputs.size()));
  }
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  AnnOutput out;
  out.di = ann.output_bias;
  for (std::size_t j = 0; j < ann.hidden_weights.size(); ++j) {
    double act = ann.hidden_bias[j];
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const double scaled = (inputs[i] - ann.input_min[i]) / (ann.input_max[i] - ann.input_min[i]);
      act += ann.hidden_weights[j][i] * scaled;
    }
    out.di += ann.output_weights[j] * sigmoid(act);
  }
  out.odg = ann.odg_min + (ann.odg_max - ann.odg_min) * sigmoid(out.di);
  return out;
}

std::string AnnMapping::to_json() const {
  nlohmann::json j;
  j["schema"] = "peaqlab-ann/1";
  j["input_names"] = input_names;
  j["input_min"] = input_min;
  j["input_max"] = input_max;
  j["hidden_weights"] = hidden_weights;
  j["hidden_bias"] = hidden_bias;
  j["output_weights"] = output_weights;
  j["output_bias"] = output_bias;
  j["odg_min"] = odg_min;
  j["odg_max"] = odg_max;
  return j.dump(2) + "\n";
}

AnnMapping AnnMapping::from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  AnnMapping ann;
  try {
    if (j.at("schema").get<std::string>() != "peaqlab-ann/1") {
      throw Error(ErrorKind::kSchemaVersionMismatch,
                  origin + ": unsupported ANN schema " + j.at("schema").get<std::string>());
    }
    ann.input_names = j.at("input_names").get<std::vector<std::string>>();
    ann.input_min = j.at("input_min").get<std::vector<double>>();
    ann.input_max = j.at("input_max").get<std::vector<double>>();
    ann.hidden_weights = j.at("hidden_weights").get<std::vector<std::vector<double>>>();
    ann.hidden_bias = j.at("hidden_bias").get<std::vector<double>>();
    ann.output_weights = j.at("output_weights").get<std::vector<double>>();
    ann.output_bias = j.at("output_bias").get<double>();
    ann.odg_min = j.at("odg_min").get<double>();
    ann.odg_max = j.at("odg_max").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, origin + ": " + e.what());
  }
  ann.validate();
  return ann;
}

AnnMapping AnnMapping::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), path);
}

}  // namespace peaqlab
