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

#ifndef PEAQLAB_DATASET_HPP_
#define PEAQLAB_DATASET_HPP_

#include <optional>
#include <string>
#include <vector>

namespace peaqlab {

enum class ContentType { kMusic, kSpeech, kMixed };

enum class ContentSelector { kMusic, kSpeech, kMixed, kAll };

ContentType parse_content_type(const std::string& text);
const char* content_type_name(ContentType type);
ContentSelector parse_content_selector(const std::string& text);
const char* content_selector_name(ContentSelector selector);

/// One condensed listening-test result: the mean MUSHRA score over listeners
/// for an (item, condition) pair plus the half-width of its 95% CI.
struct ScoreRecord {
  std::string item_id;
  std::string condition_id;
  ContentType content_type = ContentType::kMusic;
  double mushra_mean = 0.0;      // score points in [0, 100]
  double ci95_half_width = 0.0;  // score points, > 0
  std::optional<int> listener_count;
};

/// Per-pair feature values; all rows of a table carry the same feature names.
struct FeatureRecord {
  std::string item_id;
  std::string condition_id;
  std::vector<double> values;  // parallel to Dataset::feature_names
};

/// Joined scores x features view, canonically ordered by (item_id,
/// condition_id). Read-only after construction.
struct DatasetRow {
  ScoreRecord score;
  std::vector<double> features;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<DatasetRow> rows;

  int feature_index(const std::string& name) const;  // -1 if absent
  std::size_t size() const { return rows.size(); }
};

std::vector<ScoreRecord> load_scores(const std::string& path);
std::vector<ScoreRecord> parse_scores(const std::string& text, const std::string& origin);

/// Reads a features table; every non-key column becomes a feature.
struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<FeatureRecord> records;
};
FeatureTable load_features(const std::string& path);
FeatureTable parse_features(const std::string& text, const std::string& origin);

Dataset join_features(const std::vector<ScoreRecord>& scores, const FeatureTable& features);

/// Subset by content type; kAll is the identity. An empty selection is legal
/// (warning-level condition, reported by callers).
Dataset filter_content(const Dataset& ds, ContentSelector selector);

std::string write_scores_csv(const Dataset& ds);
std::string write_features_csv(const Dataset& ds);

}  // namespace peaqlab

#endif  // PEAQLAB_DATASET_HPP_
