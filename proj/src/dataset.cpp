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

#include "peaqlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "peaqlab/csv.hpp"
#include "peaqlab/error.hpp"

namespace peaqlab {

ContentType parse_content_type(const std::string& text) {
  if (text == "music") return ContentType::kMusic;
  if (text == "speech") return ContentType::kSpeech;
  if (text == "mixed") return ContentType::kMixed;
  throw Error(ErrorKind::kParseError, "unknown content_type '" + text + "'");
}

const char* content_type_name(ContentType type) {
  switch (type) {
    case ContentType::kMusic: return "music";
    case ContentType::kSpeech: return "speech";
    case ContentType::kMixed: return "mixed";
  }
  return "?";
}

ContentSelector parse_content_selector(const std::string& text) {
  if (text == "music") return ContentSelector::kMusic;
  if (text == "speech") return ContentSelector::kSpeech;
  if (text == "mixed") return ContentSelector::kMixed;
  if (text == "all") return ContentSelector::kAll;
  throw Error(ErrorKind::kParseError, "unknown content selector '" + text + "'");
}

const char* content_selector_name(ContentSelector selector) {
  switch (selector) {
    case ContentSelector::kMusic: return "music";
    case ContentSelector::kSpeech: return "speech";
    case ContentSelector::kMixed: return "mixed";
    case ContentSelector::kAll: return "all";
  }
  return "?";
}

std::vector<ScoreRecord> parse_scores(const std::string& text, const std::string& origin) {
  CsvTable table = parse_csv(text, origin);
  int c_item = table.require_column("item_id");
  int c_cond = table.require_column("condition_id");
  int c_type = table.require_column("content_type");
  int c_mean = table.require_column("mushra_mean");
  int c_ci = table.require_column("ci95");
  int c_listeners = table.column("listeners");

  std::vector<ScoreRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::string, ContentType> item_types;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string where = origin + ":" + std::to_string(table.line_numbers[r]);
    ScoreRecord rec;
    rec.item_id = row[c_item];
    rec.condition_id = row[c_cond];
    if (rec.item_id.empty() || rec.condition_id.empty()) {
      throw Error(ErrorKind::kParseError, where + ": empty item_id/condition_id");
    }
    rec.content_type = parse_content_type(row[c_type]);
    rec.mushra_mean = parse_real(row[c_mean], where + " mushra_mean");
    rec.ci95_half_width = parse_real(row[c_ci], where + " ci95");
    if (!(rec.mushra_mean >= 0.0 && rec.mushra_mean <= 100.0)) {
      throw Error(ErrorKind::kOutOfRangeScore,
                  where + ": mushra_mean " + row[c_mean] + " outside [0, 100] for (" +
                      rec.item_id + ", " + rec.condition_id + ")");
    }
    if (!(rec.ci95_half_width > 0.0) || !std::isfinite(rec.ci95_half_width)) {
      throw Error(ErrorKind::kNonPositiveCI, where + ": ci95 must be > 0, got " + row[c_ci]);
    }
    if (c_listeners >= 0 && !row[c_listeners].empty()) {
      rec.listener_count = static_cast<int>(parse_real(row[c_listeners], where + " listeners"));
    }
    if (!seen.insert({rec.item_id, rec.condition_id}).second) {
      throw Error(ErrorKind::kDuplicateKey,
                  where + ": duplicate (" + rec.item_id + ", " + rec.condition_id + ")");
    }
    auto [it, inserted] = item_types.insert({rec.item_id, rec.content_type});
    if (!inserted && it->second != rec.content_type) {
      throw Error(ErrorKind::kInconsistentContentType,
                  where + ": item " + rec.item_id + " declared as both " +
                      content_type_name(it->second) + " and " + row[c_type]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ScoreRecord> load_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scores(buf.str(), path);
}

FeatureTable parse_features(const std::string& text, const std::string& origin) {
  CsvTable table = parse_csv(text, origin);
  int c_item = table.require_column("item_id");
  int c_cond = table.require_column("condition_id");

  FeatureTable out;
  std::vector<int> feature_cols;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (static_cast<int>(i) == c_item || static_cast<int>(i) == c_cond) continue;
    out.feature_names.push_back(table.header[i]);
    feature_cols.push_back(static_cast<int>(i));
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string where = origin + ":" + std::to_string(table.line_numbers[r]);
    FeatureRecord rec;
    rec.item_id = row[c_item];
    rec.condition_id = row[c_cond];
    if (!seen.insert({rec.item_id, rec.condition_id}).second) {
      throw Error(ErrorKind::kDuplicateKey,
                  where + ": duplicate (" + rec.item_id + ", " + rec.condition_id + ")");
    }
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      // An empty cell means the row lacks the shared feature set.
      if (row[feature_cols[k]].empty()) {
        throw Error(ErrorKind::kInconsistentFeatureSet,
                    where + ": missing value for feature '" + out.feature_names[k] + "'");
      }
      double v = parse_real(row[feature_cols[k]], where + " " + out.feature_names[k]);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kParseError,
                    where + ": non-finite value for feature '" + out.feature_names[k] + "'");
      }
      rec.values.push_back(v);
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

FeatureTable load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kFileNotFound, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_features(buf.str(), path);
}

int Dataset::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Dataset join_features(const std::vector<ScoreRecord>& scores, const FeatureTable& features) {
  std::map<std::pair<std::string, std::string>, const FeatureRecord*> by_key;
  for (const auto& rec : features.records) {
    by_key[{rec.item_id, rec.condition_id}] = &rec;
  }

  Dataset ds;
  ds.feature_names = features.feature_names;
  std::vector<std::string> unmatched;
  std::set<std::pair<std::string, std::string>> matched;
  for (const auto& score : scores) {
    auto it = by_key.find({score.item_id, score.condition_id});
    if (it == by_key.end()) {
      unmatched.push_back("scores(" + score.item_id + ", " + score.condition_id + ")");
      continue;
    }
    matched.insert(it->first);
    ds.rows.push_back({score, it->second->values});
  }
  for (const auto& [key, rec] : by_key) {
    if (!matched.count(key)) {
      unmatched.push_back("features(" + key.first + ", " + key.second + ")");
    }
  }
  if (!unmatched.empty()) {
    std::string msg = "unmatched keys:";
    for (const auto& k : unmatched) msg += " " + k;
    throw Error(ErrorKind::kUnmatchedKeys, msg);
  }
  std::sort(ds.rows.begin(), ds.rows.end(), [](const DatasetRow& a, const DatasetRow& b) {
    return std::tie(a.score.item_id, a.score.condition_id) <
           std::tie(b.score.item_id, b.score.condition_id);
  });
  return ds;
}

Dataset filter_content(const Dataset& ds, ContentSelector selector) {
  if (selector == ContentSelector::kAll) return ds;
  ContentType want = selector == ContentSelector::kMusic  ? ContentType::kMusic
                     : selector == ContentSelector::kSpeech ? ContentType::kSpeech
                                                            : ContentType::kMixed;
  Dataset out;
  out.feature_names = ds.feature_names;
  for (const auto& row : ds.rows) {
    if (row.score.content_type == want) out.rows.push_back(row);
  }
  return out;
}

std::string write_scores_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "item_id,condition_id,content_type,mushra_mean,ci95\n";
  for (const auto& row : ds.rows) {
    out << row.score.item_id << ',' << row.score.condition_id << ','
        << content_type_name(row.score.content_type) << ','
        << format_csv_field(row.score.mushra_mean) << ','
        << format_csv_field(row.score.ci95_half_width) << '\n';
  }
  return out.str();
}

std::string write_features_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "item_id,condition_id";
  for (const auto& name : ds.feature_names) out << ',' << name;
  out << '\n';
  for (const auto& row : ds.rows) {
    out << row.score.item_id << ',' << row.score.condition_id;
    for (double v : row.features) out << ',' << format_csv_field(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace peaqlab
