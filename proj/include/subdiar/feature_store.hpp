// subdiar/feature_store.hpp
//
// Per-line multimodal features and external turn scores, read from JSONL.
//
// features:    {"line_id": 3, "active": true, "face": [...], "timbre": [...]}
// turn scores: {"left_line_id": 3, "right_line_id": 4, "p0": 0.1, "p1": 0.9}

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "subdiar/core.hpp"

namespace subdiar {

struct FeatureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineFeatures {
  int line_id = 0;
  bool active = false;
  std::optional<Embedding> face;  // present iff active
  Embedding timbre;

  bool operator==(const LineFeatures &) const = default;
};

using FeatureMap = std::map<int, LineFeatures>;

/// Embeddings are unit-normalized on load. Throws FeatureError on a
/// duplicate line_id, inconsistent dimensions, active without a face, a
/// face on an inactive line, or a zero-norm/non-finite vector.
FeatureMap load_features(std::istream &in);
FeatureMap load_features(const std::string &path);

/// Throws FeatureError unless `features` holds exactly the program's lines.
void check_feature_coverage(const FeatureMap &features, const Program &program);

void save_features(const FeatureMap &features, std::ostream &out);

struct TurnScoreRecord {
  int left_line_id = 0;
  int right_line_id = 1;
  double p0 = 0.5;
  double p1 = 0.5;

  bool operator==(const TurnScoreRecord &) const = default;
};

/// Keyed by (left, right) with right == left + 1.
using TurnScoreMap = std::map<std::pair<int, int>, TurnScoreRecord>;

/// Partial coverage is allowed. Throws FeatureError on non-adjacent pairs,
/// negative or non-finite probabilities, p0 + p1 == 0, or duplicates.
TurnScoreMap load_turn_scores(std::istream &in);
TurnScoreMap load_turn_scores(const std::string &path);

void save_turn_scores(const TurnScoreMap &scores, std::ostream &out);

}  // namespace subdiar
