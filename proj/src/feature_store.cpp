// subdiar/feature_store.cpp

#include "subdiar/feature_store.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace subdiar {

using nlohmann::json;

namespace {

std::string where(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

Embedding read_embedding(const json &j, const char *field, std::size_t line_no) {
  if (!j.is_array() || j.empty()) {
    throw FeatureError(where(line_no) + "'" + field +
                       "' must be a non-empty array of numbers");
  }
  std::vector<double> v;
  v.reserve(j.size());
  for (const json &x : j) {
    if (!x.is_number()) {
      throw FeatureError(where(line_no) + "'" + field + "' has a non-numeric entry");
    }
    const double d = x.get<double>();
    if (!std::isfinite(d)) {
      throw FeatureError(where(line_no) + "'" + field + "' has a non-finite entry");
    }
    v.push_back(d);
  }
  try {
    return unit_normalize(Embedding(std::move(v)));
  } catch (const std::invalid_argument &) {
    throw FeatureError(where(line_no) + "'" + field + "' has zero norm");
  }
}

template <typename Fn>
void for_each_json_line(std::istream &in, Fn fn) {
  std::string row;
  std::size_t line_no = 0;
  while (std::getline(in, row)) {
    ++line_no;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(row);
    } catch (const json::parse_error &e) {
      throw FeatureError(where(line_no) + "invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw FeatureError(where(line_no) + "record is not an object");
    fn(j, line_no);
  }
}

int read_int(const json &j, const char *field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number_integer()) {
    throw FeatureError(where(line_no) + "missing integer field '" + field + "'");
  }
  return it->get<int>();
}

double read_real(const json &j, const char *field, std::size_t line_no) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_number()) {
    throw FeatureError(where(line_no) + "missing numeric field '" + field + "'");
  }
  const double d = it->get<double>();
  if (!std::isfinite(d)) {
    throw FeatureError(where(line_no) + "non-finite '" + field + "'");
  }
  return d;
}

std::ifstream open_or_throw(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw FeatureError("cannot open " + path);
  return in;
}

}  // namespace

FeatureMap load_features(std::istream &in) {
  FeatureMap out;
  std::size_t face_dim = 0;
  std::size_t timbre_dim = 0;
  for_each_json_line(in, [&](const json &j, std::size_t line_no) {
    LineFeatures f;
    f.line_id = read_int(j, "line_id", line_no);
    auto active = j.find("active");
    if (active == j.end() || !active->is_boolean()) {
      throw FeatureError(where(line_no) + "missing boolean field 'active'");
    }
    f.active = active->get<bool>();
    auto face = j.find("face");
    const bool has_face = face != j.end() && !face->is_null();
    if (f.active && !has_face) {
      throw FeatureError(where(line_no) + "active line " +
                         std::to_string(f.line_id) + " has no face embedding");
    }
    if (!f.active && has_face) {
      throw FeatureError(where(line_no) + "inactive line " +
                         std::to_string(f.line_id) + " carries a face embedding");
    }
    if (has_face) {
      f.face = read_embedding(*face, "face", line_no);
      if (face_dim == 0) face_dim = f.face->dim();
      if (f.face->dim() != face_dim) {
        throw FeatureError(where(line_no) + "face dimension " +
                           std::to_string(f.face->dim()) + " differs from " +
                           std::to_string(face_dim));
      }
    }
    auto timbre = j.find("timbre");
    if (timbre == j.end()) {
      throw FeatureError(where(line_no) + "missing 'timbre' embedding");
    }
    f.timbre = read_embedding(*timbre, "timbre", line_no);
    if (timbre_dim == 0) timbre_dim = f.timbre.dim();
    if (f.timbre.dim() != timbre_dim) {
      throw FeatureError(where(line_no) + "timbre dimension " +
                         std::to_string(f.timbre.dim()) + " differs from " +
                         std::to_string(timbre_dim));
    }
    const int id = f.line_id;
    if (!out.emplace(id, std::move(f)).second) {
      throw FeatureError(where(line_no) + "duplicate line_id " + std::to_string(id));
    }
  });
  return out;
}

FeatureMap load_features(const std::string &path) {
  auto in = open_or_throw(path);
  return load_features(in);
}

void check_feature_coverage(const FeatureMap &features, const Program &program) {
  for (const Line &l : program.lines) {
    if (!features.count(l.line_id)) {
      throw FeatureError("no features for line_id " + std::to_string(l.line_id));
    }
  }
  if (features.size() != program.lines.size()) {
    for (const auto &[id, f] : features) {
      if (id < 0 || static_cast<std::size_t>(id) >= program.lines.size()) {
        throw FeatureError("features reference unknown line_id " + std::to_string(id));
      }
    }
  }
}

void save_features(const FeatureMap &features, std::ostream &out) {
  for (const auto &[id, f] : features) {
    json j;
    j["line_id"] = f.line_id;
    j["active"] = f.active;
    if (f.face) j["face"] = f.face->values;
    j["timbre"] = f.timbre.values;
    out << j.dump() << '\n';
  }
}

TurnScoreMap load_turn_scores(std::istream &in) {
  TurnScoreMap out;
  for_each_json_line(in, [&](const json &j, std::size_t line_no) {
    TurnScoreRecord r;
    r.left_line_id = read_int(j, "left_line_id", line_no);
    r.right_line_id = read_int(j, "right_line_id", line_no);
    r.p0 = read_real(j, "p0", line_no);
    r.p1 = read_real(j, "p1", line_no);
    if (r.right_line_id != r.left_line_id + 1) {
      throw FeatureError(where(line_no) + "pair (" + std::to_string(r.left_line_id) +
                         "," + std::to_string(r.right_line_id) +
                         ") is not adjacent");
    }
    if (r.p0 < 0.0 || r.p1 < 0.0) {
      throw FeatureError(where(line_no) + "negative label probability");
    }
    if (r.p0 + r.p1 <= 0.0) {
      throw FeatureError(where(line_no) + "p0 + p1 must be positive");
    }
    if (!out.emplace(std::make_pair(r.left_line_id, r.right_line_id), r).second) {
      throw FeatureError(where(line_no) + "duplicate pair");
    }
  });
  return out;
}

TurnScoreMap load_turn_scores(const std::string &path) {
  auto in = open_or_throw(path);
  return load_turn_scores(in);
}

void save_turn_scores(const TurnScoreMap &scores, std::ostream &out) {
  for (const auto &[key, r] : scores) {
    json j;
    j["left_line_id"] = r.left_line_id;
    j["right_line_id"] = r.right_line_id;
    j["p0"] = r.p0;
    j["p1"] = r.p1;
    out << j.dump() << '\n';
  }
}

}  // namespace subdiar
