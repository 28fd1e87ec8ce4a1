// subdiar/core.hpp
//
// Value types shared by every stage of the diarization pipeline, plus the
// small amount of embedding arithmetic they need.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subdiar {

/// One subtitle cue. Times are milliseconds from program start.
struct Line {
  int line_id = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string text;

  std::int64_t duration_ms() const { return end_ms - start_ms; }
  bool operator==(const Line &) const = default;
};

/// Lines are kept sorted by start time; line_id is the position in that order.
struct Program {
  std::string program_id;
  std::vector<Line> lines;

  std::size_t size() const { return lines.size(); }
};

/// Fixed-length real vector. Components are always finite.
struct Embedding {
  std::vector<double> values;

  Embedding() = default;
  explicit Embedding(std::vector<double> v) : values(std::move(v)) {}
  Embedding(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const Embedding &) const = default;
};

double dot(const Embedding &a, const Embedding &b);
double norm(const Embedding &e);

/// dot(a,b) / (|a| |b|). Throws std::invalid_argument on dimension mismatch
/// or a zero-norm argument.
double cosine_similarity(const Embedding &a, const Embedding &b);

/// Throws std::invalid_argument on a zero-norm (or non-finite) input.
Embedding unit_normalize(const Embedding &e);

/// Componentwise arithmetic mean. Summation runs in sequence order.
Embedding mean_embedding(std::span<const Embedding> set);
Embedding mean_embedding(std::span<const Embedding *const> set);

enum class Origin { visual_anchor, supplemented, audio_cluster };

struct SpeakerId {
  int id = 0;
  Origin origin = Origin::visual_anchor;

  bool operator==(const SpeakerId &) const = default;
};

enum class Stage {
  active_visual,
  prototype_nearest,
  group_standardized,
  supplemented,
  audio_cluster,
};

struct Assignment {
  int line_id = 0;
  SpeakerId speaker;
  double confidence = 0.0;
  Stage stage = Stage::prototype_nearest;

  bool operator==(const Assignment &) const = default;
};

std::string_view to_string(Origin o);
std::string_view to_string(Stage s);
Origin origin_from_string(std::string_view s);
Stage stage_from_string(std::string_view s);

}  // namespace subdiar
