// subdiar/subtitle_io.hpp
//
// SRT input, CSV annotation output and RTTM read/write.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiar/core.hpp"

namespace subdiar {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses an SRT stream. Cue indices are ignored for identity; lines are
/// sorted by start time (stable) and numbered 0..n-1 in that order.
/// Throws ParseError on a malformed timestamp or end <= start.
Program parse_srt(std::istream &in, std::string program_id = {});
Program parse_srt_file(const std::string &path);

void write_srt(const Program &program, std::ostream &out);

/// Formats milliseconds as HH:MM:SS,mmm.
std::string format_srt_time(std::int64_t ms);

/// One row of the annotation CSV.
struct AnnotationRecord {
  Line line;
  Assignment assignment;

  bool operator==(const AnnotationRecord &) const = default;
};

inline constexpr const char *kAnnotationHeader =
    "line_id,start_ms,end_ms,speaker_id,origin,stage,confidence,text";

/// Writes the header plus one row per line, ordered by line_id.
/// `assignments` must contain exactly one entry per program line.
void write_annotation(const Program &program,
                      std::span<const Assignment> assignments,
                      std::ostream &out);

std::vector<AnnotationRecord> parse_annotation(std::istream &in);

struct RttmRecord {
  std::string file_id;
  std::int64_t onset_ms = 0;
  std::int64_t duration_ms = 0;
  std::string speaker_label;

  double onset() const { return static_cast<double>(onset_ms) / 1000.0; }
  double duration() const { return static_cast<double>(duration_ms) / 1000.0; }
  bool operator==(const RttmRecord &) const = default;
};

std::string speaker_label(const SpeakerId &s);

std::vector<RttmRecord> rttm_records(const Program &program,
                                     std::span<const Assignment> assignments,
                                     const std::string &file_id);

std::string format_rttm(std::span<const RttmRecord> records);

std::string write_rttm(const Program &program,
                       std::span<const Assignment> assignments,
                       const std::string &file_id);

/// Blank lines and lines starting with ";;" are skipped. Every other line
/// must be a 10-field SPEAKER record.
std::vector<RttmRecord> parse_rttm(std::istream &in);

/// Reference speaker label per line, indexed by line_id.
struct GroundTruth {
  std::vector<std::string> labels;

  bool operator==(const GroundTruth &) const = default;
};

/// CSV with header "line_id,speaker"; rows must cover 0..n-1 exactly once.
GroundTruth parse_ground_truth(std::istream &in);
GroundTruth parse_ground_truth_file(const std::string &path);
void write_ground_truth(const GroundTruth &truth, std::ostream &out);

}  // namespace subdiar
