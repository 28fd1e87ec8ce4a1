// subdiar/metrics.hpp
//
// Diarization scoring (DER, JER, SPKE) under an optimal one-to-one speaker
// mapping, and turn-detection scoring (AUC, F1).

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subdiar/subtitle_io.hpp"

namespace subdiar {

struct Segment {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string label;
};

/// Segments may overlap; each must have positive duration.
struct LabeledTimeline {
  std::vector<Segment> segments;
};

LabeledTimeline timeline_from_rttm(std::span<const RttmRecord> records);

enum class ScoringMode { line, timeline };

ScoringMode scoring_mode_from_string(const std::string &s);
std::string_view to_string(ScoringMode m);

/// Row r of `overlap` is reference speaker r, column h hypothesis speaker h.
/// Returns, per reference speaker, the hypothesis it maps to. The mapping is
/// injective and maximizes the total mapped overlap; pairs with zero overlap
/// are left unmapped. Among equal optima the lexicographically first
/// (ref, hyp) assignment wins.
std::vector<std::optional<std::size_t>> optimal_mapping(
    const std::vector<std::vector<double>> &overlap);

/// Durations in seconds.
struct DerBreakdown {
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double total = 0.0;  ///< scored reference speech

  double der() const { return (missed + false_alarm + confusion) / total; }
  double spke() const { return confusion / total; }
};

/// Line mode needs identical segment boundaries in ref and hyp (in order)
/// and scores each line as a unit; collar is ignored. Timeline mode scores
/// elementary intervals, excluding +-collar around every reference boundary,
/// with overlapping reference speech counted once per speaker.
/// Throws std::invalid_argument on an empty reference or boundary mismatch.
DerBreakdown der_breakdown(const LabeledTimeline &ref, const LabeledTimeline &hyp,
                           ScoringMode mode, double collar_seconds = 0.0);

double der(const LabeledTimeline &ref, const LabeledTimeline &hyp,
           ScoringMode mode, double collar_seconds = 0.0);

double spke(const LabeledTimeline &ref, const LabeledTimeline &hyp,
            ScoringMode mode, double collar_seconds = 0.0);

/// Mean over reference speakers of 1 - |ref_i & hyp_m(i)| / |ref_i | hyp_m(i)|;
/// unmapped reference speakers score 1.
double jer(const LabeledTimeline &ref, const LabeledTimeline &hyp,
           ScoringMode mode = ScoringMode::line);

struct TurnMetrics {
  std::optional<double> auc;  ///< absent when only one class is present
  double f1 = 0.0;            ///< same-speaker class at p_std >= 0.5
};

/// Pairs of (score, is_same_speaker). AUC uses midranks for tied scores.
TurnMetrics turn_metrics(std::span<const std::pair<double, bool>> decisions);

}  // namespace subdiar
