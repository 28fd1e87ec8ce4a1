// subdiar/turn_detect.hpp
//
// Speaker turn detection. An external scorer gives, for every adjacent line
// pair, the probabilities (p0, p1) of the labels "different" and "same"; they
// are fused with the timbre similarity of the two lines, and the fused score
// splits the program into same-speaker groups.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subdiar/core.hpp"
#include "subdiar/feature_store.hpp"

namespace subdiar {

inline constexpr int kDefaultTurnWindow = 10;
inline constexpr double kSameSpeakerThreshold = 0.5;

/// p1 / (p0 + p1).
double alm_probability(double p0, double p1);

/// (cos + 1) / 2.
double timbre_turn_similarity(const Embedding &left, const Embedding &right);

/// w * p_alm + (1 - w) * s_tim.
double fuse(double p_alm, double s_tim, double w);

struct WindowLine {
  int line_id = 0;
  std::string text;
  std::string audio_ref;  ///< "<start_ms>-<end_ms>" of the line's audio span
};

struct PairScore {
  int left_line_id = 0;
  double p0 = 0.5;
  double p1 = 0.5;
};

/// Given consecutive lines, return one (p0, p1) per adjacent pair, in order.
class TurnScorer {
 public:
  virtual ~TurnScorer() = default;
  virtual std::vector<PairScore> score(std::span<const WindowLine> window) = 0;
};

/// Always p0 = p1.
class NeutralScorer final : public TurnScorer {
 public:
  std::vector<PairScore> score(std::span<const WindowLine> window) override;
};

/// Replays recorded scores; pairs missing from the record score neutral.
class ReplayScorer final : public TurnScorer {
 public:
  explicit ReplayScorer(TurnScoreMap scores) : scores_(std::move(scores)) {}
  std::vector<PairScore> score(std::span<const WindowLine> window) override;

 private:
  TurnScoreMap scores_;
};

/// Scores one window of 2..10 lines. A throwing scorer, or one returning the
/// wrong number of pairs, yields neutral scores and a warning.
std::vector<PairScore> score_window(TurnScorer &scorer,
                                    std::span<const WindowLine> window);

/// Windows of `window_size` lines with stride window_size - 1, so every
/// adjacent pair is scored exactly once. Result is in line order.
std::vector<PairScore> score_program(TurnScorer &scorer, const Program &program,
                                     int window_size = kDefaultTurnWindow);

struct TurnDecision {
  int left_line_id = 0;  ///< pair is (left, left + 1)
  double p_alm = 0.5;
  double s_tim = 0.5;
  double p_std = 0.5;
  bool same_speaker = true;
};

/// One decision per adjacent pair of `program`.
std::vector<TurnDecision> decide_turns(const Program &program,
                                       const FeatureMap &features,
                                       std::span<const PairScore> scores,
                                       double w);

struct Group {
  int first_line = 0;  ///< inclusive
  int last_line = 0;   ///< inclusive
  std::optional<TurnDecision> left_boundary;
  std::optional<TurnDecision> right_boundary;

  int size() const { return last_line - first_line + 1; }
};

/// Maximal runs of same-speaker pairs; boundaries sit exactly at decisions
/// with p_std < 0.5. Throws std::invalid_argument on a missing decision.
std::vector<Group> segment_groups(const Program &program,
                                  std::span<const TurnDecision> decisions);

}  // namespace subdiar
