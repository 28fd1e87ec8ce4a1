// subdiar/turn_detect.cpp

#include "subdiar/turn_detect.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "subdiar/log.hpp"

namespace subdiar {

double alm_probability(double p0, double p1) {
  if (!(p0 >= 0.0) || !(p1 >= 0.0) || !std::isfinite(p0) || !std::isfinite(p1)) {
    throw std::invalid_argument("label probabilities must be finite and >= 0");
  }
  if (p0 + p1 <= 0.0) throw std::invalid_argument("p0 + p1 must be positive");
  return p1 / (p0 + p1);
}

double timbre_turn_similarity(const Embedding &left, const Embedding &right) {
  return (cosine_similarity(left, right) + 1.0) / 2.0;
}

double fuse(double p_alm, double s_tim, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in [0, 1]");
  return w * p_alm + (1.0 - w) * s_tim;
}

std::vector<PairScore> NeutralScorer::score(std::span<const WindowLine> window) {
  std::vector<PairScore> out;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    out.push_back(PairScore{window[i].line_id, 0.5, 0.5});
  }
  return out;
}

std::vector<PairScore> ReplayScorer::score(std::span<const WindowLine> window) {
  std::vector<PairScore> out;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    const int l = window[i].line_id;
    auto it = scores_.find({l, window[i + 1].line_id});
    if (it == scores_.end()) {
      out.push_back(PairScore{l, 0.5, 0.5});
    } else {
      out.push_back(PairScore{l, it->second.p0, it->second.p1});
    }
  }
  return out;
}

std::vector<PairScore> score_window(TurnScorer &scorer,
                                    std::span<const WindowLine> window) {
  if (window.size() < 2 || window.size() > static_cast<std::size_t>(kDefaultTurnWindow)) {
    throw std::invalid_argument("turn window must hold 2..10 lines");
  }
  auto neutral = [&] {
    std::vector<PairScore> out;
    for (std::size_t i = 0; i + 1 < window.size(); ++i) {
      out.push_back(PairScore{window[i].line_id, 0.5, 0.5});
    }
    return out;
  };
  std::vector<PairScore> got;
  try {
    got = scorer.score(window);
  } catch (const std::exception &e) {
    log_warning("turn scorer failed on window starting at line " +
                std::to_string(window.front().line_id) + ": " + e.what() +
                "; using neutral scores");
    return neutral();
  }
  if (got.size() != window.size() - 1) {
    log_warning("turn scorer returned " + std::to_string(got.size()) +
                " pair scores for a window of " + std::to_string(window.size()) +
                " lines; using neutral scores");
    return neutral();
  }
  for (std::size_t i = 0; i < got.size(); ++i) {
    const PairScore &p = got[i];
    const bool valid = std::isfinite(p.p0) && std::isfinite(p.p1) && p.p0 >= 0.0 &&
                       p.p1 >= 0.0 && p.p0 + p.p1 > 0.0;
    if (!valid || p.left_line_id != window[i].line_id) {
      log_warning("turn scorer returned an invalid score for pair starting at line " +
                  std::to_string(window[i].line_id) + "; using neutral score");
      got[i] = PairScore{window[i].line_id, 0.5, 0.5};
    }
  }
  return got;
}

std::vector<PairScore> score_program(TurnScorer &scorer, const Program &program,
                                     int window_size) {
  if (window_size < 2 || window_size > kDefaultTurnWindow) {
    throw std::invalid_argument("turn window must be between 2 and 10 lines");
  }
  std::vector<WindowLine> lines;
  lines.reserve(program.lines.size());
  for (const Line &l : program.lines) {
    lines.push_back(WindowLine{l.line_id, l.text,
                               std::to_string(l.start_ms) + "-" +
                                   std::to_string(l.end_ms)});
  }
  std::vector<PairScore> out;
  const std::size_t stride = static_cast<std::size_t>(window_size - 1);
  for (std::size_t start = 0; start + 1 < lines.size(); start += stride) {
    const std::size_t len =
        std::min(static_cast<std::size_t>(window_size), lines.size() - start);
    auto scores = score_window(scorer, std::span(lines).subspan(start, len));
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

std::vector<TurnDecision> decide_turns(const Program &program,
                                       const FeatureMap &features,
                                       std::span<const PairScore> scores,
                                       double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("w must lie in [0, 1]");
  const std::size_t pairs = program.lines.empty() ? 0 : program.lines.size() - 1;
  if (scores.size() != pairs) {
    throw std::invalid_argument("expected one pair score per adjacent line pair");
  }
  std::vector<TurnDecision> out;
  out.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const Line &left = program.lines[i];
    const Line &right = program.lines[i + 1];
    if (scores[i].left_line_id != left.line_id) {
      throw std::invalid_argument("pair scores out of line order");
    }
    TurnDecision d;
    d.left_line_id = left.line_id;
    d.p_alm = alm_probability(scores[i].p0, scores[i].p1);
    d.s_tim = timbre_turn_similarity(features.at(left.line_id).timbre,
                                     features.at(right.line_id).timbre);
    d.p_std = fuse(d.p_alm, d.s_tim, w);
    d.same_speaker = d.p_std >= kSameSpeakerThreshold;
    out.push_back(d);
  }
  return out;
}

std::vector<Group> segment_groups(const Program &program,
                                  std::span<const TurnDecision> decisions) {
  std::vector<Group> out;
  if (program.lines.empty()) return out;
  if (decisions.size() != program.lines.size() - 1) {
    throw std::invalid_argument("missing turn decision for an adjacent pair");
  }
  Group cur;
  cur.first_line = program.lines.front().line_id;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].left_line_id != program.lines[i].line_id) {
      throw std::invalid_argument("missing turn decision for pair starting at line " +
                                  std::to_string(program.lines[i].line_id));
    }
    if (decisions[i].p_std >= kSameSpeakerThreshold) continue;
    cur.last_line = program.lines[i].line_id;
    cur.right_boundary = decisions[i];
    out.push_back(cur);
    cur = Group{};
    cur.first_line = program.lines[i + 1].line_id;
    cur.left_boundary = decisions[i];
  }
  cur.last_line = program.lines.back().line_id;
  out.push_back(cur);
  return out;
}

}  // namespace subdiar
