// subdiar/supplementation.cpp

#include "subdiar/supplementation.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace subdiar {

namespace {

const Assignment &assignment_of(std::span<const Assignment> assignments, int line) {
  if (line < 0 || static_cast<std::size_t>(line) >= assignments.size() ||
      assignments[line].line_id != line) {
    throw std::invalid_argument("assignments must be ordered by line_id; line " +
                                std::to_string(line) + " not found");
  }
  return assignments[line];
}

}  // namespace

std::string_view to_string(GroupAction a) {
  switch (a) {
    case GroupAction::keep: return "keep";
    case GroupAction::new_speaker: return "new_speaker";
    case GroupAction::merged: return "merged";
  }
  return "?";
}

double line_novelty_score(const LineFeatures &line, const SpeakerRegistry &registry) {
  if (line.active) return 1.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const RegisteredSpeaker &s : registry.speakers) {
    if (s.id.origin != Origin::visual_anchor) continue;
    best = std::max(best, cosine_similarity(line.timbre, s.prototype));
  }
  if (best == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("no visual-anchor speakers registered");
  }
  return best;
}

double group_novelty_score(std::span<const double> line_scores) {
  if (line_scores.empty()) throw std::invalid_argument("empty group");
  double sum = 0.0;
  for (double s : line_scores) sum += s;
  return sum / static_cast<double>(line_scores.size());
}

SpeakerId group_main_speaker(const Group &group,
                             std::span<const Assignment> assignments,
                             const FeatureMap &features,
                             const SpeakerRegistry &registry) {
  if (group.size() <= 0) throw std::invalid_argument("empty group");
  struct Tally {
    SpeakerId speaker;
    int votes = 0;
  };
  std::map<int, Tally> tally;
  for (int line = group.first_line; line <= group.last_line; ++line) {
    const Assignment &a = assignment_of(assignments, line);
    Tally &t = tally[a.speaker.id];
    t.speaker = a.speaker;
    t.votes += features.at(line).active ? 2 : 1;
  }
  int top = 0;
  for (const auto &[id, t] : tally) top = std::max(top, t.votes);

  SpeakerId best;
  double best_sim = -std::numeric_limits<double>::infinity();
  int tied = 0;
  for (const auto &[id, t] : tally) {
    if (t.votes == top) ++tied;
  }
  for (const auto &[id, t] : tally) {
    if (t.votes != top) continue;
    if (tied == 1) return t.speaker;
    const RegisteredSpeaker *s = registry.find(id);
    if (!s) {
      throw std::invalid_argument("speaker " + std::to_string(id) +
                                  " is not registered");
    }
    double sim = 0.0;
    for (int line = group.first_line; line <= group.last_line; ++line) {
      sim += cosine_similarity(features.at(line).timbre, s->prototype);
    }
    if (sim > best_sim) {
      best_sim = sim;
      best = t.speaker;
    }
  }
  return best;
}

SupplementResult supplement(const Program &program, std::span<const Group> groups,
                            std::span<const Assignment> initial,
                            const FeatureMap &features,
                            const SpeakerRegistry &registry, double eta,
                            double epsilon) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (initial.size() != program.lines.size()) {
    throw std::invalid_argument("need one initial assignment per line");
  }
  int expected = program.lines.empty() ? 0 : program.lines.front().line_id;
  for (const Group &g : groups) {
    if (g.first_line != expected || g.last_line < g.first_line) {
      throw std::invalid_argument("groups do not partition the program");
    }
    expected = g.last_line + 1;
  }
  if (!program.lines.empty() && expected != program.lines.back().line_id + 1) {
    throw std::invalid_argument("groups do not cover the program");
  }

  SupplementResult out;
  out.registry = registry;
  out.assignments.assign(initial.begin(), initial.end());

  for (const Group &g : groups) {
    GroupVerdict v;
    v.group = g;
    v.main_speaker = group_main_speaker(g, initial, features, registry);

    std::vector<double> scores;
    std::vector<const Embedding *> timbres;
    for (int line = g.first_line; line <= g.last_line; ++line) {
      const LineFeatures &f = features.at(line);
      scores.push_back(line_novelty_score(f, registry));
      timbres.push_back(&f.timbre);
    }
    v.sigma = group_novelty_score(scores);

    const RegisteredSpeaker *target = nullptr;
    Stage stage = Stage::group_standardized;
    if (eta > 0.0 && v.sigma < eta) {
      const Embedding group_mean =
          mean_embedding(std::span<const Embedding *const>(timbres));
      RegisteredSpeaker *closest = nullptr;
      double best = -std::numeric_limits<double>::infinity();
      for (RegisteredSpeaker &s : out.registry.speakers) {
        if (s.id.origin != Origin::supplemented) continue;
        const double sim = cosine_similarity(group_mean, s.prototype);
        if (sim > best) {
          best = sim;
          closest = &s;
        }
      }
      if (closest && best >= epsilon) {
        const double n_old = static_cast<double>(closest->support.size());
        const double n_new = static_cast<double>(g.size());
        std::vector<double> merged(closest->prototype.values);
        for (std::size_t i = 0; i < merged.size(); ++i) {
          merged[i] = (n_old * merged[i] + n_new * group_mean.values[i]) /
                      (n_old + n_new);
        }
        closest->prototype = Embedding(std::move(merged));
        for (int line = g.first_line; line <= g.last_line; ++line) {
          closest->support.push_back(line);
        }
        v.action = GroupAction::merged;
        target = closest;
      } else {
        RegisteredSpeaker s;
        s.id = SpeakerId{out.registry.next_id(), Origin::supplemented};
        s.prototype = group_mean;
        for (int line = g.first_line; line <= g.last_line; ++line) {
          s.support.push_back(line);
        }
        out.registry.speakers.push_back(std::move(s));
        v.action = GroupAction::new_speaker;
        target = &out.registry.speakers.back();
      }
      v.target_speaker = target->id.id;
      stage = Stage::supplemented;
    } else {
      target = out.registry.find(v.main_speaker.id);
      if (!target) throw std::logic_error("main speaker missing from registry");
    }

    for (int line = g.first_line; line <= g.last_line; ++line) {
      const LineFeatures &f = features.at(line);
      if (f.active) continue;
      Assignment &a = out.assignments[line];
      a.speaker = target->id;
      a.stage = stage;
      a.confidence = cosine_similarity(f.timbre, target->prototype);
    }
    out.verdicts.push_back(v);
  }
  return out;
}

}  // namespace subdiar
