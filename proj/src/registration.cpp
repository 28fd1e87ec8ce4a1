// subdiar/registration.cpp

#include "subdiar/registration.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace subdiar {

LineLabels labels_by_line(const ClusterLabels &labels,
                          const std::vector<int> &line_ids) {
  if (labels.labels.size() != line_ids.size()) {
    throw std::invalid_argument("cluster labels and line ids differ in length");
  }
  LineLabels out;
  for (std::size_t k = 0; k < line_ids.size(); ++k) {
    out.emplace(line_ids[k], labels.labels[k]);
  }
  return out;
}

const RegisteredSpeaker *SpeakerRegistry::find(int id) const {
  for (const RegisteredSpeaker &s : speakers) {
    if (s.id.id == id) return &s;
  }
  return nullptr;
}

int SpeakerRegistry::next_id() const {
  int next = 1;
  for (const RegisteredSpeaker &s : speakers) next = std::max(next, s.id.id + 1);
  return next;
}

std::size_t SpeakerRegistry::count(Origin origin) const {
  return static_cast<std::size_t>(
      std::count_if(speakers.begin(), speakers.end(),
                    [&](const RegisteredSpeaker &s) { return s.id.origin == origin; }));
}

int vote_audio_cluster(const std::vector<int> &lines, const LineLabels &audio) {
  if (lines.empty()) throw std::invalid_argument("vote over an empty line set");
  std::map<int, int> votes;
  for (int line : lines) {
    auto it = audio.find(line);
    if (it == audio.end()) {
      throw std::invalid_argument("line " + std::to_string(line) +
                                  " has no audio cluster label");
    }
    ++votes[it->second];
  }
  // std::map iterates ascending, so the first maximum is the smallest id
  int best = 0;
  int best_count = 0;
  for (const auto &[cluster, count] : votes) {
    if (count > best_count) {
      best = cluster;
      best_count = count;
    }
  }
  return best;
}

SpeakerRegistry build_registry(const FeatureMap &features,
                               const LineLabels &visual,
                               const LineLabels &audio) {
  for (const auto &[id, f] : features) {
    if (f.active != (visual.count(id) == 1)) {
      throw std::invalid_argument("visual labels must cover exactly the active "
                                  "lines (line " + std::to_string(id) + ")");
    }
    if (!audio.count(id)) {
      throw std::invalid_argument("line " + std::to_string(id) +
                                  " has no audio cluster label");
    }
  }
  std::map<int, std::vector<int>> members;  // visual cluster -> S_i
  for (const auto &[line, cluster] : visual) {
    if (!features.count(line)) {
      throw std::invalid_argument("visual label for unknown line " +
                                  std::to_string(line));
    }
    members[cluster].push_back(line);
  }

  SpeakerRegistry registry;
  for (const auto &[cluster, lines] : members) {
    const int voted = vote_audio_cluster(lines, audio);
    RegisteredSpeaker s;
    s.id = SpeakerId{cluster, Origin::visual_anchor};
    s.audio_cluster = voted;
    std::vector<const Embedding *> timbres;
    for (int line : lines) {
      if (audio.at(line) == voted) {
        s.support.push_back(line);
        timbres.push_back(&features.at(line).timbre);
      }
    }
    // the winning cluster has at least one vote, so T_i is never empty
    s.prototype = mean_embedding(std::span<const Embedding *const>(timbres));
    registry.speakers.push_back(std::move(s));
  }
  return registry;
}

std::vector<Assignment> assign_initial(const Program &program,
                                       const FeatureMap &features,
                                       const LineLabels &visual,
                                       const SpeakerRegistry &registry) {
  if (registry.empty()) throw std::invalid_argument("speaker registry is empty");
  std::vector<Assignment> out;
  out.reserve(program.lines.size());
  for (const Line &line : program.lines) {
    const LineFeatures &f = features.at(line.line_id);
    Assignment a;
    a.line_id = line.line_id;
    if (f.active) {
      const RegisteredSpeaker *s = registry.find(visual.at(line.line_id));
      if (!s) {
        throw std::invalid_argument("visual cluster " +
                                    std::to_string(visual.at(line.line_id)) +
                                    " is not registered");
      }
      a.speaker = s->id;
      a.confidence = 1.0;
      a.stage = Stage::active_visual;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (const RegisteredSpeaker &s : registry.speakers) {
        const double sim = cosine_similarity(f.timbre, s.prototype);
        if (sim > best) {
          best = sim;
          a.speaker = s.id;
        }
      }
      a.confidence = best;
      a.stage = Stage::prototype_nearest;
    }
    out.push_back(a);
  }
  return out;
}

}  // namespace subdiar
